// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "streamtext/config.hpp"
#include "streamtext/hypothesis.hpp"

namespace streamtext {

enum class GateOutcome {
    kAccept,
    kRejectAnnotation,
    kRejectNoSpeech,
    kRejectEnergy,
};

struct GateResult {
    GateOutcome outcome = GateOutcome::kAccept;
    bool accepted() const { return outcome == GateOutcome::kAccept; }
    const char* reason() const {
        switch (outcome) {
            case GateOutcome::kAccept: return "accept";
            case GateOutcome::kRejectAnnotation: return "annotation";
            case GateOutcome::kRejectNoSpeech: return "no_speech";
            case GateOutcome::kRejectEnergy: return "energy";
        }
        return "accept";
    }
};

// Pre-consensus filter: annotation-dominated hypotheses, no-speech gating,
// chunk energy gating, the consecutive-rejection counter, and language-switch
// detection. Owned by a single engine; the counter is not shareable.
class RejectionFilter {
public:
    explicit RejectionFilter(const EngineConfig& cfg)
        : gamma_ann_(cfg.gamma_ann),
          gamma_ns_(cfg.gamma_ns),
          energy_threshold_(cfg.energy_threshold),
          r_max_(cfg.r_max),
          persistence_(cfg.language_persistence) {
        for (const auto& p : cfg.annotation_patterns) {
            patterns_.emplace_back(p, std::regex::ECMAScript);
        }
    }

    bool is_annotation(const std::string& raw_token) const {
        // Annotations are matched on the surface form; normalization would
        // strip the very brackets the patterns look for.
        const std::string token = trimmed(raw_token);
        for (const auto& p : patterns_) {
            if (std::regex_match(token, p)) {
                return true;
            }
        }
        return false;
    }

    /// Fraction of words matching any annotation pattern; 0 for no words.
    double annotation_ratio(const Hypothesis& h) const {
        if (h.words.empty()) {
            return 0.0;
        }
        std::size_t hits = 0;
        for (const auto& w : h.words) {
            if (is_annotation(w.text)) {
                ++hits;
            }
        }
        return static_cast<double>(hits) / static_cast<double>(h.words.size());
    }

    // Accept/reject is an any-of over the three criteria, so the outcome
    // (ignoring the reported reason) is evaluation-order insensitive.
    GateResult gate(const Hypothesis& h, double chunk_rms) const {
        if (!h.words.empty() && annotation_ratio(h) >= gamma_ann_) {
            return {GateOutcome::kRejectAnnotation};
        }
        if (h.no_speech_prob.has_value() && *h.no_speech_prob >= gamma_ns_) {
            return {GateOutcome::kRejectNoSpeech};
        }
        if (energy_threshold_ > 0.0 && chunk_rms < energy_threshold_) {
            return {GateOutcome::kRejectEnergy};
        }
        return {GateOutcome::kAccept};
    }

    // Updates the consecutive-rejection counter; returns true when the count
    // has just exceeded r_max and a volatile reset is required.
    bool record(bool accepted) {
        if (accepted) {
            rejections_ = 0;
            return false;
        }
        ++rejections_;
        return rejections_ > r_max_;
    }

    void reset_counter() { rejections_ = 0; }
    int consecutive_rejections() const { return rejections_; }

    // Tracks the dominant language over accepted hypotheses. Returns true
    // when the mismatch run reaches the persistence count; the dominant
    // language then flips to the new one. Hypotheses without language
    // metadata leave the run untouched.
    bool language_switch(const Hypothesis& h) {
        if (!h.language.has_value()) {
            return false;
        }
        if (!dominant_.has_value()) {
            dominant_ = h.language;
            mismatch_run_ = 0;
            return false;
        }
        if (*h.language == *dominant_) {
            mismatch_run_ = 0;
            return false;
        }
        if (++mismatch_run_ >= persistence_) {
            dominant_ = h.language;
            mismatch_run_ = 0;
            return true;
        }
        return false;
    }

    const std::optional<std::string>& dominant_language() const { return dominant_; }
    double energy_threshold() const { return energy_threshold_; }

private:
    static std::string trimmed(const std::string& s) {
        std::size_t b = 0;
        std::size_t e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::vector<std::regex> patterns_;
    double gamma_ann_;
    double gamma_ns_;
    double energy_threshold_;
    int r_max_;
    int persistence_;
    int rejections_ = 0;
    int mismatch_run_ = 0;
    std::optional<std::string> dominant_;
};

}  // namespace streamtext
