// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamtext/config.hpp"
#include "streamtext/hypothesis.hpp"
#include "streamtext/stability.hpp"

namespace streamtext {

enum class CommitMode {
    kWaiting,
    kDetectedDuplicate,  // a candidate prefix is staged, awaiting confirmation
};

// A prefix waiting for its confirming agreement. Only normalized word forms
// are kept; timestamps of the eventual commit come from the hypothesis that
// confirms it.
struct StagedCandidate {
    std::vector<std::string> words;
    std::uint64_t staged_at_step = 0;
};

struct CommitState {
    CommitMode mode = CommitMode::kWaiting;
    std::optional<StagedCandidate> staged;
};

struct CommitDecision {
    enum class Kind { kCommit, kStage, kHold, kRejectedByGuardrail };
    Kind kind = Kind::kHold;
    std::vector<WordRecord> prefix;  // non-empty for kCommit / kStage
    double sigma = 0.0;
    int tier = 0;  // 1 or 2 for kCommit
};

/// Character length of the normalized, space-joined prefix.
inline std::size_t prefix_char_length(std::span<const WordRecord> prefix) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        total += normalize_word(prefix[i].text).size();
        if (i > 0) {
            ++total;
        }
    }
    return total;
}

// Disallowed tail patterns: a token the decoder likely cut mid-processing.
inline bool tail_token_ok(std::string_view token) {
    if (token.empty()) {
        return false;
    }
    if (token.back() == '-') {
        return false;
    }
    if (token.ends_with("...") || token.ends_with("\xE2\x80\xA6")) {
        return false;
    }
    // Unmatched opening bracket anywhere in the token.
    constexpr std::string_view opens = "([{";
    constexpr std::string_view closes = ")]}";
    for (std::size_t p = 0; p < opens.size(); ++p) {
        long depth = 0;
        for (char c : token) {
            if (c == opens[p]) ++depth;
            if (c == closes[p]) --depth;
        }
        if (depth > 0) {
            return false;
        }
    }
    return true;
}

/// Tail guardrail: false when the prefix ends in a disallowed token.
inline bool guardrail_tail(std::span<const WordRecord> prefix) {
    return !prefix.empty() && tail_token_ok(prefix.back().text);
}

namespace detail {

inline Hypothesis hypothesis_from_words(std::span<const std::string> words) {
    Hypothesis h;
    h.words.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        h.words.push_back(WordRecord{words[i], 0.0, 0.0, i});
    }
    return h;
}

}  // namespace detail

// The two-tier commit policy as a pure transition over an explicit state.
//
// Tier 1 commits immediately on perfect prefix agreement of sufficient
// length. Otherwise a qualifying prefix is staged, and commits only after a
// third hypothesis confirms it against the staged candidate. A failed
// confirmation discards the stage and the fresh pair may stage again in the
// same step. Guardrail failures leave the state untouched.
//
// The context guardrail (timestamp occurrence resolution) is applied by the
// engine at commit time; this function checks only the tail guardrail.
inline std::pair<CommitDecision, CommitState> evaluate(const CommitState& state,
                                                       const Hypothesis& prev,
                                                       const Hypothesis& curr,
                                                       const EngineConfig& cfg) {
    const PrefixResult pair = sa_prefix(prev, curr, cfg.alpha, cfg.theta);

    auto long_enough = [](const std::vector<WordRecord>& p, std::size_t min_chars) {
        return !p.empty() && prefix_char_length(p) >= min_chars;
    };
    auto commit = [](std::vector<WordRecord> p, double sigma, int tier) {
        return std::pair<CommitDecision, CommitState>{
            CommitDecision{CommitDecision::Kind::kCommit, std::move(p), sigma, tier},
            CommitState{}};
    };
    auto rejected = [&](double sigma) {
        return std::pair<CommitDecision, CommitState>{
            CommitDecision{CommitDecision::Kind::kRejectedByGuardrail, {}, sigma, 0}, state};
    };

    // Tier 1: perfect agreement commits from any mode and drops a stale stage.
    if (pair.sigma >= 1.0 && long_enough(pair.prefix, cfg.l1_chars)) {
        if (guardrail_tail(pair.prefix)) {
            return commit(pair.prefix, pair.sigma, 1);
        }
        return rejected(pair.sigma);
    }

    bool stage_discarded = false;
    if (state.mode == CommitMode::kDetectedDuplicate && state.staged.has_value()) {
        const Hypothesis staged_h = detail::hypothesis_from_words(state.staged->words);
        const PrefixResult confirm = sa_prefix(staged_h, curr, cfg.alpha, cfg.theta);
        if (confirm.sigma >= cfg.theta && long_enough(confirm.prefix, cfg.l2_chars)) {
            if (guardrail_tail(confirm.prefix)) {
                return commit(confirm.prefix, confirm.sigma, 2);
            }
            return rejected(confirm.sigma);
        }
        stage_discarded = true;  // confirmation failed; fresh staging below
    }

    if (pair.sigma >= cfg.theta && long_enough(pair.prefix, cfg.l2_chars)) {
        if (guardrail_tail(pair.prefix)) {
            std::vector<std::string> staged_words;
            staged_words.reserve(pair.prefix.size());
            for (const auto& w : pair.prefix) {
                staged_words.push_back(normalize_word(w.text));
            }
            CommitState next{CommitMode::kDetectedDuplicate,
                             StagedCandidate{std::move(staged_words), curr.decode_step}};
            return {CommitDecision{CommitDecision::Kind::kStage, pair.prefix, pair.sigma, 0},
                    std::move(next)};
        }
        return rejected(pair.sigma);
    }

    CommitState next = stage_discarded ? CommitState{} : state;
    return {CommitDecision{CommitDecision::Kind::kHold, {}, pair.sigma, 0}, std::move(next)};
}

}  // namespace streamtext
