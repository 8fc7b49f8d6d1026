// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace streamtext {

// One decoded word occurrence with window-relative timestamps in seconds.
struct WordRecord {
    std::string text;
    double start_s = 0.0;
    double end_s = 0.0;
    std::size_t index = 0;  // 0-based occurrence position in the hypothesis
};

// One decode pass: an ordered word sequence plus optional decoder metadata.
// Immutable after construction; safe to share read-only.
struct Hypothesis {
    std::vector<WordRecord> words;
    std::optional<double> no_speech_prob;     // in [0, 1] when the decoder reports it
    std::optional<std::string> language;      // BCP-47-ish tag when reported
    std::uint64_t decode_step = 0;
    std::string raw_text;
};

// Strips surrounding punctuation/whitespace, collapses internal whitespace
// runs to one space, and lower-cases ASCII.
inline std::string normalize_word(std::string_view w) {
    auto strippable = [](unsigned char c) { return std::isspace(c) || std::ispunct(c); };
    std::size_t b = 0;
    std::size_t e = w.size();
    while (b < e && strippable(static_cast<unsigned char>(w[b]))) {
        ++b;
    }
    while (e > b && strippable(static_cast<unsigned char>(w[e - 1]))) {
        --e;
    }
    std::string out;
    out.reserve(e - b);
    bool pending_space = false;
    for (std::size_t i = b; i < e; ++i) {
        const auto c = static_cast<unsigned char>(w[i]);
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) {
            out += ' ';
        }
        pending_space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

inline std::vector<std::string> normalized_words(const Hypothesis& h) {
    std::vector<std::string> out;
    out.reserve(h.words.size());
    for (const auto& w : h.words) {
        out.push_back(normalize_word(w.text));
    }
    return out;
}

inline std::string join_words(std::span<const std::string> words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

/// End time of occurrence i; throws std::out_of_range for a bad index.
inline double end_time_of(const Hypothesis& h, std::size_t i) {
    if (i >= h.words.size()) {
        throw std::out_of_range("word index out of range");
    }
    return h.words[i].end_s;
}

// Resolves which occurrence of `word` in `h` a commit boundary refers to.
// `committed_tail` is the up-to-two committed words preceding the boundary
// plus the boundary word itself. The occurrence whose preceding two words
// (normalized) best match the committed predecessors wins; ties go to the
// earliest index. Returns nullopt when the word does not occur at all.
inline std::optional<std::size_t> disambiguate_occurrence(
    const Hypothesis& h, std::string_view word,
    std::span<const std::string> committed_tail) {
    const std::string target = normalize_word(word);
    std::vector<std::string> norm = normalized_words(h);
    std::vector<std::size_t> occurrences;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        if (norm[i] == target) {
            occurrences.push_back(i);
        }
    }
    if (occurrences.empty()) {
        return std::nullopt;
    }
    if (occurrences.size() == 1) {
        return occurrences.front();
    }

    // Predecessors implied by the tail: everything before its last element.
    std::vector<std::string> prior;
    if (committed_tail.size() > 1) {
        for (std::size_t i = 0; i + 1 < committed_tail.size(); ++i) {
            prior.push_back(normalize_word(committed_tail[i]));
        }
    }
    if (prior.size() > 2) {
        prior.erase(prior.begin(), prior.end() - 2);
    }

    std::size_t best = occurrences.front();
    int best_score = -1;
    for (std::size_t j : occurrences) {
        int score = 0;
        for (std::size_t d = 1; d <= 2; ++d) {
            if (j >= d && prior.size() >= d && norm[j - d] == prior[prior.size() - d]) {
                ++score;
            }
        }
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

// Repairs decoder timestamps in place: clamps into [0, window duration],
// forces start times non-decreasing (clamped to the previous start), keeps
// end >= start and end times monotone, and renumbers occurrence indices.
inline void repair_timestamps(Hypothesis& h, double window_duration_s) {
    double prev_start = 0.0;
    double prev_end = 0.0;
    for (std::size_t i = 0; i < h.words.size(); ++i) {
        auto& w = h.words[i];
        w.start_s = std::clamp(w.start_s, 0.0, window_duration_s);
        w.end_s = std::clamp(w.end_s, 0.0, window_duration_s);
        if (w.start_s < prev_start) {
            w.start_s = prev_start;
        }
        if (w.end_s < w.start_s) {
            w.end_s = w.start_s;
        }
        if (w.end_s < prev_end) {
            w.end_s = prev_end;
        }
        w.index = i;
        prev_start = w.start_s;
        prev_end = w.end_s;
    }
}

}  // namespace streamtext
