// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "streamtext/hypothesis.hpp"

namespace streamtext {

// Classic two-row Levenshtein over any equality-comparable element type.
// Used at character level for word similarity and at word level for WER.
template <class T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
    if (a.size() < b.size()) {
        return levenshtein(b, a);
    }
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t prev = row[j];
            const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
            diag = prev;
        }
    }
    return row.back();
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    return levenshtein(std::span<const char>(a.data(), a.size()),
                       std::span<const char>(b.data(), b.size()));
}

// Normalized Levenshtein word similarity: 1 - d/max(|a|, |b|), and 1 when
// both strings are empty. Expects already-normalized words.
inline double word_similarity(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    const auto longest = std::max(a.size(), b.size());
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

// Similarity-aware longest common prefix of two consecutive hypotheses.
struct PrefixResult {
    std::vector<WordRecord> prefix;  // drawn from the current hypothesis
    double sigma = 0.0;              // mean similarity over the prefix; 0 when empty
    std::size_t k = 0;               // word count of the prefix
};

// Scans positions from the front on normalized words. A position is
// compatible when its pair similarity reaches `alpha`; extension stops at the
// first incompatible position or where the running mean similarity would
// drop below `theta`. The shorter hypothesis bounds the scan.
inline PrefixResult sa_prefix(const Hypothesis& prev, const Hypothesis& curr,
                              double alpha, double theta) {
    PrefixResult result;
    const std::size_t n = std::min(prev.words.size(), curr.words.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = word_similarity(normalize_word(prev.words[i].text),
                                         normalize_word(curr.words[i].text));
        if (s < alpha) {
            break;
        }
        if ((sum + s) / static_cast<double>(i + 1) < theta) {
            break;
        }
        sum += s;
        result.prefix.push_back(curr.words[i]);
    }
    result.k = result.prefix.size();
    result.sigma = result.k > 0 ? sum / static_cast<double>(result.k) : 0.0;
    return result;
}

}  // namespace streamtext
