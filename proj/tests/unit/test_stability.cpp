// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#include <catch2/catch.hpp>

#include <string>
#include <vector>

#include "streamtext/stability.hpp"
#include "streamtext/trace.hpp"
#include "support/oracles.hpp"

using streamtext::Hypothesis;
using streamtext::levenshtein;
using streamtext::sa_prefix;
using streamtext::SplitMix64;
using streamtext::word_similarity;

TEST_CASE("word similarity agrees with the character-DP oracle", "[stability]") {
    CHECK(word_similarity("home", "home") == 1.0);
    // lev("home","house") = 2 over max length 5
    CHECK(oracle::levenshtein_matrix("home", "house") == 2);
    CHECK(word_similarity("home", "house") == Approx(0.6));
    CHECK(word_similarity("", "") == 1.0);
    CHECK(word_similarity("", "abc") == 0.0);
}

TEST_CASE("levenshtein matches the full-matrix oracle on random strings", "[stability]") {
    SplitMix64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const std::string a = oracle::random_word(rng, 10);
        const std::string b = oracle::random_word(rng, 10);
        CHECK(levenshtein(a, b) == oracle::levenshtein_matrix(a, b));
    }
}

TEST_CASE("word similarity is symmetric", "[stability]") {
    SplitMix64 rng(32);
    for (int i = 0; i < 300; ++i) {
        const std::string a = oracle::random_word(rng);
        const std::string b = oracle::random_word(rng);
        CHECK(word_similarity(a, b) == word_similarity(b, a));
    }
}

TEST_CASE("identical hypotheses give a full perfect prefix", "[stability]") {
    const auto h = oracle::hypothesis_of({"the", "cat", "sat"});
    const auto r = sa_prefix(h, h, 0.6, 0.5);
    CHECK(r.k == 3);
    CHECK(r.sigma == 1.0);
    CHECK(r.prefix.size() == 3);
}

TEST_CASE("near-match extends the prefix with reduced sigma", "[stability]") {
    const auto prev = oracle::hypothesis_of({"the", "cat", "set"});
    const auto curr = oracle::hypothesis_of({"the", "cat", "sat"});
    // oracle: lev("set","sat") = 1 -> similarity 2/3
    CHECK(oracle::levenshtein_matrix("set", "sat") == 1);
    const auto r = sa_prefix(prev, curr, 0.6, 0.5);
    CHECK(r.k == 3);
    CHECK(r.sigma == Approx((1.0 + 1.0 + 2.0 / 3.0) / 3.0).epsilon(1e-12));
    CHECK(r.prefix[2].text == "sat");  // words come from the current hypothesis
}

TEST_CASE("dissimilar first words stop the prefix immediately", "[stability]") {
    const auto prev = oracle::hypothesis_of({"alpha"});
    const auto curr = oracle::hypothesis_of({"omega"});
    CHECK(oracle::word_similarity("alpha", "omega") < 0.6);
    const auto r = sa_prefix(prev, curr, 0.6, 0.5);
    CHECK(r.k == 0);
    CHECK(r.sigma == 0.0);
    CHECK(r.prefix.empty());
}

TEST_CASE("running mean stops extension when theta exceeds alpha", "[stability]") {
    // similarities: 1.0, then ~0.5; with theta 0.9 the second position would
    // pull the mean to 0.75 < 0.9, so the scan stops at k = 1.
    const auto prev = oracle::hypothesis_of({"aaaa", "abcd"});
    const auto curr = oracle::hypothesis_of({"aaaa", "axyd"});
    const double s2 = oracle::word_similarity("abcd", "axyd");
    REQUIRE(s2 == Approx(0.5));
    const auto r = sa_prefix(prev, curr, 0.3, 0.9);
    CHECK(r.k == 1);
    CHECK(r.sigma == 1.0);
}

TEST_CASE("sa_prefix equals the reference scan on random pairs", "[stability]") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::string> prev_words;
        std::vector<std::string> curr_words;
        const std::size_t n1 = rng.below(10);
        const std::size_t n2 = rng.below(10);
        for (std::size_t i = 0; i < n1; ++i) prev_words.push_back(oracle::random_word(rng, 6));
        for (std::size_t i = 0; i < n2; ++i) curr_words.push_back(oracle::random_word(rng, 6));
        const double alpha = rng.uniform(0.2, 0.9);
        const double theta = rng.uniform(0.2, 0.9);

        const auto got = sa_prefix(oracle::hypothesis_of(prev_words),
                                   oracle::hypothesis_of(curr_words), alpha, theta);
        const auto want = oracle::sa_prefix_reference(prev_words, curr_words, alpha, theta);
        REQUIRE(got.k == want.k);
        REQUIRE(got.sigma == want.sigma);
    }
}

TEST_CASE("raising alpha never lengthens the prefix", "[stability]") {
    SplitMix64 rng(34);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> a;
        std::vector<std::string> b;
        const std::size_t n = 1 + rng.below(8);
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(oracle::random_word(rng, 6));
            b.push_back(oracle::random_word(rng, 6));
        }
        const auto ha = oracle::hypothesis_of(a);
        const auto hb = oracle::hypothesis_of(b);
        std::size_t prev_k = sa_prefix(ha, hb, 0.1, 0.1).k;
        for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.0}) {
            const std::size_t k = sa_prefix(ha, hb, alpha, 0.1).k;
            CHECK(k <= prev_k);
            prev_k = k;
        }
    }
}
