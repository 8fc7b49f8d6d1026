// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#include <catch2/catch.hpp>

#include <string>
#include <vector>

#include "streamtext/rejection.hpp"
#include "streamtext/trace.hpp"
#include "support/oracles.hpp"

using streamtext::EngineConfig;
using streamtext::GateOutcome;
using streamtext::Hypothesis;
using streamtext::RejectionFilter;
using streamtext::SplitMix64;

namespace {

EngineConfig defaults() {
    EngineConfig cfg;
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_CASE("annotation ratio counts pattern matches", "[rejection]") {
    RejectionFilter filter(defaults());
    CHECK(filter.annotation_ratio(oracle::hypothesis_of({"[music]", "hello", "world"})) ==
          Approx(1.0 / 3.0));
    CHECK(filter.annotation_ratio(oracle::hypothesis_of({"[music]", "[applause]"})) == 1.0);
    CHECK(filter.annotation_ratio(oracle::hypothesis_of({"hello"})) == 0.0);
    CHECK(filter.annotation_ratio(Hypothesis{}) == 0.0);
    CHECK(filter.is_annotation("(laughs)"));
    CHECK(filter.is_annotation("**cough**"));
    CHECK_FALSE(filter.is_annotation("um"));  // fillers are speech, not annotations
}

TEST_CASE("gate rejects by annotation, no-speech, and energy", "[rejection]") {
    RejectionFilter filter(defaults());

    auto annotated = oracle::hypothesis_of({"[music]", "[noise]", "hi"});  // ratio 2/3 >= 0.6
    CHECK(filter.gate(annotated, 0.1).outcome == GateOutcome::kRejectAnnotation);

    Hypothesis quiet = oracle::hypothesis_of({"hello", "there"});
    quiet.no_speech_prob = 0.95;
    CHECK(filter.gate(quiet, 0.1).outcome == GateOutcome::kRejectNoSpeech);

    Hypothesis ok = oracle::hypothesis_of({"hello", "there"});
    CHECK(filter.gate(ok, 0.001).outcome == GateOutcome::kRejectEnergy);
    CHECK(filter.gate(ok, 0.1).accepted());

    Hypothesis no_q = oracle::hypothesis_of({"fine", "speech"});
    no_q.no_speech_prob.reset();
    CHECK(filter.gate(no_q, 0.1).accepted());
}

TEST_CASE("gate outcome matches the any-of oracle regardless of order", "[rejection]") {
    RejectionFilter filter(defaults());
    const EngineConfig cfg = defaults();
    SplitMix64 rng(44);
    for (int i = 0; i < 300; ++i) {
        Hypothesis h;
        const std::size_t n = rng.below(5);
        std::size_t annotated = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (rng.below(2) == 0) {
                h.words.push_back({"[music]", 0.0, 0.1, k});
                ++annotated;
            } else {
                h.words.push_back({"speech", 0.0, 0.1, k});
            }
        }
        if (rng.below(2) == 0) {
            h.no_speech_prob = rng.next_double();
        }
        const double rms = rng.next_double() * 0.01;

        const bool reject_ann =
            n > 0 && static_cast<double>(annotated) / static_cast<double>(n) >= cfg.gamma_ann;
        const bool reject_ns = h.no_speech_prob.has_value() && *h.no_speech_prob >= cfg.gamma_ns;
        const bool reject_energy = rms < cfg.energy_threshold;
        const bool want_reject = reject_ann || reject_ns || reject_energy;

        CHECK(filter.gate(h, rms).accepted() == !want_reject);
    }
}

TEST_CASE("rejection counter trips after r_max consecutive rejections", "[rejection]") {
    EngineConfig cfg = defaults();
    cfg.r_max = 5;
    RejectionFilter filter(cfg);

    for (int i = 0; i < 5; ++i) {
        CHECK_FALSE(filter.record(false));
    }
    CHECK(filter.record(false));  // the sixth consecutive rejection trips

    filter.reset_counter();
    CHECK_FALSE(filter.record(false));
    CHECK_FALSE(filter.record(true));  // acceptance resets
    CHECK(filter.consecutive_rejections() == 0);

    RejectionFilter fresh(cfg);
    CHECK_FALSE(fresh.record(true));
}

TEST_CASE("counter equals the trailing rejection run on random streams", "[rejection]") {
    EngineConfig cfg = defaults();
    cfg.r_max = 1000;  // keep the trip out of the way
    RejectionFilter filter(cfg);
    SplitMix64 rng(45);
    std::vector<bool> stream;
    for (int i = 0; i < 500; ++i) {
        const bool accepted = rng.below(3) == 0;
        stream.push_back(accepted);
        filter.record(accepted);
        CHECK(filter.consecutive_rejections() == oracle::trailing_rejections(stream));
    }
}

TEST_CASE("language switch needs m consecutive mismatches", "[rejection]") {
    EngineConfig cfg = defaults();
    cfg.language_persistence = 3;
    RejectionFilter filter(cfg);

    auto with_lang = [](const std::string& tag) {
        Hypothesis h = oracle::hypothesis_of({"word"});
        h.language = tag;
        return h;
    };

    CHECK_FALSE(filter.language_switch(with_lang("en")));  // adopts the dominant language
    SECTION("three in a row fire on the third") {
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK(filter.language_switch(with_lang("fr")));
        REQUIRE(filter.dominant_language().has_value());
        CHECK(*filter.dominant_language() == "fr");
    }
    SECTION("a broken run never fires") {
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK_FALSE(filter.language_switch(with_lang("en")));
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK(*filter.dominant_language() == "en");
    }
    SECTION("missing metadata leaves the run untouched") {
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        CHECK_FALSE(filter.language_switch(with_lang("fr")));
        Hypothesis no_lang = oracle::hypothesis_of({"word"});
        CHECK_FALSE(filter.language_switch(no_lang));
        CHECK(filter.language_switch(with_lang("fr")));  // run continues past the gap
    }
}

TEST_CASE("language switch never fires early on random runs", "[rejection]") {
    SplitMix64 rng(46);
    for (int trial = 0; trial < 50; ++trial) {
        EngineConfig cfg = defaults();
        cfg.language_persistence = 2 + static_cast<int>(rng.below(4));
        RejectionFilter filter(cfg);
        Hypothesis base = oracle::hypothesis_of({"word"});
        base.language = "en";
        filter.language_switch(base);

        int run = 0;
        for (int i = 0; i < 60; ++i) {
            Hypothesis h = oracle::hypothesis_of({"word"});
            h.language = rng.below(2) == 0 ? "en" : "fr";
            const bool mismatch = *h.language != *filter.dominant_language();
            run = mismatch ? run + 1 : 0;
            const bool fired = filter.language_switch(h);
            if (fired) {
                CHECK(run == cfg.language_persistence);
                run = 0;
            } else {
                CHECK(run < cfg.language_persistence);
            }
        }
    }
}
