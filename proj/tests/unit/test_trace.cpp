// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#include <catch2/catch.hpp>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "streamtext/trace.hpp"

using streamtext::corrupt_word;
using streamtext::generate_trace;
using streamtext::kSampleRate;
using streamtext::load_trace;
using streamtext::rms_level;
using streamtext::save_trace;
using streamtext::ScriptedTranscriber;
using streamtext::SplitMix64;
using streamtext::SyntheticTrace;
using streamtext::TraceAudioSource;
using streamtext::TraceGenOptions;

TEST_CASE("equal seeds give byte-identical traces", "[trace]") {
    TraceGenOptions opt;
    opt.seed = 42;
    opt.duration_s = 30.0;
    opt.noise_max_delay_s = 1.0;

    std::ostringstream a;
    std::ostringstream b;
    save_trace(a, generate_trace(opt));
    save_trace(b, generate_trace(opt));
    CHECK(a.str() == b.str());
    CHECK_FALSE(a.str().empty());

    opt.seed = 43;
    std::ostringstream c;
    save_trace(c, generate_trace(opt));
    CHECK(a.str() != c.str());
}

TEST_CASE("generated traces satisfy the timeline invariants", "[trace]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        TraceGenOptions opt;
        opt.seed = seed;
        opt.duration_s = 40.0;
        opt.noise_max_delay_s = 2.0;
        const SyntheticTrace trace = generate_trace(opt);
        REQUIRE_FALSE(trace.words.empty());
        for (std::size_t i = 0; i < trace.words.size(); ++i) {
            const auto& w = trace.words[i];
            CHECK(w.end_s >= w.start_s);
            CHECK(w.stabilize_s >= w.end_s);
            if (i > 0) {
                CHECK(w.start_s >= trace.words[i - 1].end_s);
                CHECK(w.text != trace.words[i - 1].text);  // no adjacent repeats
            }
        }
    }
}

TEST_CASE("trace round-trips through the line format", "[trace]") {
    TraceGenOptions opt;
    opt.seed = 3;
    opt.duration_s = 15.0;
    opt.noise_max_delay_s = 0.7;
    SyntheticTrace trace = generate_trace(opt);
    trace.rms.push_back({1.0, 2.0, 0.25});
    trace.lang.push_back({0.0, 15.0, "en"});

    std::ostringstream out;
    save_trace(out, trace);
    std::istringstream in(out.str());
    const SyntheticTrace loaded = load_trace(in);

    REQUIRE(loaded.words.size() == trace.words.size());
    CHECK(loaded.words.front().text == trace.words.front().text);
    CHECK(loaded.words.back().end_s == trace.words.back().end_s);
    // The generator adds a voiced-tail span, plus the one added above.
    REQUIRE(loaded.rms.size() == trace.rms.size());
    CHECK(loaded.rms.back().level == 0.25);
    REQUIRE(loaded.lang.size() == 1);
    CHECK(loaded.lang[0].tag == "en");
}

TEST_CASE("malformed traces are rejected", "[trace]") {
    std::istringstream bad_json("{not json");
    CHECK_THROWS_AS(load_trace(bad_json), std::runtime_error);

    std::istringstream overlapping(
        R"({"type":"word","text":"a","start_s":0.0,"end_s":1.0,"stabilize_s":1.0})"
        "\n"
        R"({"type":"word","text":"b","start_s":0.5,"end_s":1.5,"stabilize_s":1.5})");
    CHECK_THROWS_AS(load_trace(overlapping), std::invalid_argument);

    std::istringstream early_stabilize(
        R"({"type":"word","text":"a","start_s":0.0,"end_s":1.0,"stabilize_s":0.5})");
    CHECK_THROWS_AS(load_trace(early_stabilize), std::invalid_argument);
}

TEST_CASE("scripted transcription respects the window", "[trace]") {
    TraceGenOptions opt;
    opt.seed = 9;
    opt.duration_s = 30.0;
    opt.noise_max_delay_s = 1.5;
    const SyntheticTrace trace = generate_trace(opt);
    ScriptedTranscriber scripted(trace);

    SplitMix64 rng(77);
    for (int i = 0; i < 200; ++i) {
        const double origin = rng.uniform(0.0, 25.0);
        const double len = rng.uniform(0.0, 8.0);
        const std::vector<float> window(
            static_cast<std::size_t>(len * kSampleRate), 0.0f);
        const auto h = scripted.transcribe(window, origin, static_cast<std::uint64_t>(i + 1));
        const double window_dur = static_cast<double>(window.size()) / kSampleRate;
        for (const auto& w : h.words) {
            CHECK(w.start_s >= -1e-9);
            CHECK(w.end_s <= window_dur + 1e-9);
            CHECK(w.end_s >= w.start_s);
        }
        CHECK(h.decode_step == static_cast<std::uint64_t>(i + 1));
    }
}

TEST_CASE("words decode corrupted before stabilization and exact after", "[trace]") {
    SyntheticTrace trace;
    trace.words.push_back({"remember", 1.0, 1.5, 5.0});
    trace.validate();
    ScriptedTranscriber scripted(trace);

    // Window [0, 4]: now = 4 < stabilize 5 -> corrupted form.
    std::vector<float> window4(4 * kSampleRate, 0.0f);
    const auto early = scripted.transcribe(window4, 0.0, 1);
    REQUIRE(early.words.size() == 1);
    CHECK(early.words[0].text != "remember");
    CHECK(early.words[0].text.size() == 8);  // single substitution keeps the length

    // Window [0, 6]: now = 6 >= stabilize -> exact form with exact times.
    std::vector<float> window6(6 * kSampleRate, 0.0f);
    const auto late = scripted.transcribe(window6, 0.0, 2);
    REQUIRE(late.words.size() == 1);
    CHECK(late.words[0].text == "remember");
    CHECK(late.words[0].start_s == Approx(1.0));
    CHECK(late.words[0].end_s == Approx(1.5));
}

TEST_CASE("corruption is deterministic per (word, step) and varies by step", "[trace]") {
    const std::string word = "agreement";
    CHECK(corrupt_word(word, 3) == corrupt_word(word, 3));
    CHECK(corrupt_word(word, 3).size() == word.size());

    std::set<std::string> variants;
    for (std::uint64_t step = 1; step <= 20; ++step) {
        const auto c = corrupt_word(word, step);
        CHECK(c != word);
        CHECK(c.front() == word.front());  // interior substitution only
        CHECK(c.back() == word.back());
        variants.insert(c);
    }
    CHECK(variants.size() > 5);
}

TEST_CASE("empty windows report certain no-speech", "[trace]") {
    SyntheticTrace trace;
    trace.words.push_back({"later", 10.0, 10.4, 10.4});
    trace.validate();
    ScriptedTranscriber scripted(trace);

    std::vector<float> window(2 * kSampleRate, 0.0f);
    const auto h = scripted.transcribe(window, 0.0, 1);
    CHECK(h.words.empty());
    REQUIRE(h.no_speech_prob.has_value());
    CHECK(*h.no_speech_prob == 1.0);
}

TEST_CASE("the language track tags hypotheses by decode time", "[trace]") {
    SyntheticTrace trace;
    trace.words.push_back({"word", 0.5, 0.9, 0.9});
    trace.lang.push_back({0.0, 5.0, "en"});
    trace.lang.push_back({5.0, 10.0, "fr"});
    trace.validate();
    ScriptedTranscriber scripted(trace);

    std::vector<float> win2(2 * kSampleRate, 0.0f);
    const auto early = scripted.transcribe(win2, 0.0, 1);
    REQUIRE(early.language.has_value());
    CHECK(*early.language == "en");

    const auto late = scripted.transcribe(win2, 4.5, 2);  // now = 6.5
    REQUIRE(late.language.has_value());
    CHECK(*late.language == "fr");
}

TEST_CASE("rendered audio hits the requested RMS levels", "[trace]") {
    SyntheticTrace trace;
    trace.words.push_back({"steady", 0.0, 1.0, 1.0});
    trace.validate();
    TraceAudioSource audio(trace);

    const auto voiced = audio.render(0.0, 1.0);
    REQUIRE(voiced.size() == static_cast<std::size_t>(kSampleRate));
    CHECK(rms_level(voiced) == Approx(0.1).epsilon(0.05));

    const auto silent = audio.render(1.5, 2.0);
    CHECK(rms_level(silent) == 0.0);

    SyntheticTrace override_trace;
    override_trace.words.push_back({"steady", 0.0, 1.0, 1.0});
    override_trace.rms.push_back({0.0, 1.0, 0.02});
    override_trace.validate();
    TraceAudioSource low(override_trace);
    CHECK(rms_level(low.render(0.0, 1.0)) == Approx(0.02).epsilon(0.05));

    // Rendering is chunk-size invariant: the same sample grid either way.
    const auto whole = audio.render(0.0, 0.5);
    auto a = audio.render(0.0, 0.25);
    const auto b = audio.render(0.25, 0.5);
    a.insert(a.end(), b.begin(), b.end());
    CHECK(a == whole);
}
