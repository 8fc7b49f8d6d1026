// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "streamtext/audio_buffer.hpp"
#include "streamtext/engine.hpp"
#include "streamtext/hypothesis.hpp"

namespace streamtext {

// Small deterministic generator; identical across platforms and stdlibs,
// unlike the <random> distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

private:
    std::uint64_t state_;
};

struct TraceWord {
    std::string text;
    double start_s = 0.0;
    double end_s = 0.0;
    double stabilize_s = 0.0;  // stream time after which the word decodes exactly
};

struct RmsSpan {
    double t0 = 0.0;
    double t1 = 0.0;
    double level = 0.0;
};

struct LangSpan {
    double t0 = 0.0;
    double t1 = 0.0;
    std::string tag;
};

// Ground truth for a simulated session: the word timeline (with per-word
// stabilization times), optional RMS overrides, and an optional language
// track. This is both the audio recipe and the scripted decoder's script.
struct SyntheticTrace {
    std::vector<TraceWord> words;
    std::vector<RmsSpan> rms;
    std::vector<LangSpan> lang;

    double duration_s() const {
        double end = 0.0;
        for (const auto& w : words) {
            end = std::max(end, w.end_s);
        }
        for (const auto& r : rms) {
            end = std::max(end, r.t1);
        }
        for (const auto& l : lang) {
            end = std::max(end, l.t1);
        }
        return end;
    }

    std::vector<std::string> ground_truth() const {
        std::vector<std::string> out;
        out.reserve(words.size());
        for (const auto& w : words) {
            out.push_back(w.text);
        }
        return out;
    }

    void validate() const {
        double prev_end = -1.0;
        for (const auto& w : words) {
            if (w.text.empty()) {
                throw std::invalid_argument("trace word with empty text");
            }
            if (!(w.end_s >= w.start_s) || w.start_s < 0.0) {
                throw std::invalid_argument("trace word with invalid interval: " + w.text);
            }
            if (w.start_s < prev_end) {
                throw std::invalid_argument("trace words overlap or are unordered at: " + w.text);
            }
            if (w.stabilize_s < w.end_s) {
                throw std::invalid_argument("stabilize_s before word end at: " + w.text);
            }
            prev_end = w.end_s;
        }
    }
};

inline void save_trace(std::ostream& out, const SyntheticTrace& trace) {
    for (const auto& w : trace.words) {
        nlohmann::json j;
        j["type"] = "word";
        j["text"] = w.text;
        j["start_s"] = w.start_s;
        j["end_s"] = w.end_s;
        j["stabilize_s"] = w.stabilize_s;
        out << j.dump() << '\n';
    }
    for (const auto& r : trace.rms) {
        nlohmann::json j;
        j["type"] = "rms";
        j["t0"] = r.t0;
        j["t1"] = r.t1;
        j["level"] = r.level;
        out << j.dump() << '\n';
    }
    for (const auto& l : trace.lang) {
        nlohmann::json j;
        j["type"] = "lang";
        j["t0"] = l.t0;
        j["t1"] = l.t1;
        j["tag"] = l.tag;
        out << j.dump() << '\n';
    }
}

inline void save_trace(const std::string& path, const SyntheticTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open trace file for writing: " + path);
    }
    save_trace(out, trace);
}

inline SyntheticTrace load_trace(std::istream& in) {
    SyntheticTrace trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("malformed trace line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (type == "word") {
                trace.words.push_back(TraceWord{
                    j.at("text").get<std::string>(), j.at("start_s").get<double>(),
                    j.at("end_s").get<double>(), j.at("stabilize_s").get<double>()});
            } else if (type == "rms") {
                trace.rms.push_back(RmsSpan{j.at("t0").get<double>(), j.at("t1").get<double>(),
                                            j.at("level").get<double>()});
            } else if (type == "lang") {
                trace.lang.push_back(LangSpan{j.at("t0").get<double>(), j.at("t1").get<double>(),
                                              j.at("tag").get<std::string>()});
            } else {
                throw std::runtime_error("unknown record type: " + type);
            }
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("bad trace record at line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    }
    trace.validate();
    return trace;
}

inline SyntheticTrace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file: " + path);
    }
    return load_trace(in);
}

struct TraceGenOptions {
    std::uint64_t seed = 1;
    double duration_s = 60.0;
    double words_per_minute = 150.0;
    double noise_max_delay_s = 0.0;  // max stabilization delay; 0 = convergent
    double pause_min_s = 0.9;        // inter-sentence pause
    double pause_max_s = 1.4;
    int sentence_min_words = 6;
    int sentence_max_words = 12;
};

namespace detail {

inline const std::vector<std::string>& trace_lexicon() {
    static const std::vector<std::string> words = {
        "the",     "quick",   "brown",  "fox",     "jumps",   "over",    "lazy",
        "dog",     "good",    "morning", "everyone", "today",  "weather", "looks",
        "rather",  "pleasant", "please", "remember", "bring",  "your",    "notes",
        "system",  "stream",  "buffer", "window",  "commit",  "stable",  "text",
        "audio",   "sample",  "every",  "second",  "minute",  "people",  "often",
        "speak",   "clearly", "about",  "things",  "that",    "matter",  "while",
        "others",  "listen",  "with",   "great",   "interest", "during", "long",
        "meetings",
    };
    return words;
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace detail

// Deterministic single-character corruption of a word's interior, keyed by
// (word, decode step). Different steps generally corrupt different positions,
// so unstabilized words keep flickering across decodes.
inline std::string corrupt_word(const std::string& word, std::uint64_t decode_step) {
    if (word.empty()) {
        return word;
    }
    SplitMix64 rng(detail::fnv1a(word) ^ (decode_step * 0x9E3779B97F4A7C15ull) ^ 0xA5A5A5A5ull);
    std::size_t pos = 0;
    if (word.size() >= 3) {
        pos = 1 + static_cast<std::size_t>(rng.below(word.size() - 2));
    } else if (word.size() == 2) {
        pos = 1;
    }
    std::string out = word;
    const char orig = out[pos];
    char repl;
    if (orig >= 'a' && orig <= 'z') {
        repl = static_cast<char>('a' + (orig - 'a' + 1 + static_cast<int>(rng.below(25))) % 26);
    } else {
        repl = static_cast<char>('a' + static_cast<int>(rng.below(26)));
        if (repl == orig) {
            repl = repl == 'z' ? 'a' : static_cast<char>(repl + 1);
        }
    }
    out[pos] = repl;
    return out;
}

inline double round_ms(double t) {
    return std::round(t * 10000.0) / 10000.0;
}

// Synthesizes a word timeline: sentences of lexicon words with jittered
// durations, short inter-word gaps, and inter-sentence pauses. Equal options
// give byte-identical traces.
inline SyntheticTrace generate_trace(const TraceGenOptions& opt) {
    if (opt.duration_s <= 0.0 || opt.words_per_minute <= 0.0) {
        throw std::invalid_argument("trace duration and speech rate must be positive");
    }
    if (opt.noise_max_delay_s < 0.0 || opt.pause_min_s < 0.0 ||
        opt.pause_max_s < opt.pause_min_s || opt.sentence_min_words < 1 ||
        opt.sentence_max_words < opt.sentence_min_words) {
        throw std::invalid_argument("invalid trace generation options");
    }
    SplitMix64 rng(opt.seed);
    const auto& lexicon = detail::trace_lexicon();
    const double slot_s = 60.0 / opt.words_per_minute;

    SyntheticTrace trace;
    double t = 0.2;
    std::string prev_word;
    while (t < opt.duration_s) {
        const int sentence_len =
            opt.sentence_min_words +
            static_cast<int>(rng.below(
                static_cast<std::uint64_t>(opt.sentence_max_words - opt.sentence_min_words + 1)));
        for (int i = 0; i < sentence_len && t < opt.duration_s; ++i) {
            // No back-to-back repeats; keeps tail alignment unambiguous.
            std::string word = lexicon[rng.below(lexicon.size())];
            while (word == prev_word) {
                word = lexicon[rng.below(lexicon.size())];
            }
            prev_word = word;
            const double dur = slot_s * 0.8 * rng.uniform(0.8, 1.2);
            const double gap = slot_s * 0.2 * rng.uniform(0.6, 1.4);
            const double start = round_ms(t);
            const double end = round_ms(t + dur);
            const double delay = opt.noise_max_delay_s > 0.0
                                     ? rng.uniform(0.0, opt.noise_max_delay_s)
                                     : 0.0;
            trace.words.push_back(TraceWord{std::move(word), start, end, round_ms(end + delay)});
            t = end + gap;
        }
        t += rng.uniform(opt.pause_min_s, opt.pause_max_s);
    }
    if (!trace.words.empty()) {
        // Short voiced tail after the last word so the final decode cycle
        // clears the energy gate even when the word ends right at a cycle
        // boundary; the stream then goes silent for segmentation.
        const double last_end = trace.words.back().end_s;
        trace.rms.push_back(RmsSpan{last_end, round_ms(last_end + 0.3), 0.05});
    }
    trace.validate();
    return trace;
}

// Renders deterministic audio for a trace: seeded uniform noise scaled so the
// RMS matches the active level. Words are loud, gaps silent, and explicit
// rms spans override both.
class TraceAudioSource {
public:
    explicit TraceAudioSource(const SyntheticTrace& trace, double speech_rms = 0.1,
                              std::uint64_t seed = 1234567)
        : trace_(&trace), speech_rms_(speech_rms), seed_(seed) {
        word_starts_.reserve(trace.words.size());
        for (const auto& w : trace.words) {
            word_starts_.push_back(w.start_s);
        }
    }

    double level_at(double t) const {
        for (const auto& span : trace_->rms) {
            if (t >= span.t0 && t < span.t1) {
                return span.level;
            }
        }
        // Last word starting at or before t; words are ordered and disjoint.
        const auto it = std::upper_bound(word_starts_.begin(), word_starts_.end(), t);
        if (it != word_starts_.begin()) {
            const auto& w = trace_->words[static_cast<std::size_t>(it - word_starts_.begin()) - 1];
            if (t < w.end_s) {
                return speech_rms_;
            }
        }
        return 0.0;
    }

    /// Samples covering [t0, t1), aligned to the global sample grid.
    std::vector<float> render(double t0, double t1) const {
        const auto first = static_cast<std::int64_t>(std::llround(t0 * kSampleRate));
        const auto last = static_cast<std::int64_t>(std::llround(t1 * kSampleRate));
        std::vector<float> out;
        out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(last - first, 0)));
        for (std::int64_t i = first; i < last; ++i) {
            const double t = static_cast<double>(i) / kSampleRate;
            const double level = level_at(t);
            if (level <= 0.0) {
                out.push_back(0.0f);
                continue;
            }
            SplitMix64 rng(seed_ ^ static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ull);
            // Uniform noise in [-a, a] has RMS a / sqrt(3).
            const double a = level * std::sqrt(3.0);
            out.push_back(static_cast<float>((rng.next_double() * 2.0 - 1.0) * a));
        }
        return out;
    }

private:
    const SyntheticTrace* trace_;
    double speech_rms_;
    std::uint64_t seed_;
    std::vector<double> word_starts_;
};

// Deterministic stand-in for the ASR model. Emits the ground-truth words
// whose intervals lie fully inside the decode window, in corrupted form until
// their stabilization time passes. The no-speech probability is high for
// wordless windows, and the language tag follows the trace's language track.
class ScriptedTranscriber : public Transcriber {
public:
    explicit ScriptedTranscriber(SyntheticTrace trace) : trace_(std::move(trace)) {}

    Hypothesis transcribe(std::span<const float> window, double window_origin_s,
                          std::uint64_t decode_step) override {
        constexpr double kEps = 1e-9;
        const double window_end = window_origin_s +
                                  static_cast<double>(window.size()) / kSampleRate;
        const double now = window_end;

        Hypothesis h;
        h.decode_step = decode_step;
        for (const auto& w : trace_.words) {
            if (w.start_s < window_origin_s - kEps) {
                continue;
            }
            if (w.end_s > window_end + kEps) {
                break;  // ordered words: nothing later fits either
            }
            const bool stable = w.stabilize_s <= now + kEps;
            std::string text = stable ? w.text : corrupt_word(w.text, decode_step);
            h.words.push_back(WordRecord{std::move(text), w.start_s - window_origin_s,
                                         w.end_s - window_origin_s, h.words.size()});
        }
        h.no_speech_prob = h.words.empty() ? 1.0 : 0.02;
        for (const auto& span : trace_.lang) {
            if (now >= span.t0 && now < span.t1) {
                h.language = span.tag;
            }
        }
        std::string raw;
        for (const auto& w : h.words) {
            if (!raw.empty()) {
                raw += ' ';
            }
            raw += w.text;
        }
        h.raw_text = std::move(raw);
        return h;
    }

    const SyntheticTrace& trace() const { return trace_; }

private:
    SyntheticTrace trace_;
};

}  // namespace streamtext
