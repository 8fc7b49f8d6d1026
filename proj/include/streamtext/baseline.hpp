// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streamtext/audio_buffer.hpp"
#include "streamtext/config.hpp"
#include "streamtext/engine.hpp"
#include "streamtext/events.hpp"
#include "streamtext/hypothesis.hpp"

namespace streamtext {

// Naive overlap-chunking comparator: accumulates audio without any cap,
// re-decodes the whole accumulation every delta_s, and commits the full
// hypothesis only once the energy gate sees enough trailing silence, which
// also ends the segment. Same step/event contract as Engine.
class BaselineEngine {
public:
    static constexpr double kSilenceCommitS = 0.8;

    BaselineEngine(EngineConfig cfg, std::shared_ptr<Transcriber> transcriber)
        : cfg_(std::move(cfg)),
          transcriber_(std::move(transcriber)),
          delta_samples_(static_cast<std::size_t>(cfg_.delta_s * kSampleRate)) {
        cfg_.validate();
    }

    std::vector<StreamEvent> step(std::span<const float> chunk, double stream_time_s) {
        if (stream_time_s <= last_stream_time_s_) {
            throw std::invalid_argument("stream_time must be strictly increasing");
        }
        last_stream_time_s_ = stream_time_s;
        for (float v : chunk) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("audio chunk contains a non-finite sample");
            }
        }

        const double chunk_rms = rms_level(chunk);
        const double chunk_dur = static_cast<double>(chunk.size()) / kSampleRate;
        if (cfg_.energy_threshold > 0.0 && chunk_rms < cfg_.energy_threshold) {
            silence_run_s_ += chunk_dur;
        } else {
            silence_run_s_ = 0.0;
        }

        accum_.insert(accum_.end(), chunk.begin(), chunk.end());
        ingested_ += chunk.size();
        samples_since_decode_ += chunk.size();

        std::vector<StreamEvent> out;
        if (samples_since_decode_ >= delta_samples_) {
            samples_since_decode_ = 0;
            run_decode_cycle(out);
        }
        return out;
    }

    const std::vector<std::string>& committed_texts() const { return committed_texts_; }
    std::size_t accumulated_samples() const { return accum_.size(); }

    std::string full_text() const {
        std::string text;
        for (const auto& t : committed_texts_) {
            if (!text.empty()) {
                text += ' ';
            }
            text += t;
        }
        return text;
    }

private:
    void run_decode_cycle(std::vector<StreamEvent>& out) {
        const double now = static_cast<double>(ingested_) / kSampleRate;
        const double origin = static_cast<double>(segment_origin_samples_) / kSampleRate;
        const double window_s = static_cast<double>(accum_.size()) / kSampleRate;

        ++decode_step_;
        Hypothesis h;
        try {
            h = transcriber_->transcribe(accum_, origin, decode_step_);
        } catch (...) {
            h = Hypothesis{};
        }
        repair_timestamps(h, window_s);

        if (!h.words.empty()) {
            StreamEvent interim;
            interim.type = EventType::kInterim;
            interim.time_s = now;
            interim.segment_id = segment_id_;
            interim.base_word_pos = 0;
            for (const auto& w : h.words) {
                interim.words.push_back(normalize_word(w.text));
            }
            out.push_back(std::move(interim));
        }

        StreamEvent decode_ev;
        decode_ev.type = EventType::kDecode;
        decode_ev.time_s = now;
        decode_ev.segment_id = segment_id_;
        decode_ev.buffer_samples = accum_.size();
        decode_ev.window_s = window_s;
        out.push_back(std::move(decode_ev));

        if (silence_run_s_ >= kSilenceCommitS) {
            if (!h.words.empty()) {
                std::string text;
                std::vector<double> ends;
                ends.reserve(h.words.size());
                for (const auto& w : h.words) {
                    if (!text.empty()) {
                        text += ' ';
                    }
                    text += w.text;
                    ends.push_back(origin + w.end_s);
                }
                StreamEvent ev;
                ev.type = EventType::kCommit;
                ev.time_s = now;
                ev.segment_id = segment_id_;
                ev.text = text;
                ev.word_end_s = ends.back();
                ev.word_ends_s = std::move(ends);
                ev.tier = 0;
                ev.reason = "vad";
                out.push_back(std::move(ev));

                committed_texts_.push_back(text);
                ++segment_id_;
            }
            // Segment boundary: drop the accumulated audio either way.
            accum_.clear();
            segment_origin_samples_ = ingested_;
        }
    }

    EngineConfig cfg_;
    std::shared_ptr<Transcriber> transcriber_;
    std::vector<float> accum_;
    std::vector<std::string> committed_texts_;

    std::size_t delta_samples_;
    std::size_t samples_since_decode_ = 0;
    std::uint64_t ingested_ = 0;
    std::uint64_t segment_origin_samples_ = 0;
    std::uint64_t decode_step_ = 0;
    std::uint64_t segment_id_ = 0;
    double silence_run_s_ = 0.0;
    double last_stream_time_s_ = -1.0;
};

}  // namespace streamtext
