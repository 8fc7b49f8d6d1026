// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streamtext/audio_buffer.hpp"
#include "streamtext/commit_policy.hpp"
#include "streamtext/config.hpp"
#include "streamtext/events.hpp"
#include "streamtext/hypothesis.hpp"
#include "streamtext/rejection.hpp"

namespace streamtext {

// Decoder plug-in. `window` is the active-buffer snapshot (mono 16 kHz);
// `window_origin_s` is the global stream time of its first sample and exists
// so deterministic scripted decoders can locate the window in the session.
// Word timestamps in the result are window-relative. Results are matched to
// their decode_step; a result reporting an older step is dropped as stale.
class Transcriber {
public:
    virtual ~Transcriber() = default;
    virtual Hypothesis transcribe(std::span<const float> window, double window_origin_s,
                                  std::uint64_t decode_step) = 0;
};

struct CommittedWord {
    std::string text;  // surface form as committed
    std::string norm;
};

struct CommitLogEntry {
    std::string text;
    double word_end_stream_time_s = 0.0;
    double commit_stream_time_s = 0.0;
    int tier = 0;
    std::uint64_t segment_id = 0;
};

struct FinalSegment {
    std::uint64_t id = 0;
    std::string text;
    double finalized_at_s = 0.0;
    std::string reason;  // timeout | language
};

// The committed-text side of the dual-buffer design: the current segment's
// immutable word sequence, the append-only commit log, and finalized
// segments. Segment words reset when a segment closes; the log and the
// finalized list never shrink.
class CommittedTranscript {
public:
    void append_commit(std::span<const WordRecord> prefix, const std::string& text,
                       double word_end_s, double commit_s, int tier) {
        for (const auto& w : prefix) {
            segment_words_.push_back(CommittedWord{w.text, normalize_word(w.text)});
        }
        log_.push_back(CommitLogEntry{text, word_end_s, commit_s, tier, segment_id_});
        last_commit_time_s_ = commit_s;
    }

    void close_segment(const std::string& text, double now_s, const std::string& reason) {
        segments_.push_back(FinalSegment{segment_id_, text, now_s, reason});
        segment_words_.clear();
        ++segment_id_;
        last_commit_time_s_ = now_s;
    }

    void touch(double now_s) { last_commit_time_s_ = now_s; }

    bool segment_empty() const { return segment_words_.empty(); }
    std::size_t segment_word_count() const { return segment_words_.size(); }
    const std::vector<CommittedWord>& segment_words() const { return segment_words_; }

    std::vector<std::string> segment_norm_words() const {
        std::vector<std::string> out;
        out.reserve(segment_words_.size());
        for (const auto& w : segment_words_) {
            out.push_back(w.norm);
        }
        return out;
    }

    std::string segment_text() const {
        std::string out;
        for (const auto& w : segment_words_) {
            if (!out.empty()) {
                out += ' ';
            }
            out += w.text;
        }
        return out;
    }

    double last_commit_time_s() const { return last_commit_time_s_; }
    std::uint64_t segment_id() const { return segment_id_; }
    const std::vector<CommitLogEntry>& commit_log() const { return log_; }
    const std::vector<FinalSegment>& segments() const { return segments_; }

    /// All finalized text in stream order, segments joined by single spaces.
    std::string full_text() const {
        std::string out;
        for (const auto& s : segments_) {
            if (!out.empty()) {
                out += ' ';
            }
            out += s.text;
        }
        return out;
    }

private:
    std::vector<CommittedWord> segment_words_;
    std::vector<CommitLogEntry> log_;
    std::vector<FinalSegment> segments_;
    double last_commit_time_s_ = 0.0;
    std::uint64_t segment_id_ = 0;
};

// Uncommitted suffix of a hypothesis relative to the committed words:
// the longest run where the last j committed words equal the first j
// hypothesis words (normalized) is considered covered; the rest is the tail.
// With no overlap the whole hypothesis is the tail.
inline std::vector<std::string> hypothesis_tail_after(std::span<const std::string> committed_norm,
                                                      const Hypothesis& h) {
    const std::vector<std::string> hyp_norm = normalized_words(h);
    std::size_t overlap = 0;
    const std::size_t max_j = std::min(committed_norm.size(), hyp_norm.size());
    for (std::size_t j = max_j; j >= 1; --j) {
        bool match = true;
        for (std::size_t i = 0; i < j; ++i) {
            if (committed_norm[committed_norm.size() - j + i] != hyp_norm[i]) {
                match = false;
                break;
            }
        }
        if (match) {
            overlap = j;
            break;
        }
    }
    std::vector<std::string> tail;
    for (std::size_t i = overlap; i < h.words.size(); ++i) {
        tail.push_back(h.words[i].text);
    }
    return tail;
}

// The streaming consensus engine: bounded audio buffering, scheduled decodes
// through a pluggable transcriber, rejection filtering, two-tier commits with
// timestamp-guided slicing, timeout finalization, and volatile resets.
//
// One logical state machine: callers must serialize step() invocations. The
// decode runs synchronously inside step(); snapshots handed to the
// transcriber are value copies.
class Engine {
public:
    Engine(EngineConfig cfg, std::shared_ptr<Transcriber> transcriber)
        : cfg_(std::move(cfg)),
          transcriber_(std::move(transcriber)),
          buffer_(cfg_.buffer_cap_s),
          filter_(cfg_),
          delta_samples_(static_cast<std::size_t>(cfg_.delta_s * kSampleRate)) {
        cfg_.validate();
    }

    // Feeds one chunk; `stream_time_s` is the stream time at the chunk's end
    // and must be strictly increasing. All internal clocks derive from the
    // ingested sample count, so feeding contiguous audio keeps them equal to
    // the caller's stream time. Returns the events emitted this step.
    std::vector<StreamEvent> step(std::span<const float> chunk, double stream_time_s) {
        if (stream_time_s <= last_stream_time_s_) {
            throw std::invalid_argument("stream_time must be strictly increasing");
        }
        last_stream_time_s_ = stream_time_s;

        buffer_.append(chunk);  // rejects non-finite samples before any state change
        for (float v : chunk) {
            cycle_energy_sum_sq_ += static_cast<double>(v) * static_cast<double>(v);
        }
        cycle_energy_count_ += chunk.size();
        samples_since_decode_ += chunk.size();

        std::vector<StreamEvent> out;
        if (samples_since_decode_ >= delta_samples_) {
            samples_since_decode_ = 0;
            run_decode_cycle(out);
        }
        return out;
    }

    const CommittedTranscript& transcript() const { return transcript_; }
    const ActiveAudioBuffer& buffer() const { return buffer_; }
    const EngineConfig& config() const { return cfg_; }
    const CommitState& commit_state() const { return commit_state_; }
    std::size_t history_depth() const { return history_.size(); }
    int consecutive_rejections() const { return filter_.consecutive_rejections(); }
    double now_s() const { return static_cast<double>(buffer_.ingested_samples()) / kSampleRate; }

private:
    static constexpr std::size_t kHistoryDepth = 3;

    void run_decode_cycle(std::vector<StreamEvent>& out) {
        const double now = now_s();
        const double chunk_rms =
            cycle_energy_count_ > 0 ? std::sqrt(cycle_energy_sum_sq_ /
                                                static_cast<double>(cycle_energy_count_))
                                    : 0.0;
        cycle_energy_sum_sq_ = 0.0;
        cycle_energy_count_ = 0;

        double window_s = 0.0;
        bool hypothesis_rejected = false;
        std::optional<Hypothesis> accepted;

        const bool energy_gated =
            cfg_.energy_threshold > 0.0 && chunk_rms < cfg_.energy_threshold;
        if (!energy_gated) {
            // Decode the active window. The gate below rejects hypotheses;
            // an energy-gated cycle produced no hypothesis and does not feed
            // the rejection counter.
            const std::vector<float> window = buffer_.snapshot();
            window_s = static_cast<double>(window.size()) / kSampleRate;
            ++decode_step_;
            std::optional<Hypothesis> h;
            try {
                h = transcriber_->transcribe(window, buffer_.origin_stream_time_s(),
                                             decode_step_);
            } catch (...) {
                h.reset();  // transcriber failure counts as a rejection
            }
            if (h.has_value() && h->decode_step != decode_step_) {
                h.reset();  // stale result for an older window
            }
            if (!h.has_value()) {
                hypothesis_rejected = true;
            } else {
                repair_timestamps(*h, window_s);
                if (filter_.gate(*h, chunk_rms).accepted()) {
                    accepted = std::move(*h);
                } else {
                    hypothesis_rejected = true;
                }
            }
        }

        bool reset_due = false;
        if (hypothesis_rejected) {
            reset_due = filter_.record(false);
        }

        if (accepted.has_value()) {
            filter_.record(true);
            last_accepted_ = *accepted;
            history_.push_back(*accepted);
            if (history_.size() > kHistoryDepth) {
                history_.pop_front();
            }
            std::size_t committed_now = 0;
            if (history_.size() >= 2) {
                auto [decision, next_state] =
                    evaluate(commit_state_, history_[history_.size() - 2], history_.back(), cfg_);
                if (decision.kind == CommitDecision::Kind::kCommit) {
                    if (commit_and_slice(decision, *accepted, now, out)) {
                        commit_state_ = std::move(next_state);
                        committed_now = decision.prefix.size();
                    }
                    // A failed occurrence resolution downgrades the commit to
                    // a hold and leaves the policy state untouched.
                } else {
                    commit_state_ = std::move(next_state);
                }
            }
            emit_interim(*accepted, committed_now, now, out);
        }

        StreamEvent decode_ev;
        decode_ev.type = EventType::kDecode;
        decode_ev.time_s = now;
        decode_ev.segment_id = transcript_.segment_id();
        decode_ev.buffer_samples = buffer_.size();
        decode_ev.window_s = window_s;
        out.push_back(std::move(decode_ev));

        if (now - transcript_.last_commit_time_s() >= cfg_.tau_s) {
            finalize_timeout(now, out);
        }

        if (reset_due) {
            volatile_reset();
            filter_.reset_counter();
            StreamEvent ev;
            ev.type = EventType::kReset;
            ev.time_s = now;
            ev.segment_id = transcript_.segment_id();
            ev.reason = "rejections";
            out.push_back(std::move(ev));
        }

        if (accepted.has_value() && filter_.language_switch(*accepted)) {
            finalize_language_switch(now, out);
        }
    }

    // Appends the prefix to the committed transcript and trims the audio
    // buffer at the last committed word's end timestamp (minus the overlap
    // tail). Returns false when the occurrence of the boundary word cannot
    // be resolved; nothing changes in that case.
    bool commit_and_slice(const CommitDecision& decision, const Hypothesis& h, double now,
                          std::vector<StreamEvent>& out) {
        const auto& prefix = decision.prefix;
        const WordRecord& boundary = prefix.back();

        std::optional<std::size_t> occurrence;
        if (boundary.index < h.words.size() &&
            normalize_word(h.words[boundary.index].text) == normalize_word(boundary.text)) {
            occurrence = boundary.index;  // index-based resolution, preferred
        } else {
            std::vector<std::string> tail;
            const auto& committed = transcript_.segment_words();
            std::vector<std::string> pool;
            for (const auto& w : committed) {
                pool.push_back(w.text);
            }
            for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
                pool.push_back(prefix[i].text);
            }
            const std::size_t take = std::min<std::size_t>(2, pool.size());
            tail.assign(pool.end() - static_cast<std::ptrdiff_t>(take), pool.end());
            tail.push_back(boundary.text);
            occurrence = disambiguate_occurrence(h, boundary.text, tail);
        }
        if (!occurrence.has_value()) {
            return false;
        }

        const double t_end = h.words[*occurrence].end_s;
        const double origin = buffer_.origin_stream_time_s();
        const double cut_s = std::max(t_end - cfg_.epsilon_s, 0.0);
        // The 1e-6 guard keeps floor() from losing a sample to representation
        // error in the seconds-to-samples conversion.
        buffer_.trim_front(static_cast<std::int64_t>(std::floor(cut_s * kSampleRate + 1e-6)));

        std::string text;
        std::vector<double> word_ends;
        word_ends.reserve(prefix.size());
        for (const auto& w : prefix) {
            if (!text.empty()) {
                text += ' ';
            }
            text += w.text;
            word_ends.push_back(origin + w.end_s);
        }
        const double word_end_global = origin + t_end;

        StreamEvent ev;
        ev.type = EventType::kCommit;
        ev.time_s = now;
        ev.segment_id = transcript_.segment_id();
        ev.text = text;
        ev.word_end_s = word_end_global;
        ev.word_ends_s = std::move(word_ends);
        ev.tier = decision.tier;
        out.push_back(std::move(ev));

        transcript_.append_commit(prefix, text, word_end_global, now, decision.tier);
        history_.clear();  // pre-slice hypotheses carry stale window-relative times
        return true;
    }

    void finalize_timeout(double now, std::vector<StreamEvent>& out) {
        // The tail comes from the latest accepted hypothesis, which may have
        // already left the consensus history (a commit clears it); the
        // normalized-prefix alignment drops whatever of it is already in S.
        std::vector<std::string> tail;
        if (last_accepted_.has_value()) {
            tail = hypothesis_tail_after(transcript_.segment_norm_words(), *last_accepted_);
        }
        std::string text = transcript_.segment_text();
        for (const auto& w : tail) {
            if (!text.empty()) {
                text += ' ';
            }
            text += w;
        }
        if (text.empty()) {
            transcript_.touch(now);  // nothing to emit; restart the timer
            return;
        }

        StreamEvent ev;
        ev.type = EventType::kSegment;
        ev.time_s = now;
        ev.segment_id = transcript_.segment_id();
        ev.text = text;
        ev.reason = "timeout";
        out.push_back(std::move(ev));

        transcript_.close_segment(text, now, "timeout");
        volatile_reset();
    }

    void finalize_language_switch(double now, std::vector<StreamEvent>& out) {
        if (!transcript_.segment_empty()) {
            const std::string text = transcript_.segment_text();
            StreamEvent ev;
            ev.type = EventType::kSegment;
            ev.time_s = now;
            ev.segment_id = transcript_.segment_id();
            ev.text = text;
            ev.reason = "language";
            out.push_back(std::move(ev));
            transcript_.close_segment(text, now, "language");
        } else {
            transcript_.touch(now);
        }
        volatile_reset();
        filter_.reset_counter();

        StreamEvent ev;
        ev.type = EventType::kReset;
        ev.time_s = now;
        ev.segment_id = transcript_.segment_id();
        ev.reason = "language";
        out.push_back(std::move(ev));
    }

    void volatile_reset() {
        buffer_.clear();
        history_.clear();
        last_accepted_.reset();
        commit_state_ = CommitState{};
    }

    void emit_interim(const Hypothesis& h, std::size_t committed_now, double now,
                      std::vector<StreamEvent>& out) {
        if (h.words.size() <= committed_now) {
            return;
        }
        StreamEvent ev;
        ev.type = EventType::kInterim;
        ev.time_s = now;
        ev.segment_id = transcript_.segment_id();
        ev.base_word_pos = transcript_.segment_word_count();
        for (std::size_t i = committed_now; i < h.words.size(); ++i) {
            ev.words.push_back(normalize_word(h.words[i].text));
        }
        out.push_back(std::move(ev));
    }

    EngineConfig cfg_;
    std::shared_ptr<Transcriber> transcriber_;
    ActiveAudioBuffer buffer_;
    RejectionFilter filter_;
    CommittedTranscript transcript_;
    std::deque<Hypothesis> history_;
    std::optional<Hypothesis> last_accepted_;
    CommitState commit_state_;

    std::size_t delta_samples_;
    std::size_t samples_since_decode_ = 0;
    std::uint64_t decode_step_ = 0;
    double last_stream_time_s_ = -1.0;
    double cycle_energy_sum_sq_ = 0.0;
    std::size_t cycle_energy_count_ = 0;
};

}  // namespace streamtext
