// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace streamtext {

inline constexpr int kSampleRate = 16000;

/// Root-mean-square amplitude of a sample block; 0 for an empty block.
inline double rms_level(std::span<const float> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double sum_sq = 0.0;
    for (float v : samples) {
        sum_sq += static_cast<double>(v) * static_cast<double>(v);
    }
    return std::sqrt(sum_sq / static_cast<double>(samples.size()));
}

// Bounded sliding window of uncommitted audio. Samples are normalized float
// amplitudes in [-1, 1] at a fixed 16 kHz rate. The window holds at most
// capacity_samples(); older audio falls off the front, and
// origin_stream_time_s() tracks the global stream time of the first sample.
// Single-writer: snapshots are value copies that may leave the owning context.
class ActiveAudioBuffer {
public:
    explicit ActiveAudioBuffer(double cap_seconds) {
        if (!(cap_seconds > 0.0)) {
            throw std::invalid_argument("buffer capacity must be positive");
        }
        capacity_ = static_cast<std::size_t>(std::floor(cap_seconds * kSampleRate));
    }

    // Appends a chunk and trims the front so the FIFO cap holds afterwards.
    void append(std::span<const float> chunk) {
        for (float v : chunk) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("audio chunk contains a non-finite sample");
            }
        }
        samples_.insert(samples_.end(), chunk.begin(), chunk.end());
        ingested_ += chunk.size();
        if (samples_.size() > capacity_) {
            drop_front(samples_.size() - capacity_);
        }
    }

    // Removes min(max(n, 0), size()) samples from the front.
    void trim_front(std::int64_t n) {
        if (n <= 0) {
            return;
        }
        drop_front(std::min(static_cast<std::size_t>(n), samples_.size()));
    }

    void clear() { drop_front(samples_.size()); }

    /// Value copy of the current contents; the buffer is unchanged.
    std::vector<float> snapshot() const { return samples_; }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    std::size_t capacity_samples() const { return capacity_; }
    double duration_s() const { return static_cast<double>(samples_.size()) / kSampleRate; }

    // Global stream time of the first buffered sample. With contiguous input
    // this equals dropped-samples / rate; it never decreases.
    double origin_stream_time_s() const {
        return static_cast<double>(dropped_) / kSampleRate;
    }

    std::uint64_t ingested_samples() const { return ingested_; }
    std::uint64_t dropped_samples() const { return dropped_; }

private:
    void drop_front(std::size_t n) {
        samples_.erase(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(n));
        dropped_ += n;
    }

    std::vector<float> samples_;
    std::size_t capacity_ = 0;
    std::uint64_t ingested_ = 0;
    std::uint64_t dropped_ = 0;
};

}  // namespace streamtext
