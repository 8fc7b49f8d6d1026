// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamtext/audio_buffer.hpp"

namespace streamtext {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

// Reads a 16-bit PCM mono 16 kHz RIFF/WAVE file into normalized floats.
// Anything else (other rates, stereo, float/compressed encodings) is rejected.
inline std::vector<float> read_wav_mono16k(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open wav file: " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("not a RIFF/WAVE file: " + path);
    }

    bool have_fmt = false;
    std::size_t data_off = 0;
    std::size_t data_len = 0;
    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + off);
        const std::uint32_t len = detail::read_u32(bytes.data() + off + 4);
        const std::size_t body = off + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (body + 16 > bytes.size()) {
                throw std::runtime_error("truncated fmt chunk: " + path);
            }
            const auto format = detail::read_u16(bytes.data() + body);
            const auto channels = detail::read_u16(bytes.data() + body + 2);
            const auto rate = detail::read_u32(bytes.data() + body + 4);
            const auto bits = detail::read_u16(bytes.data() + body + 14);
            if (format != 1 || channels != 1 || rate != kSampleRate || bits != 16) {
                throw std::runtime_error("wav must be 16-bit PCM mono 16 kHz: " + path);
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = len;
        }
        off = body + len + (len % 2);  // chunks are word-aligned
    }
    if (!have_fmt || data_off == 0) {
        throw std::runtime_error("wav is missing fmt/data chunks: " + path);
    }
    if (data_off + data_len > bytes.size()) {
        data_len = bytes.size() - data_off;
    }

    std::vector<float> samples;
    samples.reserve(data_len / 2);
    for (std::size_t i = 0; i + 1 < data_len; i += 2) {
        const auto u = detail::read_u16(bytes.data() + data_off + i);
        const auto s = static_cast<std::int16_t>(u);
        samples.push_back(static_cast<float>(s) / 32768.0f);
    }
    return samples;
}

/// Writes normalized floats as 16-bit PCM mono 16 kHz.
inline void write_wav_mono16k(const std::string& path, const std::vector<float>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open wav file for writing: " + path);
    }
    auto put_u32 = [&](std::uint32_t v) {
        char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                     static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
        out.write(b, 4);
    };
    auto put_u16 = [&](std::uint16_t v) {
        char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
        out.write(b, 2);
    };
    const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
    out.write("RIFF", 4);
    put_u32(36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(kSampleRate);
    put_u32(kSampleRate * 2);
    put_u16(2);
    put_u16(16);
    out.write("data", 4);
    put_u32(data_len);
    for (float v : samples) {
        const double clamped = std::clamp(static_cast<double>(v), -1.0, 1.0);
        const auto s = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        put_u16(static_cast<std::uint16_t>(s));
    }
}

}  // namespace streamtext
