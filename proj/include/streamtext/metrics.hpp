// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "streamtext/audio_buffer.hpp"
#include "streamtext/events.hpp"
#include "streamtext/hypothesis.hpp"
#include "streamtext/stability.hpp"

namespace streamtext {

struct LatencySummary {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p90_ms = 0.0;
    double p95_ms = 0.0;
};

namespace detail {

// Nearest-rank percentile on a sorted sample.
inline double percentile(const std::vector<double>& sorted, double p) {
    const auto rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace detail

inline LatencySummary summarize_latencies_ms(std::vector<double> latencies_ms) {
    LatencySummary s;
    s.count = latencies_ms.size();
    if (latencies_ms.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : latencies_ms) {
        sum += v;
    }
    std::sort(latencies_ms.begin(), latencies_ms.end());
    s.mean_ms = sum / static_cast<double>(latencies_ms.size());
    s.median_ms = detail::percentile(latencies_ms, 50.0);
    s.p90_ms = detail::percentile(latencies_ms, 90.0);
    s.p95_ms = detail::percentile(latencies_ms, 95.0);
    return s;
}

// End-to-commit latency: stream-time gap between a word's acoustic end and
// the commit that finalized it. Commit events carrying per-word end times
// contribute one latency per committed word; events without them contribute
// the last word's latency only. A negative gap means corrupt event data.
inline LatencySummary end_to_commit_latency(std::span<const StreamEvent> events) {
    std::vector<double> latencies_ms;
    for (const auto& e : events) {
        if (e.type != EventType::kCommit) {
            continue;
        }
        auto push = [&](double word_end) {
            const double lat = e.time_s - word_end;
            if (lat < -1e-9) {
                throw std::runtime_error("negative end-to-commit latency in event log");
            }
            latencies_ms.push_back(std::max(lat, 0.0) * 1000.0);
        };
        if (!e.word_ends_s.empty()) {
            for (double we : e.word_ends_s) {
                push(we);
            }
        } else {
            push(e.word_end_s);
        }
    }
    return summarize_latencies_ms(std::move(latencies_ms));
}

/// Word error rate: word-level edit distance over the reference length.
inline double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
    if (reference.empty()) {
        throw std::invalid_argument("WER is undefined for an empty reference");
    }
    return static_cast<double>(levenshtein(reference, hypothesis)) /
           static_cast<double>(reference.size());
}

struct StabilityStats {
    double stability_index = 1.0;
    double revision_rate = 0.0;
    double revisions_per_minute = 0.0;
    std::size_t interim_words = 0;
};

// Stability over interim displays: an interim word instance survives when the
// same normalized word sits at the same position of its segment's final text.
// Finals come from segment events, or from concatenated commit texts for
// segments that only ever commit (the baseline). Interim words of segments
// with no final text are not counted. An empty log is perfectly stable.
inline StabilityStats stability_stats(std::span<const StreamEvent> events, double duration_s) {
    std::map<std::uint64_t, std::vector<std::string>> finals;
    std::map<std::uint64_t, std::vector<std::string>> commit_words;
    for (const auto& e : events) {
        if (e.type == EventType::kCommit) {
            std::string word;
            for (char c : e.text + " ") {
                if (c == ' ') {
                    if (!word.empty()) {
                        commit_words[e.segment_id].push_back(normalize_word(word));
                    }
                    word.clear();
                } else {
                    word += c;
                }
            }
        } else if (e.type == EventType::kSegment) {
            std::string word;
            for (char c : e.text + " ") {
                if (c == ' ') {
                    if (!word.empty()) {
                        finals[e.segment_id].push_back(normalize_word(word));
                    }
                    word.clear();
                } else {
                    word += c;
                }
            }
        }
    }
    for (auto& [seg, words] : commit_words) {
        if (!finals.contains(seg)) {
            finals[seg] = words;
        }
    }

    std::size_t total = 0;
    std::size_t survived = 0;
    for (const auto& e : events) {
        if (e.type != EventType::kInterim) {
            continue;
        }
        auto it = finals.find(e.segment_id);
        if (it == finals.end()) {
            continue;
        }
        const auto& final_words = it->second;
        for (std::size_t i = 0; i < e.words.size(); ++i) {
            const std::size_t pos = e.base_word_pos + i;
            ++total;
            if (pos < final_words.size() && final_words[pos] == e.words[i]) {
                ++survived;
            }
        }
    }

    StabilityStats s;
    s.interim_words = total;
    if (total > 0) {
        s.stability_index = static_cast<double>(survived) / static_cast<double>(total);
    }
    s.revision_rate = 1.0 - s.stability_index;
    if (duration_s > 0.0) {
        s.revisions_per_minute =
            static_cast<double>(total - survived) / (duration_s / 60.0);
    }
    return s;
}

/// Least-squares slope over points with time >= warmup_s; needs two of them.
inline double least_squares_slope(std::span<const std::pair<double, double>> series,
                                  double warmup_s) {
    double n = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [t, y] : series) {
        if (t < warmup_s) {
            continue;
        }
        n += 1.0;
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2.0 || std::abs(denom) < 1e-30) {
        throw std::invalid_argument("slope needs at least two post-warmup points");
    }
    return (n * sxy - sx * sy) / denom;
}

struct PolyFit {
    std::vector<double> coeffs;  // lowest order first
    double r_squared = 0.0;
};

namespace detail {

// Ordinary least squares for a low-degree polynomial via normal equations.
inline PolyFit polyfit(std::span<const std::pair<double, double>> pts, int degree) {
    const int k = degree + 1;
    if (static_cast<int>(pts.size()) < k) {
        throw std::invalid_argument("not enough points for the polynomial fit");
    }
    std::vector<double> moments(2 * degree + 1, 0.0);
    std::vector<double> rhs(k, 0.0);
    for (const auto& [x, y] : pts) {
        double xp = 1.0;
        for (int i = 0; i <= 2 * degree; ++i) {
            moments[i] += xp;
            if (i < k) {
                rhs[i] += xp * y;
            }
            xp *= x;
        }
    }
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            a[r][c] = moments[r + c];
        }
        a[r][k] = rhs[r];
    }
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-30) {
            throw std::runtime_error("degenerate polynomial fit");
        }
        for (int r = 0; r < k; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= k; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    PolyFit fit;
    fit.coeffs.resize(k);
    for (int i = 0; i < k; ++i) {
        fit.coeffs[i] = a[i][k] / a[i][i];
    }

    double mean_y = 0.0;
    for (const auto& [x, y] : pts) {
        mean_y += y;
    }
    mean_y /= static_cast<double>(pts.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (const auto& [x, y] : pts) {
        double pred = 0.0;
        double xp = 1.0;
        for (int i = 0; i < k; ++i) {
            pred += fit.coeffs[i] * xp;
            xp *= x;
        }
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

}  // namespace detail

inline PolyFit fit_linear(std::span<const std::pair<double, double>> pts) {
    return detail::polyfit(pts, 1);
}
inline PolyFit fit_quadratic(std::span<const std::pair<double, double>> pts) {
    return detail::polyfit(pts, 2);
}

// Per-decode simulated compute cost, linear in the decoded window duration.
struct CostModel {
    double c0 = 0.05;  // fixed cost per decode, cost-units
    double c1 = 0.1;   // cost-units per second of window
    double cost(double window_s) const { return c0 + c1 * window_s; }
};

/// Resource efficiency index: 1 / (M_peak * U_avg * L_avg); factors must be > 0.
inline double rei(double m_peak, double u_avg, double l_avg) {
    if (!(m_peak > 0.0) || !(u_avg > 0.0) || !(l_avg > 0.0)) {
        throw std::invalid_argument("REI factors must all be positive");
    }
    return 1.0 / (m_peak * u_avg * l_avg);
}

struct SessionReport {
    LatencySummary latency;
    StabilityStats stability;
    std::optional<double> wer_value;
    std::size_t peak_window_samples = 0;
    double avg_cost_units_per_s = 0.0;
    std::optional<double> memory_growth_slope;  // samples per second
    std::optional<double> rei_value;
    std::size_t commits = 0;
    std::size_t segments = 0;
    std::size_t resets = 0;
    double duration_s = 0.0;
};

// Aggregates one event log into a report. `reference` (when given) is the
// ground-truth word sequence; the hypothesis side is the normalized
// concatenation of all final texts. Memory slope falls back to a zero warmup
// when the session is too short for the requested one.
inline SessionReport build_session_report(std::span<const StreamEvent> events,
                                          std::span<const std::string> reference,
                                          double duration_s,
                                          const CostModel& cost_model = {},
                                          double warmup_s = 60.0) {
    SessionReport report;
    report.duration_s = duration_s;
    report.latency = end_to_commit_latency(events);
    report.stability = stability_stats(events, duration_s);

    std::vector<std::pair<double, double>> memory_series;
    double total_cost = 0.0;
    for (const auto& e : events) {
        switch (e.type) {
            case EventType::kDecode: {
                memory_series.emplace_back(e.time_s, static_cast<double>(e.buffer_samples));
                if (e.window_s > 0.0) {
                    total_cost += cost_model.cost(e.window_s);
                    const auto window_samples =
                        static_cast<std::size_t>(std::llround(e.window_s * kSampleRate));
                    report.peak_window_samples =
                        std::max(report.peak_window_samples, window_samples);
                }
                break;
            }
            case EventType::kCommit: ++report.commits; break;
            case EventType::kSegment: ++report.segments; break;
            case EventType::kReset: ++report.resets; break;
            default: break;
        }
    }
    if (duration_s > 0.0) {
        report.avg_cost_units_per_s = total_cost / duration_s;
    }
    try {
        report.memory_growth_slope = least_squares_slope(memory_series, warmup_s);
    } catch (const std::invalid_argument&) {
        try {
            report.memory_growth_slope = least_squares_slope(memory_series, 0.0);
        } catch (const std::invalid_argument&) {
            report.memory_growth_slope = std::nullopt;
        }
    }

    if (!reference.empty()) {
        std::map<std::uint64_t, std::string> finals;
        std::map<std::uint64_t, std::string> commit_concat;
        for (const auto& e : events) {
            if (e.type == EventType::kSegment) {
                finals[e.segment_id] = e.text;
            } else if (e.type == EventType::kCommit) {
                auto& acc = commit_concat[e.segment_id];
                if (!acc.empty()) {
                    acc += ' ';
                }
                acc += e.text;
            }
        }
        for (const auto& [seg, text] : commit_concat) {
            if (!finals.contains(seg)) {
                finals[seg] = text;
            }
        }
        std::vector<std::string> hyp_words;
        for (const auto& [seg, text] : finals) {
            std::string word;
            for (char c : text + " ") {
                if (c == ' ') {
                    if (!word.empty()) {
                        hyp_words.push_back(normalize_word(word));
                    }
                    word.clear();
                } else {
                    word += c;
                }
            }
        }
        std::vector<std::string> ref_words;
        ref_words.reserve(reference.size());
        for (const auto& w : reference) {
            ref_words.push_back(normalize_word(w));
        }
        report.wer_value = wer(ref_words, hyp_words);
    }

    const double mean_latency_s = report.latency.mean_ms / 1000.0;
    if (report.peak_window_samples > 0 && report.avg_cost_units_per_s > 0.0 &&
        mean_latency_s > 0.0) {
        report.rei_value = rei(static_cast<double>(report.peak_window_samples),
                               report.avg_cost_units_per_s, mean_latency_s);
    }
    return report;
}

inline nlohmann::json session_report_to_json(const SessionReport& r) {
    nlohmann::json j;
    j["latency_ms"] = {
        {"count", r.latency.count},   {"mean", r.latency.mean_ms},
        {"median", r.latency.median_ms}, {"p90", r.latency.p90_ms},
        {"p95", r.latency.p95_ms},
    };
    j["stability_index"] = r.stability.stability_index;
    j["revision_rate"] = r.stability.revision_rate;
    j["revisions_per_minute"] = r.stability.revisions_per_minute;
    j["interim_words"] = r.stability.interim_words;
    j["wer"] = r.wer_value.has_value() ? nlohmann::json(*r.wer_value) : nlohmann::json(nullptr);
    j["peak_window_samples"] = r.peak_window_samples;
    j["avg_cost_units_per_s"] = r.avg_cost_units_per_s;
    j["memory_growth_slope_samples_per_s"] =
        r.memory_growth_slope.has_value() ? nlohmann::json(*r.memory_growth_slope)
                                          : nlohmann::json(nullptr);
    j["rei"] = r.rei_value.has_value() ? nlohmann::json(*r.rei_value) : nlohmann::json(nullptr);
    j["commits"] = r.commits;
    j["segments"] = r.segments;
    j["resets"] = r.resets;
    j["duration_s"] = r.duration_s;
    return j;
}

}  // namespace streamtext
