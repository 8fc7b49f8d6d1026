// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace streamtext {

enum class EventType {
    kCommit,   // consensus committed a prefix
    kSegment,  // a segment was finalized (timeout or language switch)
    kReset,    // volatile state was cleared
    kInterim,  // uncommitted words currently on display
    kDecode,   // per-cycle bookkeeping: buffer size and decoded window
};

struct StreamEvent {
    EventType type = EventType::kDecode;
    double time_s = 0.0;  // stream time the event was emitted
    std::uint64_t segment_id = 0;

    // commit / segment
    std::string text;
    double word_end_s = 0.0;             // global end time of the last committed word
    std::vector<double> word_ends_s;     // global end times of every committed word
    int tier = 0;                        // 1 or 2 for engine commits; 0 otherwise
    std::string reason;                  // segment: timeout|language; reset: rejections|language; baseline commit: vad

    // interim
    std::vector<std::string> words;      // normalized displayed words
    std::size_t base_word_pos = 0;       // segment position of words[0]

    // decode
    std::size_t buffer_samples = 0;
    double window_s = 0.0;               // decoded window duration; 0 when gated
};

inline const char* event_type_name(EventType t) {
    switch (t) {
        case EventType::kCommit: return "commit";
        case EventType::kSegment: return "segment";
        case EventType::kReset: return "reset";
        case EventType::kInterim: return "interim";
        case EventType::kDecode: return "decode";
    }
    return "decode";
}

inline nlohmann::json event_to_json(const StreamEvent& e) {
    nlohmann::json j;
    j["type"] = event_type_name(e.type);
    j["commit_stream_time_s"] = e.time_s;
    j["segment_id"] = e.segment_id;
    switch (e.type) {
        case EventType::kCommit:
            j["text"] = e.text;
            j["word_end_stream_time_s"] = e.word_end_s;
            j["word_end_times_s"] = e.word_ends_s;
            if (e.tier > 0) {
                j["tier"] = e.tier;
            } else {
                j["tier"] = e.reason.empty() ? "vad" : e.reason;
            }
            break;
        case EventType::kSegment:
            j["text"] = e.text;
            j["tier"] = e.reason;
            break;
        case EventType::kReset:
            j["reason"] = e.reason;
            break;
        case EventType::kInterim:
            j["base_word_pos"] = e.base_word_pos;
            j["words"] = e.words;
            break;
        case EventType::kDecode:
            j["buffer_samples"] = e.buffer_samples;
            j["window_s"] = e.window_s;
            break;
    }
    return j;
}

inline StreamEvent event_from_json(const nlohmann::json& j) {
    StreamEvent e;
    const std::string type = j.at("type").get<std::string>();
    e.time_s = j.at("commit_stream_time_s").get<double>();
    e.segment_id = j.value("segment_id", std::uint64_t{0});
    if (type == "commit") {
        e.type = EventType::kCommit;
        e.text = j.at("text").get<std::string>();
        e.word_end_s = j.at("word_end_stream_time_s").get<double>();
        if (j.contains("word_end_times_s")) {
            e.word_ends_s = j.at("word_end_times_s").get<std::vector<double>>();
        }
        const auto& tier = j.at("tier");
        if (tier.is_number_integer()) {
            e.tier = tier.get<int>();
        } else {
            e.reason = tier.get<std::string>();
        }
    } else if (type == "segment") {
        e.type = EventType::kSegment;
        e.text = j.at("text").get<std::string>();
        e.reason = j.value("tier", std::string{});
    } else if (type == "reset") {
        e.type = EventType::kReset;
        e.reason = j.value("reason", std::string{});
    } else if (type == "interim") {
        e.type = EventType::kInterim;
        e.base_word_pos = j.value("base_word_pos", std::size_t{0});
        e.words = j.at("words").get<std::vector<std::string>>();
    } else if (type == "decode") {
        e.type = EventType::kDecode;
        e.buffer_samples = j.value("buffer_samples", std::size_t{0});
        e.window_s = j.value("window_s", 0.0);
    } else {
        throw std::invalid_argument("unknown event type: " + type);
    }
    return e;
}

inline void write_events_jsonl(std::ostream& out, const std::vector<StreamEvent>& events) {
    for (const auto& e : events) {
        out << event_to_json(e).dump() << '\n';
    }
}

inline std::vector<StreamEvent> read_events_jsonl(std::istream& in) {
    std::vector<StreamEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            events.push_back(event_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("malformed event at line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    }
    return events;
}

}  // namespace streamtext
