// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace streamtext {

inline std::vector<std::string> default_annotation_patterns() {
    return {
        R"(^\[.*\]$)",      // [music], [applause]
        R"(^\(.*\)$)",      // (laughs)
        R"(^\{.*\}$)",      // {noise}
        R"(^\*\*.*\*\*$)",  // **cough**
    };
}

// All engine tunables, loadable from a flat JSON file where every field is
// optional and falls back to the defaults below.
struct EngineConfig {
    double delta_s = 1.0;        // decode scheduling interval
    double buffer_cap_s = 30.0;  // active audio window cap
    double alpha = 0.6;          // per-word similarity acceptance
    double theta = 0.5;          // prefix stabilization threshold
    std::size_t l1_chars = 20;   // fast-path minimum prefix length
    std::size_t l2_chars = 17;   // staged-path minimum prefix length
    double tau_s = 10.0;         // stable-buffer finalization timeout
    double epsilon_s = 0.0;      // overlap tail kept behind the slice point

    double gamma_ann = 0.6;         // annotation-ratio rejection threshold
    double gamma_ns = 0.9;          // no-speech probability rejection threshold
    int r_max = 5;                  // consecutive rejections before a volatile reset
    int language_persistence = 3;   // consecutive mismatches declaring a language switch
    double energy_threshold = 0.005;  // chunk RMS gate; <= 0 disables
    std::vector<std::string> annotation_patterns = default_annotation_patterns();

    void validate() const {
        if (!(delta_s > 0.0)) throw std::invalid_argument("delta_s must be > 0");
        if (!(buffer_cap_s > 0.0)) throw std::invalid_argument("buffer_cap_s must be > 0");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
        if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in (0, 1]");
        if (l2_chars > l1_chars) throw std::invalid_argument("l2_chars must not exceed l1_chars");
        if (!(tau_s > 0.0)) throw std::invalid_argument("tau_s must be > 0");
        if (epsilon_s < 0.0 || epsilon_s > 0.2) throw std::invalid_argument("epsilon_s must be in [0, 0.2]");
        if (gamma_ann < 0.5 || gamma_ann > 0.8) throw std::invalid_argument("gamma_ann must be in [0.5, 0.8]");
        if (gamma_ns < 0.0 || gamma_ns > 1.0) throw std::invalid_argument("gamma_ns must be in [0, 1]");
        if (r_max < 0) throw std::invalid_argument("r_max must be >= 0");
        if (language_persistence < 1) throw std::invalid_argument("language_persistence must be >= 1");
    }
};

inline EngineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    EngineConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "delta_s") cfg.delta_s = value.get<double>();
            else if (key == "buffer_cap_s") cfg.buffer_cap_s = value.get<double>();
            else if (key == "alpha") cfg.alpha = value.get<double>();
            else if (key == "theta") cfg.theta = value.get<double>();
            else if (key == "l1_chars") cfg.l1_chars = value.get<std::size_t>();
            else if (key == "l2_chars") cfg.l2_chars = value.get<std::size_t>();
            else if (key == "tau_s") cfg.tau_s = value.get<double>();
            else if (key == "epsilon_s") cfg.epsilon_s = value.get<double>();
            else if (key == "gamma_ann") cfg.gamma_ann = value.get<double>();
            else if (key == "gamma_ns") cfg.gamma_ns = value.get<double>();
            else if (key == "r_max") cfg.r_max = value.get<int>();
            else if (key == "language_persistence") cfg.language_persistence = value.get<int>();
            else if (key == "energy_threshold") cfg.energy_threshold = value.get<double>();
            else if (key == "annotation_patterns") cfg.annotation_patterns = value.get<std::vector<std::string>>();
            else throw std::invalid_argument("unknown config field: " + key);
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument("config field has wrong type: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

inline EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed config JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

}  // namespace streamtext
