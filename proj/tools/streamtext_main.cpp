// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: deterministic trace generation, replay through the
// consensus engine or the overlap-chunking baseline, paired comparisons, and
// event-log aggregation into session reports.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamtext/baseline.hpp"
#include "streamtext/config.hpp"
#include "streamtext/engine.hpp"
#include "streamtext/events.hpp"
#include "streamtext/metrics.hpp"
#include "streamtext/trace.hpp"
#include "streamtext/wav.hpp"

namespace {

using namespace streamtext;

EngineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) {
        EngineConfig cfg;
        cfg.validate();
        return cfg;
    }
    return load_config(path);
}

struct ReplayResult {
    std::vector<StreamEvent> events;
    double duration_s = 0.0;
};

// Feeds the trace audio (plus enough trailing silence to drain pending
// content through the timeout or the baseline's silence commit) in fixed
// chunks. With a WAV file the audio comes from disk instead of the
// synthesizer; the trace still scripts the decoder.
ReplayResult replay(const EngineConfig& cfg, const SyntheticTrace& trace,
                    const std::string& system, double chunk_s,
                    const std::optional<std::vector<float>>& wav_samples) {
    const double drain_s = cfg.tau_s + 2.0 * cfg.delta_s + 1.0;
    const double total_s = trace.duration_s() + drain_s;
    auto transcriber = std::make_shared<ScriptedTranscriber>(trace);
    TraceAudioSource audio(trace);

    std::unique_ptr<Engine> engine;
    std::unique_ptr<BaselineEngine> baseline;
    if (system == "engine") {
        engine = std::make_unique<Engine>(cfg, transcriber);
    } else if (system == "baseline") {
        baseline = std::make_unique<BaselineEngine>(cfg, transcriber);
    } else {
        throw std::invalid_argument("unknown system: " + system + " (use engine|baseline)");
    }

    ReplayResult result;
    result.duration_s = total_s;
    double t = 0.0;
    while (t < total_s) {
        const double t1 = std::min(t + chunk_s, total_s);
        std::vector<float> chunk;
        if (wav_samples.has_value()) {
            const auto first = static_cast<std::size_t>(std::llround(t * kSampleRate));
            const auto last = static_cast<std::size_t>(std::llround(t1 * kSampleRate));
            for (std::size_t i = first; i < last; ++i) {
                chunk.push_back(i < wav_samples->size() ? (*wav_samples)[i] : 0.0f);
            }
        } else {
            chunk = audio.render(t, t1);
        }
        const auto events = engine ? engine->step(chunk, t1) : baseline->step(chunk, t1);
        result.events.insert(result.events.end(), events.begin(), events.end());
        t = t1;
    }
    return result;
}

void write_events_file(const std::string& path, const std::vector<StreamEvent>& events) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    write_events_jsonl(out, events);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << j.dump(2) << '\n';
}

int cmd_gen_trace(const std::string& out_path, std::uint64_t seed, double duration,
                  double speech_rate, double noise, double pause_min, double pause_max) {
    TraceGenOptions opt;
    opt.seed = seed;
    opt.duration_s = duration;
    opt.words_per_minute = speech_rate;
    opt.noise_max_delay_s = noise;
    opt.pause_min_s = pause_min;
    opt.pause_max_s = pause_max;
    const SyntheticTrace trace = generate_trace(opt);
    if (out_path.empty() || out_path == "-") {
        save_trace(std::cout, trace);
    } else {
        save_trace(out_path, trace);
    }
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& trace_path,
            const std::string& out_path, const std::string& system, double chunk_s,
            const std::string& wav_path) {
    const EngineConfig cfg = load_config_or_default(config_path);
    const SyntheticTrace trace = load_trace_file(trace_path);
    std::optional<std::vector<float>> wav;
    if (!wav_path.empty()) {
        wav = read_wav_mono16k(wav_path);
    }
    const ReplayResult result = replay(cfg, trace, system, chunk_s, wav);
    write_events_file(out_path, result.events);
    std::cerr << "wrote " << result.events.size() << " events to " << out_path << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& trace_path,
                const std::string& out_path, double chunk_s,
                const std::string& engine_events_path,
                const std::string& baseline_events_path) {
    const EngineConfig cfg = load_config_or_default(config_path);
    const SyntheticTrace trace = load_trace_file(trace_path);
    const auto reference = trace.ground_truth();

    const ReplayResult engine_run = replay(cfg, trace, "engine", chunk_s, std::nullopt);
    const ReplayResult baseline_run = replay(cfg, trace, "baseline", chunk_s, std::nullopt);
    if (!engine_events_path.empty()) {
        write_events_file(engine_events_path, engine_run.events);
    }
    if (!baseline_events_path.empty()) {
        write_events_file(baseline_events_path, baseline_run.events);
    }

    nlohmann::json j;
    j["engine"] = session_report_to_json(
        build_session_report(engine_run.events, reference, engine_run.duration_s));
    j["baseline"] = session_report_to_json(
        build_session_report(baseline_run.events, reference, baseline_run.duration_s));
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(out_path, j);
    }
    return 0;
}

int cmd_report(const std::string& events_path, const std::string& trace_path,
               const std::string& out_path, double warmup_s) {
    std::ifstream in(events_path);
    if (!in) {
        throw std::runtime_error("cannot open events file: " + events_path);
    }
    const std::vector<StreamEvent> events = read_events_jsonl(in);

    std::vector<std::string> reference;
    if (!trace_path.empty()) {
        reference = load_trace_file(trace_path).ground_truth();
    }
    double duration = 0.0;
    for (const auto& e : events) {
        duration = std::max(duration, e.time_s);
    }
    const SessionReport report =
        build_session_report(events, reference, duration, CostModel{}, warmup_s);
    const nlohmann::json j = session_report_to_json(report);
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(out_path, j);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming transcription consensus harness"};
    app.require_subcommand(1);

    // gen-trace
    std::string gen_out;
    std::uint64_t gen_seed = 1;
    double gen_duration = 60.0;
    double gen_rate = 150.0;
    double gen_noise = 0.0;
    double gen_pause_min = 0.9;
    double gen_pause_max = 1.4;
    auto* gen = app.add_subcommand("gen-trace", "Generate a deterministic synthetic trace");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--duration", gen_duration, "Speech timeline length, seconds");
    gen->add_option("--speech-rate", gen_rate, "Words per minute");
    gen->add_option("--noise", gen_noise, "Max stabilization delay, seconds (0 = convergent)");
    gen->add_option("--pause-min", gen_pause_min, "Min inter-sentence pause, seconds");
    gen->add_option("--pause-max", gen_pause_max, "Max inter-sentence pause, seconds");
    gen->add_option("--out", gen_out, "Output trace file (JSON lines); '-' for stdout");

    // run
    std::string run_config, run_trace, run_out, run_wav;
    std::string run_system = "engine";
    double run_chunk = 0.1;
    auto* run = app.add_subcommand("run", "Replay one system over a trace, emitting events");
    run->add_option("--config", run_config, "Engine config JSON (defaults when omitted)");
    run->add_option("--trace", run_trace, "Trace file")->required();
    run->add_option("--out", run_out, "Output events file (JSON lines)")->required();
    run->add_option("--system", run_system, "engine | baseline");
    run->add_option("--chunk-s", run_chunk, "Audio chunk size, seconds");
    run->add_option("--wav", run_wav, "Stream audio from a 16-bit PCM mono 16 kHz WAV instead");

    // compare
    std::string cmp_config, cmp_trace, cmp_out, cmp_engine_events, cmp_baseline_events;
    double cmp_chunk = 0.1;
    auto* cmp = app.add_subcommand("compare",
                                   "Run engine and baseline on one trace, emit paired reports");
    cmp->add_option("--config", cmp_config, "Engine config JSON (defaults when omitted)");
    cmp->add_option("--trace", cmp_trace, "Trace file")->required();
    cmp->add_option("--out", cmp_out, "Paired report JSON; '-' for stdout");
    cmp->add_option("--chunk-s", cmp_chunk, "Audio chunk size, seconds");
    cmp->add_option("--engine-events", cmp_engine_events, "Also dump engine events here");
    cmp->add_option("--baseline-events", cmp_baseline_events, "Also dump baseline events here");

    // report
    std::string rep_events, rep_trace, rep_out;
    double rep_warmup = 60.0;
    auto* rep = app.add_subcommand("report", "Aggregate an event log into a session report");
    rep->add_option("--events", rep_events, "Events file (JSON lines)")->required();
    rep->add_option("--trace", rep_trace, "Trace file for WER reference (optional)");
    rep->add_option("--out", rep_out, "Report JSON; '-' for stdout");
    rep->add_option("--warmup-s", rep_warmup, "Warmup excluded from the memory slope");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_trace(gen_out, gen_seed, gen_duration, gen_rate, gen_noise,
                                 gen_pause_min, gen_pause_max);
        }
        if (run->parsed()) {
            return cmd_run(run_config, run_trace, run_out, run_system, run_chunk, run_wav);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_config, cmp_trace, cmp_out, cmp_chunk, cmp_engine_events,
                               cmp_baseline_events);
        }
        if (rep->parsed()) {
            return cmd_report(rep_events, rep_trace, rep_out, rep_warmup);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
