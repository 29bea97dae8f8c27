#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "subergo/config.hpp"

namespace subergo::runner {

// Exit statuses reported by run(): verdicts, not crashes. Config problems
// surface as cfg::ConfigError and map to kExitConfig at the CLI boundary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRefused = 2;        // contradiction / refused / not certified
inline constexpr int kExitInconclusive = 3;   // measurement too noisy to decide

struct ResultBundle {
  nlohmann::json metadata;  // version, rng id, seed, model, action
  nlohmann::json summary;   // verdicts and headline numbers, includes exit_status
  std::map<std::string, std::string> tables;  // file name -> csv / json bytes
  std::string gnuplot;                        // plot script, empty when no series
  int exit_status = kExitOk;
};

// Dispatches the configured model x action pair. Deterministic for a fixed
// config: reruns produce byte-identical bundles.
ResultBundle run(const cfg::ExperimentConfig& config);

// Writes config.json, metadata.json, summary.json, every table, and plot.gp
// (unless output.gnuplot = false) under dir, creating it if needed.
void write_bundle(const ResultBundle& bundle, const cfg::ExperimentConfig& config,
                  const std::string& dir);

}  // namespace subergo::runner
