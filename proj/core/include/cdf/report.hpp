#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdf/harness.hpp"

namespace cdf {

// Floats in CSV outputs carry 9 significant digits so reruns diff cleanly.
std::string format_g9(double v);

// One row per episode, modes concatenated in the order given.
std::string episodes_csv(const std::vector<const ModeSummary*>& summaries);

// One row per (mode, scenario) with the prediction counts.
std::string confusion_csv(const std::vector<const ModeSummary*>& summaries);

struct PairedComparison {
  int episodes = 0;
  int cutoffs = 0;
  int cdf_avoided = 0;
  int reactive_avoided = 0;
  int both_avoided = 0;
  int cdf_only = 0;
  int reactive_only = 0;
  int neither = 0;
};

// Per-seed deltas between two runs over the same seeds; meaningful only for
// paired-seed experiments.
PairedComparison pair_modes(const ModeSummary& cdf, const ModeSummary& reactive);

std::string summary_json(const std::vector<const ModeSummary*>& summaries,
                         const std::optional<PairedComparison>& paired);

std::string manifest_json(const Config& cfg, const std::vector<std::string>& modes,
                          const std::string& out_dir,
                          const std::vector<std::string>& outputs,
                          const std::string& created_utc,
                          const std::optional<std::string>& finished_utc);

std::string trace_csv(const EpisodeResult& episode);

std::string utc_timestamp();

}  // namespace cdf
