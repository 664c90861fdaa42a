#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cdf/config.hpp"
#include "cdf/harness.hpp"

namespace cdf {

// Resolved command-line inputs for `run`. overrides are (key, value) pairs
// applied on top of the config file in order.
struct RunOptions {
  std::optional<std::string> config_path{};
  std::vector<std::pair<std::string, std::string>> overrides{};
  std::string out_dir = "out";
};

// Exit code: 0 success, 1 invalid config or I/O failure, 2 when the fraction
// of anomalous episodes exceeds anomalous_exit_fraction.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct ReplayOptions {
  std::string episodes_csv_path;
  std::uint64_t seed = 0;
  std::optional<std::string> mode{};  // disambiguates when both modes logged the seed
  bool counterfactual = false;
  std::string out_dir = "out";
};

// Re-simulates one logged episode with a full trace. Exit code 0 on success,
// 1 when the seed is not in the log or inputs are invalid.
int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err);

// Default output directory: $CDFSIM_OUT when set, else "out".
std::string default_out_dir();

}  // namespace cdf
