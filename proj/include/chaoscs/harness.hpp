// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: resolves configuration (flags > JSON config file >
// CHAOS_CS_SEED > defaults), runs one experiment, and writes a result CSV
// plus a sibling `<out>.manifest.json`.

#ifndef CHAOSCS_HARNESS_HPP
#define CHAOSCS_HARNESS_HPP

#include "chaoscs/core.hpp"
#include "chaoscs/sequence.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chaoscs::harness {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Bad flags, bad config values, missing required fields. Maps to exit 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// --help / --version; what() holds the text to print. Maps to exit 0.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

/// A key given both on the command line and in the config file.
struct Override {
  std::string key;
  std::string flag_value;
  std::string file_value;
};

struct ExperimentConfig {
  std::string command;

  std::optional<Eigen::Index> n;
  std::optional<Eigen::Index> m;
  std::vector<int> ks;
  std::vector<SequenceSpec> ensembles;  // one entry except for `compare`
  int trials = 500;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  std::string seed_source = "default";
  int jobs = 1;
  bool center = false;
  std::string out;

  // Source statistics (autocorr, pdf, generate).
  std::size_t samples = 100000;
  std::size_t length = 0;
  int max_lag = 20;
  int bins = 50;
  bool centered = false;

  double threshold = 0.1;
  double gap_tol = 1e-3;
  int max_iters = 50;

  std::map<std::string, std::string> resolved;  // every key with its final text value
  std::vector<Override> overrides;
  std::optional<std::string> config_file;
};

/// "1:2:29" -> 1,3,...,29; "5,10,15" -> 5,10,15; "7" -> 7.
std::vector<int> parse_k_list(std::string_view text);

/// Parses argv (without the program name). Throws UsageError naming the
/// offending field.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Full entry point. Returns an ExitCode; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaoscs::harness

#endif  // CHAOSCS_HARNESS_HPP
