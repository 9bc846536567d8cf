#pragma once

// Subcommand implementations behind the apdisc executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apdisc/apgen.hpp"
#include "apdisc/body.hpp"
#include "apdisc/report.hpp"
#include "apdisc/walk.hpp"

namespace apdisc {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2, kExitResource = 3 };

struct Config {
  std::optional<std::vector<Coord>> box;
  std::optional<std::string> polytope;
  std::optional<std::string> shift;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "json";
  std::uint64_t max_sets = kDefaultMaxSets;
  std::uint64_t max_scan = kDefaultMaxScan;
  int brute_max_n = 24;
  /// Largest universe the sweep colors and bounds from below.
  Index color_limit = 1024;
  std::vector<std::string> scales;
  Index shift_grid = 4;
  std::string lemma = "all";
  bool inject_fault = false;
};

/// "16,16" -> {16, 16}; throws UsageError on malformed input.
std::vector<Coord> parse_box(const std::string& text);
RationalVector parse_shift(const std::string& text, int dim);

struct UsageError : Error {
  using Error::Error;
};

Report cmd_bound(const Config& config);
Report cmd_cert(const Config& config);
Report cmd_color(const Config& config);
Report cmd_brute(const Config& config);
Report cmd_lowerbound(const Config& config);
Report cmd_verify(const Config& config);
Report cmd_sweep(const Config& config);

/// Runs a subcommand, writes its report and maps failures to exit codes.
int run_command(const std::string& name, const Config& config, std::ostream& out, std::ostream& err);

}  // namespace apdisc
