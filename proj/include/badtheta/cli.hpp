#pragma once

// Subcommand implementations behind the `badtheta` executable. Each returns
// the process exit code and writes human-readable progress to `log`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "badtheta/journal.hpp"
#include "badtheta/sieve.hpp"

namespace badtheta {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitViolation = 2,
  kExitNoSurvivor = 3,
  kExitPrecision = 4,
  kExitConfig = 5,
};

struct RunConfig {
  std::optional<std::string> theta;    // "t1,t2" as p/q or decimal literals
  std::optional<std::string> catalog;  // named entry; exclusive with theta
  std::optional<std::uint64_t> R;
  std::optional<unsigned> depth;
  SurvivorPolicy policy = SurvivorPolicy::Lexicographic;
  std::uint64_t seed = 0;
  std::uint64_t Q = 100000;
  std::optional<std::uint64_t> bound;
  std::string out = ".";
  std::optional<std::string> certificate;
  bool resume = false;
  bool trace = false;
  unsigned threads = 1;

  /// Throws ConfigError when neither or both θ sources are set, or on bad literals.
  ThetaForm resolve_theta() const;
  /// Rejects R < 2, depth < 1, Q < 1, threads < 1.
  void validate() const;
  SieveConfig sieve_config(std::uint64_t default_R, unsigned default_depth) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Inline θ: decimals carry declared_error = 10^-digits, p/q literals are exact.
ThetaForm parse_theta_pair(std::string_view text);

Json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

int cmd_best_approx(const RunConfig& cfg, std::ostream& log);
int cmd_construct(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_crosscheck(const RunConfig& cfg, std::ostream& log);
int cmd_catalog_list(std::ostream& log);

/// Full command-line entry point: parsing, dispatch, exception-to-exit-code mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace badtheta
