#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ifock/moment_engine.h"

namespace ifock::cli {

enum class Route { Theorem1, Fock, Noise, All };

// A validated run configuration (JSON, "schema": 1).
struct RunConfig {
  PhysParams phys;
  Dispersion dispersion = Dispersion::constant(1.0);
  std::vector<FormFactor> form_factors;
  /// Index into form_factors for each position of epsilon.
  std::vector<std::size_t> factor_of;
  std::optional<EpsilonSeq> epsilon;
  std::vector<double> times;
  std::vector<double> probe_p;
  std::vector<double> lambda_list;
  std::optional<double> omega_probe;
  Route route = Route::Theorem1;
  std::optional<std::string> output;

  /// Correlator at one probe momentum. Throws ConfigError if epsilon, times or
  /// factor assignments are missing or inconsistent.
  CorrelatorSpec correlator(double p) const;
};

/// Parses and validates a config document. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Minimal RFC 4180 writer: fields containing a comma, quote or line break
// are quoted, embedded quotes doubled. Floats use %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

  static std::string quote(const std::string& field);
  static std::string number(double x);

 private:
  std::ostream& out_;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int degenerate = 3;
inline constexpr int quadrature = 4;
}  // namespace exit_code

/// Entry point: `ifock <command> --config <path> [--epsilon ...] [--out <path>]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ifock::cli
