#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nslwr/engine.hpp"
#include "nslwr/fundamental.hpp"

namespace nslwr {

enum class Measure { None, Shock, Startup };

std::string to_string(Measure measure);

// Parameters of a string-stability experiment; see StringStabilitySetup.
struct StabilitySpec {
  double s0 = 14.0;
  double amplitude = 0.1;
  double omega = 0.1;
  int vehicles = 10;
  double dn = 1.0;
  double dt = 0.1;
  double duration = 2000.0;
  double transient_fraction = 0.2;

  friend bool operator==(const StabilitySpec&, const StabilitySpec&) = default;
};

struct RunSpec {
  FundamentalDiagram fd{Greenshields{}};
  // Absent for configs that only describe a stability experiment.
  std::optional<Scenario> scenario;
  Model model = NonstandardLwr{};
  Scheme scheme = Scheme::AnisotropicSymplectic;
  std::string output_dir = "out";
  std::vector<double> sweep;  // dn values, dt/dn held fixed
  int record_stride = 1;
  Measure measure = Measure::None;
  int measure_first = 1;  // whole vehicle numbers N
  int measure_last = 5;
  std::optional<double> startup_threshold;
  std::optional<StabilitySpec> stability;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

// Parses INI-style text:
//
//   template = greenshields-shock-a   (optional, before any section)
//   [fd]        type, V, K | S, W, l, T_rel, c1..c4, clamp
//   [scenario]  k1 | k1_over_K, lead_speed | lead_speed_over_V, initial_speed,
//               M | vehicles, dn, dt | dt_ratio, duration
//   [run]       model, correction, T, c0, scheme, output_dir, sweep,
//               record_stride, measure, measure_first, measure_last,
//               startup_threshold
//   [stability] s0, amplitude, omega, vehicles, dn, dt, duration,
//               transient_fraction
//
// A template supplies every key; keys in the text override it. Numbers may
// be written as a/b. Throws ConfigError naming the offending key.
RunSpec load_spec(std::string_view text);

// Canonical text with absolute values only, printed with 17 significant
// digits so that load_spec(serialize(spec)) == spec.
std::string serialize(const RunSpec& spec);

std::vector<std::string> template_names();
// Throws ConfigError for an unknown name.
std::string_view template_text(std::string_view name);

// Shortest text that round-trips the double exactly.
std::string format_double(double value);

}  // namespace nslwr
