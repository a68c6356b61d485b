#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nslwr/analysis.hpp"
#include "nslwr/conditions.hpp"
#include "nslwr/config.hpp"

namespace nslwr {

struct RunResult {
  Trajectory trajectory;
  DiagnosticsReport diagnostics;
  StepSizeReport step_sizes;
  std::optional<WaveMeasurement> wave;
  std::string measure_error;  // set when the requested measurement failed
  std::optional<double> theoretical_speed;
  // Max |a| over the measured vehicles N = measure_first..measure_last,
  // taken from the recorded frames.
  double max_abs_accel_displayed = 0.0;
  // Per-vehicle spacing range over all followers at the final step.
  double terminal_spacing_min = 0.0;
  double terminal_spacing_max = 0.0;

  bool clean() const {
    return diagnostics.collision_events.empty() && diagnostics.negative_speed_events.empty();
  }
};

// Simulates spec.scenario and evaluates it. No file output.
RunResult execute(const RunSpec& spec);

// Header t,vehicle,N,x,v,a; 17 significant digits; a is empty on the final
// frame.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// Flat key=value lines.
std::string summary_text(const RunSpec& spec, const RunResult& result);

// Writes trajectory.csv and summary.txt into out_dir (created if needed).
// Throws std::runtime_error when the directory cannot be written.
void write_run(const std::filesystem::path& out_dir, const RunSpec& spec,
               const RunResult& result);

struct SweepRow {
  double dn = 0.0;
  double dt = 0.0;
  int M = 0;
  std::optional<double> measured_speed;
  std::optional<double> r_squared;
  double max_abs_accel_displayed = 0.0;
  double min_spacing = 0.0;
  std::size_t collision_count = 0;
  std::size_t negative_speed_count = 0;
  // Max |x| difference over the measured vehicles at the previous row's
  // frame times, against this row's trajectory interpolated in time.
  std::optional<double> max_position_gap;
};

// The spec re-run at each dn with dt/dn and the platoon length M dn fixed.
// Entries run concurrently; each writes into out_dir/dn_<i>/ when out_dir
// is nonempty.
std::vector<SweepRow> sweep(const RunSpec& spec, std::span<const double> dn_values,
                            const std::filesystem::path& out_dir = {});

std::string sweep_table(std::span<const SweepRow> rows);

// The spec at a different dn, keeping dt/dn and M dn.
RunSpec rescale(const RunSpec& spec, double dn);

StringStabilitySetup stability_setup(const RunSpec& spec);
std::string stability_text(const StringStabilityResult& result);

}  // namespace nslwr
