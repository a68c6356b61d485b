#include "nslwr/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "nslwr/errors.hpp"
#include "nslwr/oracle.hpp"

namespace nslwr {

namespace {

const Scenario& require_scenario(const RunSpec& spec) {
  if (!spec.scenario) throw ConfigError("configuration has no [scenario] section");
  return *spec.scenario;
}

void append17(std::string& out, double value) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  out.append(buf.data(), ptr);
}

std::optional<double> theory_speed(const RunSpec& spec) {
  const Scenario& s = *spec.scenario;
  const FundamentalDiagram& fd = spec.fd;
  if (!check_concave(fd)) return std::nullopt;
  const double k2 = density_for_speed(fd, s.lead_speed);
  const WaveSolution w = riemann_wave(fd, s.k1, k2);
  if (const auto* shock = std::get_if<Shock>(&w.kind)) return shock->speed;
  if (const auto* fan = std::get_if<Rarefaction>(&w.kind)) {
    // The startup front is the upstream edge of the fan.
    return spec.measure == Measure::Startup ? fan->lo : fan->hi;
  }
  return std::nullopt;
}

// Linear interpolation of x(t) for slot m; t inside the trajectory's span.
double position_at(const Trajectory& traj, int m, double t) {
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
  if (it == traj.times.begin()) return traj.positions.front()[m];
  if (it == traj.times.end()) return traj.positions.back()[m];
  const std::size_t j = static_cast<std::size_t>(it - traj.times.begin());
  const double t0 = traj.times[j - 1];
  const double t1 = traj.times[j];
  const double f = (t - t0) / (t1 - t0);
  return traj.positions[j - 1][m] + f * (traj.positions[j][m] - traj.positions[j - 1][m]);
}

}  // namespace

RunResult execute(const RunSpec& spec) {
  const Scenario& scenario = require_scenario(spec);
  SimulationOptions options;
  options.record_stride = spec.record_stride;

  RunResult r{simulate(scenario, spec.model, spec.scheme, options), {}, {}, {}, {}, {}};
  const Trajectory& traj = r.trajectory;
  r.diagnostics = diagnose(traj, spec.fd);
  r.step_sizes = validate_step_sizes(spec.fd, scenario.dn, scenario.dt);

  const std::vector<int> shown = displayed_vehicles(traj, spec.measure_first, spec.measure_last);
  for (std::size_t j = 0; j < traj.frames(); ++j) {
    for (int m : shown) {
      const double a = traj.accelerations[j][m];
      if (std::isfinite(a)) r.max_abs_accel_displayed = std::max(r.max_abs_accel_displayed, std::abs(a));
    }
  }

  const auto& last = traj.positions.back();
  r.terminal_spacing_min = std::numeric_limits<double>::infinity();
  r.terminal_spacing_max = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m < last.size(); ++m) {
    const double s = (last[m - 1] - last[m]) / scenario.dn;
    r.terminal_spacing_min = std::min(r.terminal_spacing_min, s);
    r.terminal_spacing_max = std::max(r.terminal_spacing_max, s);
  }
  if (last.size() < 2) r.terminal_spacing_min = r.terminal_spacing_max = 0.0;

  if (spec.measure != Measure::None) {
    r.theoretical_speed = theory_speed(spec);
    try {
      if (spec.measure == Measure::Shock) {
        const double v1 = scenario.initial_speed.value_or(spec.fd.eta(scenario.k1));
        r.wave = measure_front_speed(traj, v1, scenario.lead_speed, shown);
      } else {
        const double threshold =
            spec.startup_threshold.value_or(default_startup_threshold(spec.fd));
        r.wave = measure_startup_wave(traj, threshold, shown);
      }
    } catch (const std::exception& e) {
      r.measure_error = e.what();
    }
  }
  return r;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,vehicle,N,x,v,a\n";
  std::string line;
  for (std::size_t j = 0; j < traj.frames(); ++j) {
    for (std::size_t m = 0; m < traj.vehicles(); ++m) {
      line.clear();
      append17(line, traj.times[j]);
      line += ',';
      line += std::to_string(m);
      line += ',';
      append17(line, static_cast<double>(m) * traj.dn());
      line += ',';
      append17(line, traj.positions[j][m]);
      line += ',';
      append17(line, traj.speeds[j][m]);
      line += ',';
      const double a = traj.accelerations[j][m];
      if (std::isfinite(a)) append17(line, a);
      line += '\n';
      out << line;
    }
  }
}

std::string summary_text(const RunSpec& spec, const RunResult& r) {
  const Scenario& s = require_scenario(spec);
  std::ostringstream out;
  auto put = [&](std::string_view key, double v) { out << key << "=" << format_double(v) << "\n"; };
  auto flag = [&](std::string_view key, bool v) { out << key << "=" << (v ? "true" : "false") << "\n"; };
  out << "fd=" << spec.fd.type_name() << "\n";
  out << "model=" << to_string(spec.model) << "\n";
  out << "scheme=" << to_string(spec.scheme) << "\n";
  put("dn", s.dn);
  put("dt", s.dt);
  out << "M=" << s.M << "\n";
  out << "steps=" << s.step_count() << "\n";
  if (r.wave) {
    put(spec.measure == Measure::Shock ? "measured_shock_speed" : "measured_startup_speed",
        r.wave->fitted_speed);
    put("r_squared", r.wave->r_squared);
    out << "measured_vehicles=" << r.wave->crossing_points.size() << "\n";
  }
  if (!r.measure_error.empty()) out << "measure_error=" << r.measure_error << "\n";
  if (r.theoretical_speed) put("theoretical_speed", *r.theoretical_speed);
  put("min_spacing", r.diagnostics.min_spacing);
  put("terminal_spacing_min", r.terminal_spacing_min);
  put("terminal_spacing_max", r.terminal_spacing_max);
  out << "collision_count=" << r.diagnostics.collision_events.size() << "\n";
  out << "negative_speed_count=" << r.diagnostics.negative_speed_events.size() << "\n";
  put("max_abs_accel", r.diagnostics.max_abs_acceleration);
  put("max_abs_accel_displayed", r.max_abs_accel_displayed);
  put("collision_free_threshold", r.step_sizes.collision_free_threshold);
  put("cfl_threshold", r.step_sizes.cfl_threshold);
  flag("collision_free_ok", r.step_sizes.collision_free_ok);
  flag("cfl_ok", r.step_sizes.cfl_ok);
  flag("concave", r.step_sizes.concave);
  return out.str();
}

void write_run(const std::filesystem::path& out_dir, const RunSpec& spec, const RunResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    std::ofstream csv = open("trajectory.csv");
    write_trajectory_csv(csv, r.trajectory);
    if (!csv) throw std::runtime_error("write failed: " + (out_dir / "trajectory.csv").string());
  }
  std::ofstream summary = open("summary.txt");
  summary << summary_text(spec, r);
  if (!summary) throw std::runtime_error("write failed: " + (out_dir / "summary.txt").string());
}

RunSpec rescale(const RunSpec& spec, double dn) {
  if (!(dn > 0.0)) throw ArgumentError("dn must be positive");
  const Scenario& base = require_scenario(spec);
  RunSpec out = spec;
  Scenario& s = *out.scenario;
  s.dn = dn;
  s.dt = base.dt / base.dn * dn;
  s.M = static_cast<int>(std::lround(base.M * base.dn / dn));
  return out;
}

std::vector<SweepRow> sweep(const RunSpec& spec, std::span<const double> dn_values,
                            const std::filesystem::path& out_dir) {
  if (dn_values.empty()) throw ArgumentError("sweep needs at least one dn value");
  std::vector<RunSpec> specs;
  for (double dn : dn_values) specs.push_back(rescale(spec, dn));

  std::vector<std::future<RunResult>> jobs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      RunResult r = execute(specs[i]);
      if (!out_dir.empty()) write_run(out_dir / ("dn_" + std::to_string(i)), specs[i], r);
      return r;
    }));
  }
  std::vector<RunResult> results;
  for (auto& job : jobs) results.push_back(job.get());

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Scenario& s = *specs[i].scenario;
    const RunResult& r = results[i];
    SweepRow row;
    row.dn = s.dn;
    row.dt = s.dt;
    row.M = s.M;
    if (r.wave) {
      row.measured_speed = r.wave->fitted_speed;
      row.r_squared = r.wave->r_squared;
    }
    row.max_abs_accel_displayed = r.max_abs_accel_displayed;
    row.min_spacing = r.diagnostics.min_spacing;
    row.collision_count = r.diagnostics.collision_events.size();
    row.negative_speed_count = r.diagnostics.negative_speed_events.size();
    if (i > 0) {
      const Trajectory& prev = results[i - 1].trajectory;
      const Trajectory& cur = r.trajectory;
      const auto prev_slots = displayed_vehicles(prev, spec.measure_first, spec.measure_last);
      const auto cur_slots = displayed_vehicles(cur, spec.measure_first, spec.measure_last);
      const std::size_t n = std::min(prev_slots.size(), cur_slots.size());
      double gap = 0.0;
      for (std::size_t j = 0; j < prev.frames(); ++j) {
        const double t = prev.times[j];
        if (t > cur.times.back()) break;
        for (std::size_t v = 0; v < n; ++v) {
          gap = std::max(gap, std::abs(prev.positions[j][prev_slots[v]] -
                                       position_at(cur, cur_slots[v], t)));
        }
      }
      if (n > 0) row.max_position_gap = gap;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_table(std::span<const SweepRow> rows) {
  std::ostringstream out;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << "dn,dt,M,measured_speed,r_squared,max_abs_accel_displayed,min_spacing,"
         "collision_count,negative_speed_count,max_position_gap\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.dn) << ',' << format_double(r.dt) << ',' << r.M << ','
        << opt(r.measured_speed) << ',' << opt(r.r_squared) << ','
        << format_double(r.max_abs_accel_displayed) << ',' << format_double(r.min_spacing) << ','
        << r.collision_count << ',' << r.negative_speed_count << ',' << opt(r.max_position_gap)
        << '\n';
  }
  return out.str();
}

StringStabilitySetup stability_setup(const RunSpec& spec) {
  if (!spec.stability) throw ConfigError("configuration has no [stability] section");
  const StabilitySpec& s = *spec.stability;
  const BaseModel model = std::visit(
      [](const auto& m) -> BaseModel {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Corrected1> || std::is_same_v<M, Corrected2>) {
          throw ConfigError("stability experiments take an uncorrected model");
        } else {
          return m;
        }
      },
      spec.model);
  return StringStabilitySetup{spec.fd,     model, s.s0, s.amplitude, s.omega, s.vehicles,
                              s.dn,        s.dt,  s.duration, s.transient_fraction};
}

std::string stability_text(const StringStabilityResult& r) {
  std::ostringstream out;
  out << "omega=" << format_double(r.omega) << "\n";
  out << "amplification_ratio=" << format_double(r.amplification_ratio) << "\n";
  out << "predicted_ratio=" << format_double(r.predicted_ratio) << "\n";
  for (std::size_t n = 0; n < r.per_vehicle_amplitude.size(); ++n) {
    out << "amplitude_" << n << "=" << format_double(r.per_vehicle_amplitude[n]) << "\n";
  }
  return out.str();
}

}  // namespace nslwr
