#include "nslwr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

WaveMeasurement fit_line(std::vector<CrossingPoint> points, const char* what) {
  if (points.size() < 3) {
    throw MeasurementError(std::string(what) + ": only " + std::to_string(points.size()) +
                           " vehicles crossed, need at least 3");
  }
  const double n = static_cast<double>(points.size());
  double mean_t = 0.0;
  double mean_x = 0.0;
  for (const auto& p : points) {
    mean_t += p.t;
    mean_x += p.x;
  }
  mean_t /= n;
  mean_x /= n;
  double stt = 0.0;
  double stx = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    stt += (p.t - mean_t) * (p.t - mean_t);
    stx += (p.t - mean_t) * (p.x - mean_x);
    sxx += (p.x - mean_x) * (p.x - mean_x);
  }
  if (!(stt > 0.0)) throw MeasurementError(std::string(what) + ": crossings are simultaneous");
  WaveMeasurement w;
  w.fitted_speed = stx / stt;
  const double intercept = mean_x - w.fitted_speed * mean_t;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.x - (intercept + w.fitted_speed * p.t);
    ss_res += r * r;
  }
  w.r_squared = sxx > 0.0 ? std::clamp(1.0 - ss_res / sxx, 0.0, 1.0) : 1.0;
  w.crossing_points = std::move(points);
  return w;
}

std::vector<int> resolve_vehicles(const Trajectory& traj, std::span<const int> vehicles) {
  if (!vehicles.empty()) return {vehicles.begin(), vehicles.end()};
  return displayed_vehicles(traj);
}

CrossingPoint interpolate(const Trajectory& traj, int m, std::size_t j, double level) {
  const double u0 = traj.speeds[j - 1][m];
  const double u1 = traj.speeds[j][m];
  const double f = u1 == u0 ? 0.0 : (level - u0) / (u1 - u0);
  CrossingPoint p;
  p.vehicle = m;
  p.t = traj.times[j - 1] + f * (traj.times[j] - traj.times[j - 1]);
  p.x = traj.positions[j - 1][m] + f * (traj.positions[j][m] - traj.positions[j - 1][m]);
  return p;
}

}  // namespace

DiagnosticsReport diagnose(const Trajectory& traj, const FundamentalDiagram& fd) {
  if (traj.frames() == 0) throw ArgumentError("diagnose needs a nonempty trajectory");
  const double dn = traj.dn();
  const double jam_gap = fd.jam_spacing() * dn;
  DiagnosticsReport r;
  r.min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < traj.frames(); ++j) {
    const auto& x = traj.positions[j];
    const auto& v = traj.speeds[j];
    for (std::size_t m = 1; m < x.size(); ++m) {
      const double gap = x[m - 1] - x[m];
      r.min_spacing = std::min(r.min_spacing, gap / dn);
      if (gap < jam_gap - kCollisionSlack) {
        r.collision_events.push_back({traj.steps[j], static_cast<int>(m)});
      }
    }
    for (std::size_t m = 0; m < v.size(); ++m) {
      if (v[m] < -kNegativeSpeedSlack) {
        r.negative_speed_events.push_back({traj.steps[j], static_cast<int>(m)});
      }
    }
    for (double a : traj.accelerations[j]) {
      if (std::isfinite(a)) r.max_abs_acceleration = std::max(r.max_abs_acceleration, std::abs(a));
    }
  }
  if (traj.stride > 1) {
    auto merge = [](std::vector<Event>& into, const std::vector<Event>& from) {
      into.insert(into.end(), from.begin(), from.end());
      std::sort(into.begin(), into.end());
      into.erase(std::unique(into.begin(), into.end()), into.end());
    };
    merge(r.collision_events, traj.log.collisions);
    merge(r.negative_speed_events, traj.log.negative_speeds);
    r.min_spacing = std::min(r.min_spacing, traj.log.min_spacing);
    r.max_abs_acceleration = std::max(r.max_abs_acceleration, traj.log.max_abs_acceleration);
  }
  if (traj.vehicles() < 2) r.min_spacing = 0.0;
  return r;
}

std::vector<int> displayed_vehicles(const Trajectory& traj, int first, int last) {
  std::vector<int> out;
  const int count = static_cast<int>(traj.vehicles());
  for (int n = first; n <= last; ++n) {
    const int m = static_cast<int>(std::lround(n / traj.dn()));
    if (m >= 0 && m < count) out.push_back(m);
  }
  return out;
}

WaveMeasurement measure_front_speed(const Trajectory& traj, double v1, double v2,
                                    std::span<const int> vehicles) {
  if (v1 == v2) throw ArgumentError("measure_front_speed needs v1 != v2");
  const double mid = 0.5 * (v1 + v2);
  std::vector<CrossingPoint> points;
  for (int m : resolve_vehicles(traj, vehicles)) {
    if (m < 0 || m >= static_cast<int>(traj.vehicles()) || traj.frames() < 2) continue;
    const double side0 = traj.speeds[0][m] - mid;
    if (side0 == 0.0) continue;
    for (std::size_t j = 1; j < traj.frames(); ++j) {
      const double side = traj.speeds[j][m] - mid;
      if (side == 0.0 || (side > 0.0) != (side0 > 0.0)) {
        points.push_back(interpolate(traj, m, j, mid));
        break;
      }
    }
  }
  return fit_line(std::move(points), "measure_front_speed");
}

WaveMeasurement measure_startup_wave(const Trajectory& traj, double threshold,
                                     std::span<const int> vehicles) {
  std::vector<CrossingPoint> points;
  for (int m : resolve_vehicles(traj, vehicles)) {
    if (m < 0 || m >= static_cast<int>(traj.vehicles()) || traj.frames() < 2) continue;
    if (traj.speeds[0][m] > threshold) continue;
    for (std::size_t j = 1; j < traj.frames(); ++j) {
      if (traj.speeds[j][m] > threshold) {
        points.push_back(interpolate(traj, m, j, threshold));
        break;
      }
    }
  }
  return fit_line(std::move(points), "measure_startup_wave");
}

StringStabilityResult string_stability_experiment(const StringStabilitySetup& setup) {
  const FundamentalDiagram& fd = setup.fd;
  if (!(setup.s0 > fd.jam_spacing())) throw ArgumentError("s0 must exceed the jam spacing");
  if (setup.vehicles < 1) throw ArgumentError("vehicles must be >= 1");
  if (!(setup.transient_fraction >= 0.0 && setup.transient_fraction < 1.0)) {
    throw ArgumentError("transient_fraction must be in [0, 1)");
  }
  const double v0 = fd.theta(setup.s0);
  const double theta_slope = fd.theta_prime(setup.s0);
  const int per_vehicle = static_cast<int>(std::lround(1.0 / setup.dn));
  if (per_vehicle < 1 || std::abs(per_vehicle * setup.dn - 1.0) > 1e-9) {
    throw ArgumentError("string stability needs 1/dn to be an integer");
  }

  Scenario scenario{fd, 1.0 / setup.s0, v0, setup.vehicles * per_vehicle, setup.dn, setup.dt,
                    setup.duration, std::nullopt};
  Platoon state = init_lead_vehicle_problem(scenario);
  const Model model = std::visit([](const auto& m) { return Model{m}; }, setup.model);

  const int total = scenario.step_count();
  const int discard = static_cast<int>(std::floor(setup.transient_fraction * total));
  const double jam_gap = fd.jam_spacing() * setup.dn;
  std::vector<double> lo(setup.vehicles + 1, std::numeric_limits<double>::infinity());
  std::vector<double> hi(setup.vehicles + 1, -std::numeric_limits<double>::infinity());

  for (int n = 0; n < total; ++n) {
    const double t_next = (n + 1) * setup.dt;
    const double lead = v0 + setup.amplitude * std::sin(setup.omega * t_next);
    state = step(state, model, Scheme::AnisotropicSymplectic, fd, setup.dt, lead);
    for (std::size_t m = 1; m < state.size(); ++m) {
      if (state.positions[m - 1] - state.positions[m] < jam_gap - kCollisionSlack) {
        throw ExperimentInvalid("collision at step " + std::to_string(n + 1) + ", vehicle " +
                                std::to_string(m));
      }
    }
    if (n + 1 > discard) {
      for (int v = 0; v <= setup.vehicles; ++v) {
        const double u = state.speeds[v * per_vehicle];
        lo[v] = std::min(lo[v], u);
        hi[v] = std::max(hi[v], u);
      }
    }
  }

  StringStabilityResult r;
  r.omega = setup.omega;
  r.per_vehicle_amplitude.resize(setup.vehicles + 1, 0.0);
  for (int v = 0; v <= setup.vehicles; ++v) {
    if (hi[v] >= lo[v]) r.per_vehicle_amplitude[v] = 0.5 * (hi[v] - lo[v]);
  }
  const double first = r.per_vehicle_amplitude.front();
  const double last = r.per_vehicle_amplitude.back();
  r.amplification_ratio =
      (first > 0.0 && last > 0.0) ? std::pow(last / first, 1.0 / setup.vehicles) : 1.0;
  const double relax = std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NonstandardLwr>) {
          return setup.dt;
        } else {
          return m.T;
        }
      },
      setup.model);
  r.predicted_ratio = std::exp(relax * setup.omega * setup.omega / theta_slope);
  return r;
}

std::array<std::complex<double>, 2> eulerian_dispersion_roots(const FundamentalDiagram& fd,
                                                              double k0, double T, double m) {
  if (!(T > 0.0)) throw ArgumentError("relaxation time must be positive");
  using C = std::complex<double>;
  const double v0 = fd.eta(k0);
  const C b(2.0 * m * v0, 1.0 / T);
  const C c(m * m * v0 * v0, (v0 - k0 * fd.eta_prime(k0)) * m / T);
  const C root_disc = std::sqrt(b * b - 4.0 * c);
  // Pick the sign that avoids cancellation, then use Vieta for the other.
  const C q = (std::real(std::conj(b) * root_disc) >= 0.0) ? -0.5 * (b + root_disc)
                                                           : -0.5 * (b - root_disc);
  if (q == C(0.0, 0.0)) return {C(0.0, 0.0), C(0.0, 0.0)};
  return {q, c / q};
}

double diffusion_coefficient(const FundamentalDiagram& fd, double k, double T) {
  const double ke = k * fd.eta_prime(k);
  return -T * ke * ke;
}

}  // namespace nslwr
