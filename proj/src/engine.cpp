#include "nslwr/engine.hpp"

#include <algorithm>
#include <cmath>

#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double backward_spacing(const Platoon& p, std::size_t m) {
  return (p.positions[m - 1] - p.positions[m]) / p.dn;
}

// v + dt * A, written as a relaxation blend so that a relaxation time equal
// to dt reproduces theta bit for bit.
double proposed_speed(const BaseModel& model, const FundamentalDiagram& fd, double v, double s,
                      double dv, double dn, double dt) {
  const double target = fd.theta_extended(s);
  return std::visit(overloaded{
                        [&](const NonstandardLwr&) { return target; },
                        [&](const PhillipsRelax& m) {
                          const double r = dt / m.T;
                          return (1.0 - r) * v + r * target;
                        },
                        [&](const Jwz& m) {
                          const double r = dt / m.T;
                          return (1.0 - r) * v + r * target + dt * m.c0 * dv / (s * dn);
                        },
                    },
                    model);
}

Platoon advance_leader(const Platoon& p, double dt, double lead_speed) {
  Platoon next;
  next.dn = p.dn;
  next.positions.resize(p.size());
  next.speeds.resize(p.size());
  next.prev_positions = p.positions;
  if (p.size() > 0) {
    next.speeds[0] = lead_speed;
    next.positions[0] = p.positions[0] + dt * lead_speed;
  }
  return next;
}

void require_dt(double dt) {
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::AnisotropicSymplectic: return "anisotropic";
    case Scheme::ForwardSpacing: return "forward";
    case Scheme::ArithmeticCentral: return "arithmetic";
    case Scheme::HarmonicCentral: return "harmonic";
    case Scheme::ExplicitExplicit: return "explicit-explicit";
  }
  return "unknown";
}

namespace {
std::string base_to_string(const BaseModel& m) {
  return std::visit(overloaded{
                        [](const NonstandardLwr&) { return std::string("nonstandard"); },
                        [](const PhillipsRelax&) { return std::string("phillips"); },
                        [](const Jwz&) { return std::string("jwz"); },
                    },
                    m);
}
}  // namespace

std::string to_string(const Model& model) {
  return std::visit(
      overloaded{
          [](const NonstandardLwr&) { return std::string("nonstandard"); },
          [](const PhillipsRelax&) { return std::string("phillips"); },
          [](const Jwz&) { return std::string("jwz"); },
          [](const Corrected1& c) { return "corrected1(" + base_to_string(c.inner) + ")"; },
          [](const Corrected2& c) { return "corrected2(" + base_to_string(c.inner) + ")"; },
      },
      model);
}

void Scenario::validate() const {
  const double K = fd.jam_density();
  if (!(k1 > 0.0) || k1 > K * (1.0 + 1e-12)) {
    throw ArgumentError("k1 must lie in (0, K]; got " + std::to_string(k1));
  }
  if (!(lead_speed >= 0.0)) throw ArgumentError("lead_speed must be nonnegative");
  if (M < 0) throw ArgumentError("M must be nonnegative");
  if (!(dn > 0.0)) throw ArgumentError("dn must be positive");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  if (!(duration >= 0.0)) throw ArgumentError("duration must be nonnegative");
}

int Scenario::step_count() const {
  // ceil(duration/dt), tolerant of round-off such as 1/0.1 = 10.000000000000002
  return static_cast<int>(std::ceil(duration / dt - 1e-9));
}

Platoon init_lead_vehicle_problem(const Scenario& scenario) {
  scenario.validate();
  const double s1 = 1.0 / scenario.k1;
  const double v1 = scenario.initial_speed.value_or(
      scenario.fd.eta(std::min(scenario.k1, scenario.fd.jam_density())));
  Platoon p;
  p.dn = scenario.dn;
  p.positions.resize(scenario.M + 1);
  p.speeds.assign(scenario.M + 1, v1);
  for (int m = 0; m <= scenario.M; ++m) p.positions[m] = -m * s1 * scenario.dn;
  p.speeds[0] = scenario.lead_speed;
  p.prev_positions = p.positions;
  return p;
}

double spacing_estimate(const Platoon& p, std::size_t m, Scheme scheme) {
  if (m == 0 || m >= p.size()) throw ArgumentError("spacing_estimate needs 1 <= m <= M");
  const double back = backward_spacing(p, m);
  if (m + 1 == p.size()) return back;
  const double fwd = (p.positions[m] - p.positions[m + 1]) / p.dn;
  switch (scheme) {
    case Scheme::AnisotropicSymplectic:
    case Scheme::ExplicitExplicit:
      return back;
    case Scheme::ForwardSpacing:
      return fwd;
    case Scheme::ArithmeticCentral:
      return 0.5 * (back + fwd);
    case Scheme::HarmonicCentral:
      return 2.0 / (1.0 / back + 1.0 / fwd);
  }
  return back;
}

double acceleration(const BaseModel& model, const FundamentalDiagram& fd, double v, double s,
                    double dv, double dn, double dt) {
  const double target = fd.theta_extended(s);
  return std::visit(overloaded{
                        [&](const NonstandardLwr&) { return (target - v) / dt; },
                        [&](const PhillipsRelax& m) { return (target - v) / m.T; },
                        [&](const Jwz& m) { return (target - v) / m.T + m.c0 * dv / (s * dn); },
                    },
                    model);
}

Platoon step_nonstandard(const Platoon& p, const FundamentalDiagram& fd, double dt,
                         double lead_speed) {
  return step_stencil(p, fd, dt, lead_speed, Scheme::AnisotropicSymplectic);
}

Platoon step_stencil(const Platoon& p, const FundamentalDiagram& fd, double dt,
                     double lead_speed, Scheme scheme) {
  require_dt(dt);
  if (scheme == Scheme::ExplicitExplicit) {
    return step_explicit_explicit(p, fd, dt, lead_speed);
  }
  Platoon next = advance_leader(p, dt, lead_speed);
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double u = fd.theta_extended(spacing_estimate(p, m, scheme));
    next.speeds[m] = u;
    next.positions[m] = p.positions[m] + dt * u;
  }
  return next;
}

Platoon step_explicit_explicit(const Platoon& p, const FundamentalDiagram& fd, double dt,
                               double lead_speed) {
  require_dt(dt);
  const std::vector<double>& before = p.prev_positions.empty() ? p.positions : p.prev_positions;
  if (before.size() != p.size()) throw ArgumentError("prev_positions size mismatch");
  Platoon next = advance_leader(p, dt, lead_speed);
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double u = fd.theta_extended((before[m - 1] - before[m]) / p.dn);
    next.speeds[m] = u;
    next.positions[m] = p.positions[m] + dt * u;
  }
  return next;
}

Platoon step_second_order(const Platoon& p, const BaseModel& model, const FundamentalDiagram& fd,
                          double dt, double lead_speed) {
  require_dt(dt);
  Platoon next = advance_leader(p, dt, lead_speed);
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double s = backward_spacing(p, m);
    const double dv = p.speeds[m - 1] - p.speeds[m];
    const double u = proposed_speed(model, fd, p.speeds[m], s, dv, p.dn, dt);
    next.speeds[m] = u;
    next.positions[m] = p.positions[m] + dt * u;
  }
  return next;
}

Platoon step_corrected_1(const Platoon& p, const BaseModel& inner, const FundamentalDiagram& fd,
                         double dt, double lead_speed) {
  require_dt(dt);
  Platoon next = advance_leader(p, dt, lead_speed);
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double s = backward_spacing(p, m);
    const double dv = p.speeds[m - 1] - p.speeds[m];
    const double proposal = proposed_speed(inner, fd, p.speeds[m], s, dv, p.dn, dt);
    const double cap = fd.theta_extended(s);
    const double u = std::max(0.0, std::min(cap, proposal));
    next.speeds[m] = u;
    // Y + dt u equals max{Y, min{Y + dt theta, Y + dt v + dt^2 A}} exactly,
    // since rounding of Y + dt x is monotone in x.
    next.positions[m] = p.positions[m] + dt * u;
  }
  return next;
}

Platoon step_corrected_2(const Platoon& p, const BaseModel& inner, const FundamentalDiagram& fd,
                         double dt, double lead_speed) {
  require_dt(dt);
  const double jam_gap = fd.jam_spacing() * p.dn;
  Platoon next = advance_leader(p, dt, lead_speed);
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double gap = p.positions[m - 1] - p.positions[m];
    const double s = gap / p.dn;
    const double dv = p.speeds[m - 1] - p.speeds[m];
    const double proposal = proposed_speed(inner, fd, p.speeds[m], s, dv, p.dn, dt);
    next.speeds[m] = std::max(0.0, std::min((gap - jam_gap) / dt, proposal));
    next.positions[m] =
        std::max(p.positions[m],
                 std::min(p.positions[m - 1] - jam_gap, p.positions[m] + dt * proposal));
  }
  return next;
}

void check_supported(const Model& model, Scheme scheme) {
  if (scheme == Scheme::AnisotropicSymplectic) return;
  if (!std::holds_alternative<NonstandardLwr>(model)) {
    throw ConfigError("scheme '" + to_string(scheme) + "' is only supported with model " +
                      "'nonstandard'; got '" + to_string(model) + "'");
  }
}

Platoon step(const Platoon& p, const Model& model, Scheme scheme, const FundamentalDiagram& fd,
             double dt, double lead_speed) {
  check_supported(model, scheme);
  return std::visit(
      overloaded{
          [&](const NonstandardLwr&) { return step_stencil(p, fd, dt, lead_speed, scheme); },
          [&](const PhillipsRelax& m) {
            return step_second_order(p, BaseModel{m}, fd, dt, lead_speed);
          },
          [&](const Jwz& m) { return step_second_order(p, BaseModel{m}, fd, dt, lead_speed); },
          [&](const Corrected1& c) { return step_corrected_1(p, c.inner, fd, dt, lead_speed); },
          [&](const Corrected2& c) { return step_corrected_2(p, c.inner, fd, dt, lead_speed); },
      },
      model);
}

namespace {

void observe_state(const Platoon& p, std::int64_t step, double jam_gap, RunLog& log) {
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double gap = p.positions[m - 1] - p.positions[m];
    log.min_spacing = std::min(log.min_spacing, gap / p.dn);
    if (gap < jam_gap - kCollisionSlack) log.collisions.push_back({step, static_cast<int>(m)});
  }
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p.speeds[m] < -kNegativeSpeedSlack) {
      log.negative_speeds.push_back({step, static_cast<int>(m)});
    }
  }
}

}  // namespace

Trajectory simulate(const Scenario& scenario, const Model& model, Scheme scheme,
                    const SimulationOptions& options) {
  scenario.validate();
  check_supported(model, scheme);
  if (options.record_stride < 1) throw ArgumentError("record_stride must be >= 1");

  const FundamentalDiagram& fd = scenario.fd;
  const double dt = scenario.dt;
  const double jam_gap = fd.jam_spacing() * scenario.dn;
  auto lead_at = [&](double t) {
    return options.lead_speed ? options.lead_speed(t) : scenario.lead_speed;
  };

  Trajectory traj{scenario, model, scheme, options.record_stride, {}, {}, {}, {}, {}, {}};
  Platoon state = init_lead_vehicle_problem(scenario);
  state.speeds[0] = lead_at(0.0);

  const int total = scenario.step_count();
  auto record = [&](std::int64_t n) {
    traj.steps.push_back(n);
    traj.times.push_back(static_cast<double>(n) * dt);
    traj.positions.push_back(state.positions);
    traj.speeds.push_back(state.speeds);
    traj.accelerations.emplace_back(state.size(), std::numeric_limits<double>::quiet_NaN());
  };

  observe_state(state, 0, jam_gap, traj.log);
  record(0);
  for (int n = 0; n < total; ++n) {
    const double t_next = static_cast<double>(n + 1) * dt;
    Platoon next = step(state, model, scheme, fd, dt, lead_at(t_next));
    const bool recorded = traj.steps.back() == n;
    for (std::size_t m = 0; m < state.size(); ++m) {
      const double a = (next.speeds[m] - state.speeds[m]) / dt;
      traj.log.max_abs_acceleration = std::max(traj.log.max_abs_acceleration, std::abs(a));
      if (recorded) traj.accelerations.back()[m] = a;
    }
    state = std::move(next);
    observe_state(state, n + 1, jam_gap, traj.log);
    if ((n + 1) % options.record_stride == 0 || n + 1 == total) record(n + 1);
  }
  return traj;
}

}  // namespace nslwr
