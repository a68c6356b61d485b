#include "nslwr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nslwr/conditions.hpp"
#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

void check_pair(const FundamentalDiagram& fd, double k1, double k2) {
  const double K = fd.jam_density();
  for (double k : {k1, k2}) {
    if (!(k >= 0.0) || k > K * (1.0 + 1e-12)) {
      throw ArgumentError("density " + std::to_string(k) + " outside [0, K]");
    }
  }
}

void require_concave(const FundamentalDiagram& fd) {
  if (!check_concave(fd)) {
    throw UnsupportedDiagram(std::string("no classical Riemann solution for non-concave diagram '") +
                             std::string(fd.type_name()) + "'");
  }
}

}  // namespace

double shock_speed_rh(const FundamentalDiagram& fd, double k1, double k2) {
  check_pair(fd, k1, k2);
  if (k1 == k2) throw ArgumentError("shock_speed_rh needs k1 != k2");
  return (fd.phi(k2) - fd.phi(k1)) / (k2 - k1);
}

WaveSolution riemann_wave(const FundamentalDiagram& fd, double k1, double k2) {
  check_pair(fd, k1, k2);
  require_concave(fd);
  WaveSolution w;
  w.k1 = k1;
  w.k2 = k2;
  if (k1 == k2) {
    w.kind = Uniform{};
  } else if (k1 < k2) {
    w.kind = Shock{shock_speed_rh(fd, k1, k2), false};
  } else {
    const double a = fd.phi_prime(k2);
    const double b = fd.phi_prime(k1);
    // A piecewise-linear flux has no continuously varying fan; the upstream
    // vehicles only see the wave at phi'(k1).
    if (a == b || std::holds_alternative<Triangular>(fd.law())) {
      w.kind = Shock{b, true};
    } else {
      w.kind = Rarefaction{std::min(a, b), std::max(a, b)};
    }
  }
  return w;
}

double density_for_speed(const FundamentalDiagram& fd, double v) {
  const double K = fd.jam_density();
  if (fd.eta(0.0) <= v) return 0.0;
  if (v < 0.0) throw ArgumentError("speed must be nonnegative");
  double lo = 0.0;
  double hi = K;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (fd.eta(mid) <= v) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Trajectory synthetic_shock_trajectory(const FundamentalDiagram& fd, double k1, double k2, int M,
                                      double dn, double duration, double dt) {
  if (!(k1 < k2)) throw ArgumentError("synthetic shock needs k1 < k2");
  const WaveSolution w = riemann_wave(fd, k1, k2);
  const double sigma = std::get<Shock>(w.kind).speed;
  const double v1 = fd.eta(k1);
  const double v2 = fd.eta(k2);

  Scenario scenario{fd, k1, v2, M, dn, dt, duration, std::nullopt};
  scenario.validate();
  const double s1 = 1.0 / k1;

  // Vehicle m meets the shock at t* = x0 / (sigma - v1), x0 = -m s1 dn < 0.
  std::vector<double> x0(M + 1);
  std::vector<double> t_star(M + 1);
  for (int m = 0; m <= M; ++m) {
    x0[m] = -m * s1 * dn;
    t_star[m] = m == 0 ? 0.0 : x0[m] / (sigma - v1);
  }
  auto position = [&](int m, double t) {
    if (m == 0) return v2 * t;
    if (t <= t_star[m]) return x0[m] + v1 * t;
    return x0[m] + v1 * t_star[m] + v2 * (t - t_star[m]);
  };

  Trajectory traj{scenario, Model{NonstandardLwr{}}, Scheme::AnisotropicSymplectic, 1,
                  {}, {}, {}, {}, {}, {}};
  const int total = scenario.step_count();
  for (int n = 0; n <= total; ++n) {
    const double t = n * dt;
    std::vector<double> x(M + 1);
    std::vector<double> v(M + 1);
    for (int m = 0; m <= M; ++m) {
      x[m] = position(m, t);
      if (m == 0) {
        v[m] = v2;
      } else if (n == 0) {
        v[m] = v1;
      } else {
        v[m] = (x[m] - traj.positions.back()[m]) / dt;
      }
    }
    traj.steps.push_back(n);
    traj.times.push_back(t);
    traj.positions.push_back(std::move(x));
    traj.speeds.push_back(std::move(v));
    traj.accelerations.emplace_back(M + 1, std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t j = 0; j + 1 < traj.frames(); ++j) {
    for (int m = 0; m <= M; ++m) {
      traj.accelerations[j][m] = (traj.speeds[j + 1][m] - traj.speeds[j][m]) / dt;
    }
  }
  return traj;
}

}  // namespace nslwr
