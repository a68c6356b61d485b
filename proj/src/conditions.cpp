#include "nslwr/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

constexpr double kRefineTolerance = 1e-9;
constexpr double kSlack = 1e-12;

// Golden-section search for a maximum of f on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, double scale) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best = std::max(fc, fd);
  while (b - a > kRefineTolerance * scale) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

// Grid scan over k_i = K i / n for i in [first, last], then golden-section
// refinement inside the bracket around the best grid point.
double scan_and_refine(const std::function<double(double)>& f, double K, int n, int first,
                       int last) {
  int best_i = first;
  double best = f(K * first / n);
  for (int i = first + 1; i <= last; ++i) {
    const double v = f(K * i / n);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  const double a = K * std::max(first, best_i - 1) / n;
  const double b = K * std::min(last, best_i + 1) / n;
  if (b > a) best = std::max(best, golden_max(f, a, b, K));
  return best;
}

}  // namespace

double collision_free_threshold(const FundamentalDiagram& fd, int grid_points) {
  if (grid_points < 4) throw ArgumentError("grid_points must be at least 4");
  const double K = fd.jam_density();
  auto ratio = [&fd, K](double k) { return fd.phi(k) / (1.0 - k / K); };
  const double interior = scan_and_refine(ratio, K, grid_points, 0, grid_points - 1);
  // phi(K) = 0, so the 0/0 limit is phi'(K) / (-1/K) = -eta'(K) K^2.
  const double at_jam = -fd.eta_prime(K) * K * K;
  return std::max(interior, at_jam);
}

double cfl_threshold(const FundamentalDiagram& fd, int grid_points) {
  if (grid_points < 4) throw ArgumentError("grid_points must be at least 4");
  const double K = fd.jam_density();
  auto wave = [&fd](double k) { return std::abs(fd.eta_prime(k)) * k * k; };
  return scan_and_refine(wave, K, grid_points, 0, grid_points);
}

bool check_concave(const FundamentalDiagram& fd, int grid_points) {
  const double K = fd.jam_density();
  const int n = grid_points;
  std::vector<int> kink_index;
  for (double kink : fd.kinks()) kink_index.push_back(static_cast<int>(std::lround(kink / K * n)));
  for (int i = 1; i < n; ++i) {
    const bool near_kink = std::any_of(kink_index.begin(), kink_index.end(),
                                       [i](int j) { return std::abs(i - j) <= 10; });
    if (near_kink) continue;
    const double k = K * i / n;
    if (k * fd.eta_second(k) + 2.0 * fd.eta_prime(k) > 1e-9) return false;
  }
  return true;
}

StepSizeReport validate_step_sizes(const FundamentalDiagram& fd, double dn, double dt) {
  if (!(dn > 0.0) || !(dt > 0.0)) {
    throw ArgumentError("step sizes must be positive (dn=" + std::to_string(dn) +
                        ", dt=" + std::to_string(dt) + ")");
  }
  StepSizeReport r;
  r.dn = dn;
  r.dt = dt;
  r.collision_free_threshold = collision_free_threshold(fd);
  r.cfl_threshold = cfl_threshold(fd);
  r.concave = check_concave(fd);
  const double rate = dn / dt;
  r.collision_free_ok = rate >= r.collision_free_threshold * (1.0 - kSlack);
  r.cfl_ok = rate >= r.cfl_threshold * (1.0 - kSlack);
  return r;
}

}  // namespace nslwr
