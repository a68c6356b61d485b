#pragma once

#include "nslwr/fundamental.hpp"

namespace nslwr {

// Step-size check of a (dn, dt) pair against both rate thresholds.
struct StepSizeReport {
  double collision_free_threshold = 0.0;  // veh/s
  double cfl_threshold = 0.0;             // veh/s
  double dn = 0.0;
  double dt = 0.0;
  bool collision_free_ok = false;
  bool cfl_ok = false;
  bool concave = false;
};

// sup over k in [0, K) of phi(k) / (1 - k/K). The k -> K end is the limit
// -eta'(K) K^2 taken on the congested branch.
double collision_free_threshold(const FundamentalDiagram& fd, int grid_points = 100000);

// max over k in [0, K] of |eta'(k)| k^2.
double cfl_threshold(const FundamentalDiagram& fd, int grid_points = 100000);

// k eta''(k) + 2 eta'(k) <= 1e-9 on a uniform grid over (0, K), skipping
// ten grid points on each side of every kink.
bool check_concave(const FundamentalDiagram& fd, int grid_points = 10000);

StepSizeReport validate_step_sizes(const FundamentalDiagram& fd, double dn, double dt);

}  // namespace nslwr
