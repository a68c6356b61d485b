#pragma once

#include <variant>

#include "nslwr/engine.hpp"
#include "nslwr/fundamental.hpp"

namespace nslwr {

struct Shock {
  double speed = 0.0;
  // Set for a rarefaction of a triangular diagram: the fan degenerates into
  // jumps, and speed is phi'(k1), the wave met by upstream vehicles.
  bool degenerate = false;
};

struct Rarefaction {
  double lo = 0.0;
  double hi = 0.0;
};

struct Uniform {};

struct WaveSolution {
  std::variant<Shock, Rarefaction, Uniform> kind;
  double k1 = 0.0;  // upstream
  double k2 = 0.0;  // downstream

  bool is_shock() const { return std::holds_alternative<Shock>(kind); }
  bool is_rarefaction() const { return std::holds_alternative<Rarefaction>(kind); }
  bool is_uniform() const { return std::holds_alternative<Uniform>(kind); }
};

// (phi(k2) - phi(k1)) / (k2 - k1). Throws ArgumentError when k1 == k2.
double shock_speed_rh(const FundamentalDiagram& fd, double k1, double k2);

// Entropy solution of the Riemann problem with k1 upstream and k2
// downstream. Throws UnsupportedDiagram for non-concave diagrams.
WaveSolution riemann_wave(const FundamentalDiagram& fd, double k1, double k2);

// Smallest density k with eta(k) <= v; the downstream state behind a leader
// driving at v.
double density_for_speed(const FundamentalDiagram& fd, double v);

// Exact lead-vehicle shock solution sampled every dt: the leader drives at
// eta(k2) from x = 0, vehicle m starts at -m dn / k1 at speed eta(k1) and
// switches to eta(k2) on meeting the line x = sigma t. Speeds are backward
// differences of the sampled positions (the leader and t = 0 use the
// analytic speed), so they change in a single frame per vehicle.
Trajectory synthetic_shock_trajectory(const FundamentalDiagram& fd, double k1, double k2, int M,
                                      double dn, double duration, double dt);

}  // namespace nslwr
