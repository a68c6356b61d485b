#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "nslwr/engine.hpp"
#include "nslwr/fundamental.hpp"

namespace nslwr {

struct DiagnosticsReport {
  std::vector<Event> collision_events;      // gap < S dn - 1e-9
  std::vector<Event> negative_speed_events;  // speed < -1e-12
  double min_spacing = 0.0;                  // min gap / dn, m per vehicle
  double max_abs_acceleration = 0.0;         // m/s^2
};

// Scans every recorded frame. For strided trajectories the engine's
// full-resolution log is merged in so events between frames are not lost.
DiagnosticsReport diagnose(const Trajectory& traj, const FundamentalDiagram& fd);

struct CrossingPoint {
  int vehicle = 0;
  double t = 0.0;
  double x = 0.0;
};

struct WaveMeasurement {
  std::vector<CrossingPoint> crossing_points;
  double fitted_speed = 0.0;  // least-squares slope of x against t
  double r_squared = 0.0;
};

// Slots holding integer vehicle numbers N = first..last (slot m = N / dn),
// restricted to slots present in the trajectory.
std::vector<int> displayed_vehicles(const Trajectory& traj, int first = 1, int last = 5);

// Locates, for each vehicle, the first time its speed crosses (v1 + v2)/2,
// interpolating linearly between frames, and fits a line through the
// crossing points. An empty vehicle list means displayed_vehicles(traj).
// Vehicles that never cross are skipped; fewer than three crossings throws
// MeasurementError.
WaveMeasurement measure_front_speed(const Trajectory& traj, double v1, double v2,
                                    std::span<const int> vehicles = {});

// Same fit through the first time each vehicle's speed exceeds threshold.
// Vehicles already above the threshold at t = 0 are skipped.
WaveMeasurement measure_startup_wave(const Trajectory& traj, double threshold,
                                     std::span<const int> vehicles = {});

inline double default_startup_threshold(const FundamentalDiagram& fd) {
  return 1e-3 * fd.free_flow_speed();
}

struct StringStabilitySetup {
  FundamentalDiagram fd;
  BaseModel model;
  double s0 = 14.0;         // equilibrium spacing, m
  double amplitude = 0.1;   // lead speed disturbance, m/s
  double omega = 0.1;       // rad/s
  int vehicles = 10;        // followers measured, in whole vehicles
  double dn = 1.0;
  double dt = 0.1;
  double duration = 2000.0;
  double transient_fraction = 0.2;
};

struct StringStabilityResult {
  double omega = 0.0;
  // Half peak-to-trough speed swing for N = 0 (leader), 1, ..., vehicles.
  std::vector<double> per_vehicle_amplitude;
  // Geometric mean of successive amplitude ratios per whole vehicle.
  double amplification_ratio = 1.0;
  // exp(T omega^2 / theta'(s0)); T is dt for NonstandardLwr.
  double predicted_ratio = 1.0;
};

// Equilibrium platoon at spacing s0 behind a leader driving
// eta(1/s0) + amplitude sin(omega t). Throws ExperimentInvalid on collision.
StringStabilityResult string_stability_experiment(const StringStabilitySetup& setup);

// Both roots of w^2 + (2 m v0 + i/T) w + m^2 v0^2 + i m (v0 - k0 eta'(k0)) / T = 0,
// the dispersion relation of the relaxation model linearized at k0 for
// perturbations exp(i(m x - w t)).
std::array<std::complex<double>, 2> eulerian_dispersion_roots(const FundamentalDiagram& fd,
                                                              double k0, double T, double m);

// -T (k eta'(k))^2: coefficient of k_x in the first-order correction of the
// relaxation model. Never positive.
double diffusion_coefficient(const FundamentalDiagram& fd, double k, double T);

}  // namespace nslwr
