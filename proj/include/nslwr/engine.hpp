#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nslwr/fundamental.hpp"

namespace nslwr {

// Vehicle-discretization / time-integration pair used by the platoon update.
enum class Scheme {
  AnisotropicSymplectic,  // backward spacing, symplectic Euler
  ForwardSpacing,
  ArithmeticCentral,
  HarmonicCentral,
  ExplicitExplicit,  // backward spacing, explicit Euler for speed and position
};

// Relaxation toward theta(s) with time scale dt (the first-order model).
struct NonstandardLwr {
  friend bool operator==(const NonstandardLwr&, const NonstandardLwr&) = default;
};

// Relaxation toward theta(s) with a finite time scale T.
struct PhillipsRelax {
  double T = 5.0;
  friend bool operator==(const PhillipsRelax&, const PhillipsRelax&) = default;
};

// PhillipsRelax plus c0 (v_leader - v) / (x_leader - x).
struct Jwz {
  double T = 5.0;
  double c0 = 2.0;
  friend bool operator==(const Jwz&, const Jwz&) = default;
};

using BaseModel = std::variant<NonstandardLwr, PhillipsRelax, Jwz>;

// Speed clamped into [0, theta(s)].
struct Corrected1 {
  BaseModel inner;
  friend bool operator==(const Corrected1&, const Corrected1&) = default;
};

// Speed clamped into [0, (gap - S dn) / dt].
struct Corrected2 {
  BaseModel inner;
  friend bool operator==(const Corrected2&, const Corrected2&) = default;
};

using Model = std::variant<NonstandardLwr, PhillipsRelax, Jwz, Corrected1, Corrected2>;

std::string to_string(Scheme scheme);
std::string to_string(const Model& model);

// Vehicle state at one time step. Index 0 is the leader; positions decrease
// with the index while no collision has occurred.
struct Platoon {
  double dn = 1.0;
  std::vector<double> positions;
  std::vector<double> speeds;
  // Positions one step earlier; read only by ExplicitExplicit. Empty means
  // "same as positions".
  std::vector<double> prev_positions;

  std::size_t size() const { return positions.size(); }
};

// Lead-vehicle problem: a leader at constant speed ahead of M follower slots
// in equilibrium at density k1.
struct Scenario {
  FundamentalDiagram fd;
  double k1 = 0.0;
  double lead_speed = 0.0;
  int M = 50;
  double dn = 1.0;
  double dt = 1.0;
  double duration = 0.0;
  // Follower speed at t = 0; eta(k1) when unset.
  std::optional<double> initial_speed;

  void validate() const;
  int step_count() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Event {
  std::int64_t step = 0;
  int vehicle = 0;
  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;
};

// Diagnostics gathered at every step of a run, independent of the
// recording stride.
struct RunLog {
  std::vector<Event> collisions;       // gap < S dn - 1e-9
  std::vector<Event> negative_speeds;  // speed < -1e-12
  double min_spacing = std::numeric_limits<double>::infinity();  // gap / dn
  double max_abs_acceleration = 0.0;
};

inline constexpr double kCollisionSlack = 1e-9;
inline constexpr double kNegativeSpeedSlack = 1e-12;

struct Trajectory {
  Scenario scenario;
  Model model;
  Scheme scheme = Scheme::AnisotropicSymplectic;
  int stride = 1;

  std::vector<std::int64_t> steps;
  std::vector<double> times;
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> speeds;
  // accelerations[j][m] = (U^{n+1}_m - U^n_m) / dt where n = steps[j]; NaN
  // on the final frame, which has no successor.
  std::vector<std::vector<double>> accelerations;
  RunLog log;

  double dn() const { return scenario.dn; }
  double dt() const { return scenario.dt; }
  std::size_t frames() const { return times.size(); }
  std::size_t vehicles() const { return positions.empty() ? 0 : positions.front().size(); }
};

struct SimulationOptions {
  int record_stride = 1;
  // Leader speed as a function of time; overrides Scenario::lead_speed.
  std::function<double(double)> lead_speed;
};

Platoon init_lead_vehicle_problem(const Scenario& scenario);

// Per-vehicle spacing (m/veh) seen by vehicle m >= 1 under the scheme's
// stencil. The tail vehicle always uses the backward difference.
double spacing_estimate(const Platoon& platoon, std::size_t m, Scheme scheme);

// Acceleration of a follower with speed v, per-vehicle spacing s and speed
// difference dv = v_leader - v.
double acceleration(const BaseModel& model, const FundamentalDiagram& fd, double v, double s,
                    double dv, double dn, double dt);

Platoon step_nonstandard(const Platoon& platoon, const FundamentalDiagram& fd, double dt,
                         double lead_speed);
// First-order update with a non-anisotropic spacing stencil.
Platoon step_stencil(const Platoon& platoon, const FundamentalDiagram& fd, double dt,
                     double lead_speed, Scheme scheme);
Platoon step_explicit_explicit(const Platoon& platoon, const FundamentalDiagram& fd, double dt,
                               double lead_speed);
Platoon step_second_order(const Platoon& platoon, const BaseModel& model,
                          const FundamentalDiagram& fd, double dt, double lead_speed);
Platoon step_corrected_1(const Platoon& platoon, const BaseModel& inner,
                         const FundamentalDiagram& fd, double dt, double lead_speed);
Platoon step_corrected_2(const Platoon& platoon, const BaseModel& inner,
                         const FundamentalDiagram& fd, double dt, double lead_speed);

// Dispatches on model and scheme. Throws ConfigError for combinations other
// than (any model, AnisotropicSymplectic) or (NonstandardLwr, any scheme).
Platoon step(const Platoon& platoon, const Model& model, Scheme scheme,
             const FundamentalDiagram& fd, double dt, double lead_speed);

void check_supported(const Model& model, Scheme scheme);

Trajectory simulate(const Scenario& scenario, const Model& model,
                    Scheme scheme = Scheme::AnisotropicSymplectic,
                    const SimulationOptions& options = {});

}  // namespace nslwr
