// One line per acceptance criterion; exit status is the number of failures.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "nslwr/analysis.hpp"
#include "nslwr/conditions.hpp"
#include "nslwr/experiment.hpp"
#include "nslwr/oracle.hpp"

using namespace nslwr;

namespace {

constexpr double kK7 = 1.0 / 7.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

RunResult run_template(const std::string& text) { return execute(load_spec(text)); }

double measured(const RunResult& r) { return r.wave ? r.wave->fitted_speed : NAN; }

Outcome thresholds_closed_form() {
  const auto g = FundamentalDiagram::greenshields(20.0, kK7);
  const auto t = FundamentalDiagram::triangular(20.0, 5.0, kK7);
  const double gcf = collision_free_threshold(g);
  const double gcfl = cfl_threshold(g);
  const double tcf = collision_free_threshold(t);
  const double tcfl = cfl_threshold(t);
  const bool pass = within_rel(gcf, 20.0 / 7.0, 1e-9) && within_rel(tcf, 5.0 / 7.0, 1e-9) &&
                    within_rel(gcfl, gcf, 1e-9) && within_rel(tcfl, tcf, 1e-9);
  return {pass, "greenshields cf=" + fmt("%.12f", gcf) + " cfl=" + fmt("%.12f", gcfl) +
                    "; triangular cf=" + fmt("%.12f", tcf) + " cfl=" + fmt("%.12f", tcfl)};
}

Outcome kerner_thresholds() {
  const auto k = FundamentalDiagram::kerner();
  const double cf = collision_free_threshold(k);
  const double cfl = cfl_threshold(k);
  const bool cf_ok = std::abs(cf - 0.89) <= 0.01;
  const bool cfl_ok = std::abs(cfl - 0.32) <= 0.01;
  return {cf_ok && cfl_ok, "collision-free=" + fmt("%.4f", cf) + (cf_ok ? " ok" : " FAIL") +
                               " (target 0.89+-0.01); cfl=" + fmt("%.4f", cfl) +
                               (cfl_ok ? " ok" : " FAIL") + " (target 0.32+-0.01)"};
}

Outcome triangular_shocks() {
  const double a = measured(run_template("template = triangular-shock-a\n"));
  const double b = measured(run_template("template = triangular-shock-b\n"));
  return {within_rel(a, 10.0 / 3.0, 0.02) && within_rel(b, -10.0 / 7.0, 0.02),
          "v2=3V/8: " + fmt("%.5f", a) + " (10/3); v2=V/16: " + fmt("%.5f", b) + " (-10/7)"};
}

Outcome greenshields_shocks() {
  const double a = measured(run_template("template = greenshields-shock-a\n"));
  const double b = measured(run_template("template = greenshields-shock-b\n"));
  return {within_rel(a, 2.5, 0.05) && within_rel(b, -2.5, 0.05),
          "v2=3V/8: " + fmt("%.5f", a) + " (2.5); v2=V/8: " + fmt("%.5f", b) + " (-2.5)"};
}

Outcome startup_waves() {
  const double t = measured(run_template("template = triangular-queue\n"));
  const double g = measured(run_template("template = greenshields-queue\n"));
  return {within_rel(t, -5.0, 0.05) && within_rel(g, -20.0, 0.10),
          "triangular " + fmt("%.4f", t) + " (-5, 5%); greenshields " + fmt("%.4f", g) +
              " (-20, 10%)"};
}

Outcome queue_acceleration() {
  const RunResult r = run_template(
      "template = greenshields-queue\n[run]\nmeasure = none\nmeasure_first = 1\nmeasure_last = 1\n");
  const double a = r.max_abs_accel_displayed;
  return {within_rel(a, 53.8, 0.05), "vehicle 1 max |a| = " + fmt("%.3f", a) + " m/s^2 (53.8)"};
}

Outcome kerner_redlight() {
  const RunResult ok = run_template("template = kerner-redlight\n");
  const RunResult bad = run_template("template = kerner-redlight\n[scenario]\ndt_ratio = 2\n");
  const double S = 1 / 0.18;
  const bool clean = ok.diagnostics.collision_events.empty() &&
                     ok.diagnostics.negative_speed_events.empty();
  const bool settled = within_rel(ok.terminal_spacing_min, S, 0.01) &&
                       within_rel(ok.terminal_spacing_max, S, 0.01);
  const bool broken = !bad.diagnostics.collision_events.empty() &&
                      !bad.diagnostics.negative_speed_events.empty();
  return {clean && settled && broken,
          "dt=dn: collisions=" + std::to_string(ok.diagnostics.collision_events.size()) +
              " negative=" + std::to_string(ok.diagnostics.negative_speed_events.size()) +
              " spacings " + fmt("%.4f", ok.terminal_spacing_min) + ".." +
              fmt("%.4f", ok.terminal_spacing_max) +
              "; dt=2dn: collisions=" + std::to_string(bad.diagnostics.collision_events.size()) +
              " negative=" + std::to_string(bad.diagnostics.negative_speed_events.size())};
}

bool collides(const Platoon& p, const FundamentalDiagram& fd) {
  for (std::size_t m = 1; m < p.size(); ++m) {
    if (p.positions[m - 1] - p.positions[m] < fd.jam_spacing() * p.dn - kCollisionSlack) return true;
  }
  return false;
}

Outcome scheme_failures() {
  const auto fd = FundamentalDiagram::greenshields(20.0, kK7);
  const double dn = 1.0;
  const double dt = 0.35;  // collision-free for the anisotropic scheme
  std::string detail;
  bool pass = true;

  // Stopped leader, vehicle 1 at exactly S dn behind it, the rest spaced
  // 3 S dn apart and moving.
  Platoon start;
  start.dn = dn;
  start.positions = {0.0, -7.0, -28.0, -49.0, -70.0};
  start.speeds = {0.0, 0.0, 15.0, 15.0, 15.0};
  for (Scheme s : {Scheme::ForwardSpacing, Scheme::ArithmeticCentral, Scheme::HarmonicCentral}) {
    Platoon p = start;
    int hit = 0;
    for (int n = 1; n <= 2 && !hit; ++n) {
      p = step(p, NonstandardLwr{}, s, fd, dt, 0.0);
      if (collides(p, fd)) hit = n;
    }
    pass = pass && hit > 0;
    detail += to_string(s) + (hit ? " step " + std::to_string(hit) : " none") + "; ";
  }
  {
    // Same state, but one step earlier vehicle 1 was 3 S dn behind.
    Platoon p = start;
    p.prev_positions = {0.0, -21.0, -42.0, -63.0, -84.0};
    int hit = 0;
    for (int n = 1; n <= 2 && !hit; ++n) {
      p = step(p, NonstandardLwr{}, Scheme::ExplicitExplicit, fd, dt, 0.0);
      if (collides(p, fd)) hit = n;
    }
    pass = pass && hit > 0;
    detail += std::string("explicit-explicit") + (hit ? " step " + std::to_string(hit) : " none");
  }
  {
    Platoon p = start;
    int hits = 0;
    for (int n = 0; n < 10000; ++n) {
      p = step(p, NonstandardLwr{}, Scheme::AnisotropicSymplectic, fd, dt, 0.0);
      hits += collides(p, fd) ? 1 : 0;
    }
    pass = pass && hits == 0;
    detail += "; anisotropic collisions in 1e4 steps: " + std::to_string(hits);
  }
  return {pass, detail};
}

Outcome jwz_corrections() {
  const RunResult raw = run_template("template = jwz-redlight\n");
  const RunResult c1 = run_template("template = jwz-redlight\n[run]\ncorrection = 1\n");
  const RunResult c2 = run_template("template = jwz-redlight\n[run]\ncorrection = 2\n");
  auto clean_and_jammed = [](const RunResult& r) {
    return r.clean() && within_rel(r.terminal_spacing_min, 7.0, 0.01) &&
           within_rel(r.terminal_spacing_max, 7.0, 0.01);
  };
  const bool raw_bad = !raw.diagnostics.collision_events.empty() &&
                       !raw.diagnostics.negative_speed_events.empty();
  auto describe = [](const RunResult& r) {
    return "collisions=" + std::to_string(r.diagnostics.collision_events.size()) +
           " negative=" + std::to_string(r.diagnostics.negative_speed_events.size()) +
           " spacing " + fmt("%.4f", r.terminal_spacing_min) + ".." +
           fmt("%.4f", r.terminal_spacing_max);
  };
  return {raw_bad && clean_and_jammed(c1) && clean_and_jammed(c2),
          "raw: " + describe(raw) + "; c1: " + describe(c1) + "; c2: " + describe(c2)};
}

Outcome equivalences() {
  const RunSpec spec = load_spec("template = greenshields-shock-a\n");
  const Scenario& s = *spec.scenario;
  const Trajectory ns = simulate(s, NonstandardLwr{});
  const Trajectory ph = simulate(s, PhillipsRelax{s.dt});
  const Trajectory c1 = simulate(s, Corrected1{NonstandardLwr{}});
  const bool exact = ns.positions == ph.positions && ns.speeds == ph.speeds;
  double diff = 0.0;
  for (std::size_t j = 0; j < ns.frames(); ++j) {
    for (std::size_t m = 0; m < ns.vehicles(); ++m) {
      diff = std::max(diff, std::abs(ns.positions[j][m] - c1.positions[j][m]));
      diff = std::max(diff, std::abs(ns.speeds[j][m] - c1.speeds[j][m]));
    }
  }
  return {exact && diff <= 1e-12, std::string("phillips(T=dt) identical: ") +
                                      (exact ? "yes" : "no") +
                                      "; corrected1 max diff " + fmt("%.3g", diff)};
}

Outcome string_stability() {
  const auto phillips =
      string_stability_experiment(stability_setup(load_spec("template = greenshields-string-phillips\n")));
  const auto nonstandard = string_stability_experiment(
      stability_setup(load_spec("template = greenshields-string-nonstandard\n")));
  return {within_rel(phillips.amplification_ratio, phillips.predicted_ratio, 0.2) &&
              nonstandard.amplification_ratio <= 1.02,
          "phillips " + fmt("%.4f", phillips.amplification_ratio) + " vs predicted " +
              fmt("%.4f", phillips.predicted_ratio) + "; nonstandard " +
              fmt("%.4f", nonstandard.amplification_ratio) + " (<= 1.02)"};
}

Outcome instability_analyzers() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto fd = FundamentalDiagram::greenshields(20.0, kK7);
  double worst_im = INFINITY;
  double worst_d = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double k0 = kK7 * (1e-3 + (1 - 2e-3) * unit(rng));
    const double T = 0.1 + 9.9 * unit(rng);
    const double m = 0.01 + 0.99 * unit(rng);
    const auto roots = eulerian_dispersion_roots(fd, k0, T, m);
    worst_im = std::min(worst_im, std::max(roots[0].imag(), roots[1].imag()));
    worst_d = std::max(worst_d, diffusion_coefficient(fd, k0, T));
  }
  return {worst_im >= -1e-12 && worst_d <= 0.0,
          "min over draws of max Im = " + fmt("%.4g", worst_im) +
              "; max diffusion coefficient = " + fmt("%.4g", worst_d)};
}

Outcome oracle_consistency() {
  const auto g = FundamentalDiagram::greenshields(20.0, kK7);
  const auto t = FundamentalDiagram::triangular(20.0, 5.0, kK7);
  struct Case {
    const FundamentalDiagram* fd;
    double k1, k2, dt;
  };
  // dt divides every vehicle's shock-meeting time s1 dn / (v1 - sigma).
  const Case cases[] = {{&g, kK7 / 4, 5 * kK7 / 8, 0.07},
                        {&g, kK7 / 4, 7 * kK7 / 8, 0.1},
                        {&t, kK7 / 10, kK7 / 2.5, 0.1},
                        {&t, kK7 / 10, 4 * kK7 / 5, 49.0 / 600.0}};
  double worst = 0.0;
  for (const Case& c : cases) {
    const double sigma = shock_speed_rh(*c.fd, c.k1, c.k2);
    const Trajectory traj = synthetic_shock_trajectory(*c.fd, c.k1, c.k2, 8, 1.0, 60.0, c.dt);
    const auto w = measure_front_speed(traj, c.fd->eta(c.k1), c.fd->eta(c.k2));
    worst = std::max(worst, std::abs(w.fitted_speed - sigma));
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const FundamentalDiagram& fd = i % 2 ? t : g;
    const double a = fd.jam_density() * unit(rng);
    const double b = fd.jam_density() * unit(rng);
    if (a == b) continue;
    const double k1 = std::min(a, b);
    const double k2 = std::max(a, b);
    const double sigma = shock_speed_rh(fd, k1, k2);
    // Round-off of the difference quotient grows like 1/(k2 - k1).
    const double tol = 1e-14 * fd.free_flow_speed() * fd.jam_density() / (k2 - k1) + 1e-12;
    if (!(fd.phi_prime(k2) <= sigma + tol && sigma <= fd.phi_prime(k1) + tol)) ++violations;
  }
  return {worst <= 1e-9 && violations == 0,
          "max |fitted - sigma| = " + fmt("%.3g", worst) +
              "; Lax violations in 1000 pairs: " + std::to_string(violations)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"threshold closed forms and equivalence", thresholds_closed_form},
      {"kerner thresholds", kerner_thresholds},
      {"triangular shock speeds", triangular_shocks},
      {"greenshields shock speeds", greenshields_shocks},
      {"queue discharge startup waves", startup_waves},
      {"queue discharge max acceleration", queue_acceleration},
      {"kerner red light", kerner_redlight},
      {"rival schemes collide", scheme_failures},
      {"jwz and its corrections", jwz_corrections},
      {"phillips / corrected equivalence", equivalences},
      {"string stability", string_stability},
      {"eulerian instability analyzers", instability_analyzers},
      {"oracle self-consistency", oracle_consistency},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures;
}
