#include <cmath>
#include <random>

#include "doctest.h"
#include "nslwr/errors.hpp"
#include "nslwr/oracle.hpp"

using namespace nslwr;

namespace {

const double K7 = 1.0 / 7.0;
const FundamentalDiagram kGreen = FundamentalDiagram::greenshields(20.0, K7);
const FundamentalDiagram kTri = FundamentalDiagram::triangular(20.0, 5.0, K7);

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("Rankine-Hugoniot speeds") {
  CHECK(shock_speed_rh(kGreen, K7 / 4, 5 * K7 / 8) == doctest::Approx(2.5));
  CHECK(shock_speed_rh(kGreen, K7 / 4, 7 * K7 / 8) == doctest::Approx(-2.5));
  CHECK(shock_speed_rh(kTri, K7 / 10, 4 * K7 / 5) == doctest::Approx(-10.0 / 7.0));
  CHECK_THROWS_AS(shock_speed_rh(kGreen, 0.05, 0.05), ArgumentError);
  CHECK_THROWS_AS(shock_speed_rh(kGreen, 0.05, 0.2), ArgumentError);
}

TEST_CASE("Riemann waves") {
  const WaveSolution g = riemann_wave(kGreen, K7, 0.0);
  REQUIRE(g.is_rarefaction());
  CHECK(std::get<Rarefaction>(g.kind).lo == doctest::Approx(-20.0));
  CHECK(std::get<Rarefaction>(g.kind).hi == doctest::Approx(20.0));

  const WaveSolution t = riemann_wave(kTri, K7, 0.0);
  REQUIRE(t.is_shock());
  CHECK(std::get<Shock>(t.kind).speed == doctest::Approx(-5.0));
  CHECK(std::get<Shock>(t.kind).degenerate);

  const WaveSolution partial = riemann_wave(kTri, K7 / 2, K7 / 10);
  REQUIRE(partial.is_shock());
  CHECK(std::get<Shock>(partial.kind).speed == doctest::Approx(-5.0));
  const WaveSolution free = riemann_wave(kTri, K7 / 40, K7 / 50);
  REQUIRE(free.is_shock());
  CHECK(std::get<Shock>(free.kind).speed == doctest::Approx(20.0));

  const WaveSolution fan = riemann_wave(kGreen, K7 / 2, K7 / 10);
  REQUIRE(fan.is_rarefaction());
  CHECK(std::get<Rarefaction>(fan.kind).lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::get<Rarefaction>(fan.kind).hi == doctest::Approx(16.0));

  const WaveSolution s = riemann_wave(kGreen, K7 / 4, 5 * K7 / 8);
  REQUIRE(s.is_shock());
  CHECK(std::get<Shock>(s.kind).speed == doctest::Approx(2.5));
  CHECK_FALSE(std::get<Shock>(s.kind).degenerate);

  CHECK(riemann_wave(kGreen, 0.05, 0.05).is_uniform());
  CHECK_THROWS_AS(riemann_wave(FundamentalDiagram::kerner(), 0.01, 0.1), UnsupportedDiagram);
}

TEST_CASE("Lax admissibility on random pairs") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const FundamentalDiagram& fd = i % 2 ? kTri : kGreen;
    double a = fd.jam_density() * unit(rng);
    double b = fd.jam_density() * unit(rng);
    if (a == b) continue;
    const double k1 = std::min(a, b);
    const double k2 = std::max(a, b);
    const double sigma = shock_speed_rh(fd, k1, k2);
    // Round-off of the difference quotient grows like 1/(k2 - k1).
    const double tol = 1e-14 * fd.free_flow_speed() * fd.jam_density() / (k2 - k1) + 1e-12;
    REQUIRE(fd.phi_prime(k2) <= sigma + tol);
    REQUIRE(sigma <= fd.phi_prime(k1) + tol);

    const WaveSolution forward = riemann_wave(fd, k1, k2);
    const WaveSolution backward = riemann_wave(fd, k2, k1);
    REQUIRE(forward.is_shock());
    const bool backward_real_shock =
        backward.is_shock() && !std::get<Shock>(backward.kind).degenerate;
    REQUIRE_FALSE(backward_real_shock);
    if (backward.is_rarefaction()) {
      const auto& r = std::get<Rarefaction>(backward.kind);
      REQUIRE(r.lo <= r.hi);
    }
  }
}

TEST_CASE("density_for_speed inverts eta") {
  CHECK(density_for_speed(kGreen, 7.5) == doctest::Approx(5 * K7 / 8).epsilon(1e-12));
  CHECK(density_for_speed(kTri, 7.5) == doctest::Approx(K7 / 2.5).epsilon(1e-12));
  CHECK(density_for_speed(kTri, 20.0) == 0.0);
  CHECK(density_for_speed(kGreen, 0.0) == doctest::Approx(K7));
}

TEST_CASE("synthetic shock trajectory") {
  const Trajectory t = synthetic_shock_trajectory(kGreen, K7 / 4, 5 * K7 / 8, 4, 1.0, 20.0, 0.07);
  // Vehicle 1 kinks at t = 28 / 12.5 = 2.24 s, on the line x = 2.5 t.
  const std::size_t j = 32;
  CHECK(t.times[j] == doctest::Approx(2.24));
  CHECK(t.positions[j][1] == doctest::Approx(2.5 * 2.24).epsilon(1e-12));
  CHECK(t.speeds[j][1] == doctest::Approx(15.0));
  CHECK(t.speeds[j + 1][1] == doctest::Approx(7.5));
  CHECK(t.speeds[0][0] == 7.5);

  const Trajectory early = synthetic_shock_trajectory(kGreen, K7 / 4, 5 * K7 / 8, 4, 1.0, 2.0, 0.1);
  for (std::size_t f = 0; f < early.frames(); ++f) {
    for (int m = 1; m <= 4; ++m) {
      CHECK(early.positions[f][m] == doctest::Approx(-28.0 * m + 15.0 * early.times[f]));
    }
  }
  CHECK_THROWS_AS(synthetic_shock_trajectory(kGreen, K7 / 2, K7 / 4, 4, 1.0, 2.0, 0.1),
                  ArgumentError);
  CHECK_THROWS_AS(synthetic_shock_trajectory(FundamentalDiagram::kerner(), 0.01, 0.1, 4, 1.0, 2.0, 0.1),
                  UnsupportedDiagram);
}

}
