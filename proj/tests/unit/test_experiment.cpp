#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nslwr/errors.hpp"
#include "nslwr/experiment.hpp"

using namespace nslwr;

namespace {

RunSpec small_shock() {
  return load_spec(R"(template = triangular-shock-a
[scenario]
dn = 0.25
vehicles = 6
duration = 40
)");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("trajectory csv") {
  const RunResult r = execute(small_shock());
  std::ostringstream a;
  std::ostringstream b;
  write_trajectory_csv(a, r.trajectory);
  write_trajectory_csv(b, execute(small_shock()).trajectory);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,vehicle,N,x,v,a");
  std::size_t rows = 0;
  std::vector<std::string> last;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 6);
    const std::size_t j = rows / r.trajectory.vehicles();
    const std::size_t m = rows % r.trajectory.vehicles();
    // 17 significant digits read back to the stored doubles.
    REQUIRE(std::stod(cells[3]) == r.trajectory.positions[j][m]);
    REQUIRE(std::stod(cells[4]) == r.trajectory.speeds[j][m]);
    CHECK(std::stoi(cells[1]) == static_cast<int>(m));
    last = cells;
    ++rows;
  }
  CHECK(rows == r.trajectory.frames() * r.trajectory.vehicles());
  CHECK(last[5].empty());
}

TEST_CASE("summary keys") {
  const RunSpec spec = small_shock();
  const RunResult r = execute(spec);
  const std::string text = summary_text(spec, r);
  for (const char* key : {"measured_shock_speed=", "r_squared=", "min_spacing=",
                          "collision_count=0", "negative_speed_count=0", "max_abs_accel=",
                          "collision_free_threshold=", "cfl_threshold=", "theoretical_speed="}) {
    CHECK(text.find(key) != std::string::npos);
  }
  REQUIRE(r.wave);
  CHECK(r.wave->fitted_speed == doctest::Approx(10.0 / 3.0).epsilon(0.02));
  CHECK(r.clean());
}

TEST_CASE("write_run and unwritable paths") {
  const auto dir = std::filesystem::temp_directory_path() / "nslwr_unit_run";
  std::filesystem::remove_all(dir);
  const RunSpec spec = small_shock();
  const RunResult r = execute(spec);
  write_run(dir, spec, r);
  CHECK(std::filesystem::exists(dir / "trajectory.csv"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS(write_run(dir / "blocker" / "sub", spec, r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("rescale keeps dt/dn and the platoon length") {
  const RunSpec spec = small_shock();
  const RunSpec half = rescale(spec, 0.125);
  CHECK(half.scenario->dn == 0.125);
  CHECK(half.scenario->dt == doctest::Approx(0.15));
  CHECK(half.scenario->M == 48);
  CHECK_THROWS_AS(rescale(spec, 0.0), ArgumentError);
}

TEST_CASE("single-entry sweep equals a run") {
  const RunSpec spec = small_shock();
  const std::vector<double> dns{0.25};
  const auto rows = sweep(spec, dns);
  REQUIRE(rows.size() == 1);
  const RunResult r = execute(spec);
  CHECK(rows[0].measured_speed == r.wave->fitted_speed);
  CHECK(rows[0].min_spacing == r.diagnostics.min_spacing);
  CHECK(rows[0].max_abs_accel_displayed == r.max_abs_accel_displayed);
  CHECK_FALSE(rows[0].max_position_gap);
  CHECK(sweep_table(rows).find("dn,dt,M,measured_speed") == 0);
}

TEST_CASE("triangular shock sweep converges") {
  const RunSpec spec = load_spec("template = triangular-shock-a\n");
  const std::vector<double> dns{1.0, 0.5, 0.25, 0.125, 0.0625};
  const auto rows = sweep(spec, dns);
  REQUIRE(rows.size() == 5);
  for (const SweepRow& row : rows) {
    REQUIRE(row.measured_speed);
    CHECK(*row.measured_speed == doctest::Approx(10.0 / 3.0).epsilon(0.02));
    CHECK(row.collision_count == 0);
  }
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(*rows[i].max_position_gap < *rows[i - 1].max_position_gap);
  }
}

TEST_CASE("stability setup") {
  const RunSpec spec = load_spec("template = greenshields-string-nonstandard\n");
  const StringStabilitySetup setup = stability_setup(spec);
  CHECK(setup.s0 == 14.0);
  CHECK(std::holds_alternative<NonstandardLwr>(setup.model));
  CHECK_THROWS_AS(stability_setup(load_spec("template = greenshields-shock-a\n")), ConfigError);
  CHECK_THROWS_AS(execute(spec), ConfigError);
}

}
