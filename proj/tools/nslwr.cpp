#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nslwr/errors.hpp"
#include "nslwr/experiment.hpp"

namespace {

// A path to a config file, or the name of a bundled template.
std::string read_config(const std::string& source) {
  if (std::filesystem::exists(source)) {
    std::ifstream in(source);
    if (!in) throw nslwr::ConfigError("cannot read " + source);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  }
  nslwr::template_text(source);  // throws for unknown names
  return "template = " + source + "\n";
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !(v > 0.0)) {
      throw nslwr::ConfigError("--dn: '" + item + "' is not a positive number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian LWR platoon simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool expect_clean = false;
  std::string dn_list;

  auto* run = app.add_subcommand("run", "simulate a scenario and write CSV + summary");
  run->add_option("config", config, "config file or template name")->required();
  run->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
  run->add_flag("--expect-clean", expect_clean, "exit 2 if collisions or negative speeds occur");

  auto* sweep = app.add_subcommand("sweep", "re-run at several dn with dt/dn fixed");
  sweep->add_option("config", config, "config file or template name")->required();
  sweep->add_option("--dn", dn_list, "comma-separated dn values (default: run.sweep)");
  sweep->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
  sweep->add_flag("--expect-clean", expect_clean, "exit 2 if any entry is not clean");

  auto* thresholds = app.add_subcommand("thresholds", "step-size thresholds of the diagram");
  thresholds->add_option("config", config, "config file or template name")->required();

  auto* stability = app.add_subcommand("stability", "string-stability experiment");
  stability->add_option("config", config, "config file or template name")->required();

  auto* templates = app.add_subcommand("templates", "list bundled templates");
  std::string show;
  templates->add_option("name", show, "print this template");

  CLI11_PARSE(app, argc, argv);

  try {
    if (templates->parsed()) {
      if (!show.empty()) {
        std::cout << nslwr::template_text(show);
      } else {
        for (const auto& name : nslwr::template_names()) std::cout << name << "\n";
      }
      return 0;
    }

    const nslwr::RunSpec spec = nslwr::load_spec(read_config(config));
    const std::filesystem::path out = out_dir.empty() ? spec.output_dir : out_dir;

    if (run->parsed()) {
      const nslwr::RunResult result = nslwr::execute(spec);
      nslwr::write_run(out, spec, result);
      std::cout << nslwr::summary_text(spec, result);
      return expect_clean && !result.clean() ? 2 : 0;
    }
    if (sweep->parsed()) {
      const std::vector<double> dns = dn_list.empty() ? spec.sweep : parse_list(dn_list);
      if (dns.empty()) throw nslwr::ConfigError("no dn values: pass --dn or set run.sweep");
      const auto rows = nslwr::sweep(spec, dns, out);
      const std::string table = nslwr::sweep_table(rows);
      std::ofstream(out / "sweep.csv") << table;
      std::cout << table;
      const bool dirty = std::any_of(rows.begin(), rows.end(), [](const auto& r) {
        return r.collision_count > 0 || r.negative_speed_count > 0;
      });
      return expect_clean && dirty ? 2 : 0;
    }
    if (thresholds->parsed()) {
      const double dn = spec.scenario ? spec.scenario->dn : 1.0;
      const double dt = spec.scenario ? spec.scenario->dt : 1.0;
      const auto report = nslwr::validate_step_sizes(spec.fd, dn, dt);
      std::cout << "fd=" << spec.fd.type_name() << "\n"
                << "collision_free_threshold=" << nslwr::format_double(report.collision_free_threshold) << "\n"
                << "cfl_threshold=" << nslwr::format_double(report.cfl_threshold) << "\n"
                << "concave=" << (report.concave ? "true" : "false") << "\n";
      if (spec.scenario) {
        std::cout << "rate=" << nslwr::format_double(dn / dt) << "\n"
                  << "collision_free_ok=" << (report.collision_free_ok ? "true" : "false") << "\n"
                  << "cfl_ok=" << (report.cfl_ok ? "true" : "false") << "\n";
      }
      return 0;
    }
    if (stability->parsed()) {
      const auto result = nslwr::string_stability_experiment(nslwr::stability_setup(spec));
      std::cout << nslwr::stability_text(result);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
