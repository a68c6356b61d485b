#include "nslwr/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

struct Template {
  std::string_view name;
  std::string_view text;
};

constexpr std::array<Template, 10> kTemplates{{
    {"greenshields-shock-a", R"([fd]
type = greenshields
V = 20
K = 1/7
[scenario]
k1_over_K = 0.25
lead_speed_over_V = 0.375
dn = 0.0625
dt_ratio = 0.35
vehicles = 10
duration = 30
[run]
model = nonstandard
measure = shock
)"},
    {"greenshields-shock-b", R"([fd]
type = greenshields
V = 20
K = 1/7
[scenario]
k1_over_K = 0.25
lead_speed_over_V = 0.125
dn = 0.0625
dt_ratio = 0.35
vehicles = 10
duration = 30
[run]
model = nonstandard
measure = shock
)"},
    {"greenshields-queue", R"([fd]
type = greenshields
V = 20
K = 1/7
[scenario]
k1_over_K = 1
lead_speed_over_V = 1
dn = 0.0625
dt_ratio = 0.35
vehicles = 45
duration = 20
[run]
model = nonstandard
measure = startup
measure_last = 40
)"},
    {"triangular-shock-a", R"([fd]
type = triangular
V = 20
W = 5
K = 1/7
[scenario]
k1_over_K = 0.1
lead_speed_over_V = 0.375
dn = 0.0625
dt_ratio = 1.2
vehicles = 10
duration = 60
[run]
model = nonstandard
measure = shock
)"},
    {"triangular-shock-b", R"([fd]
type = triangular
V = 20
W = 5
K = 1/7
[scenario]
k1_over_K = 0.1
lead_speed_over_V = 0.0625
dn = 0.0625
dt_ratio = 1.2
vehicles = 10
duration = 60
[run]
model = nonstandard
measure = shock
)"},
    {"triangular-queue", R"([fd]
type = triangular
V = 20
W = 5
K = 1/7
[scenario]
k1_over_K = 1
lead_speed_over_V = 1
dn = 0.0625
dt_ratio = 1.2
vehicles = 45
duration = 80
[run]
model = nonstandard
measure = startup
measure_last = 40
)"},
    // Spacings near jam settle slowly (theta is about 1e-4 m/s there), hence
    // the long horizon and the recording stride.
    {"kerner-redlight", R"([fd]
type = kerner
[scenario]
k1 = 0.002
lead_speed = 0
dn = 0.1
dt_ratio = 1
vehicles = 5
duration = 20000
[run]
model = nonstandard
record_stride = 1000
)"},
    {"jwz-redlight", R"([fd]
type = triangular
V = 20
W = 5
K = 1/7
[scenario]
k1_over_K = 0.01
lead_speed = 0
initial_speed = 0
dn = 1
dt = 1
M = 20
duration = 3000
[run]
model = jwz
T = 5
c0 = 2
)"},
    {"greenshields-string-phillips", R"([fd]
type = greenshields
V = 20
K = 1/7
[run]
model = phillips
T = 5
[stability]
s0 = 14
amplitude = 0.1
omega = 0.1
vehicles = 10
dn = 1
dt = 0.1
duration = 2000
)"},
    {"greenshields-string-nonstandard", R"([fd]
type = greenshields
V = 20
K = 1/7
[run]
model = nonstandard
[stability]
s0 = 14
amplitude = 0.1
omega = 0.1
vehicles = 50
dn = 1
dt = 0.1
duration = 2000
)"},
}};

using KeyMap = std::map<std::string, std::string>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"template"}},
      {"fd", {"type", "V", "K", "S", "W", "l", "T_rel", "c1", "c2", "c3", "c4", "clamp"}},
      {"scenario",
       {"k1", "k1_over_K", "lead_speed", "lead_speed_over_V", "initial_speed", "M", "vehicles",
        "dn", "dt", "dt_ratio", "duration"}},
      {"run",
       {"model", "correction", "T", "c0", "scheme", "output_dir", "sweep", "record_stride",
        "measure", "measure_first", "measure_last", "startup_threshold"}},
      {"stability",
       {"s0", "amplitude", "omega", "vehicles", "dn", "dt", "duration", "transient_fraction"}},
  };
  return keys;
}

// Keys that are alternative spellings of one quantity.
const std::vector<std::vector<std::string>>& key_groups() {
  static const std::vector<std::vector<std::string>> groups{
      {"fd.K", "fd.S"},
      {"scenario.k1", "scenario.k1_over_K"},
      {"scenario.lead_speed", "scenario.lead_speed_over_V"},
      {"scenario.dt", "scenario.dt_ratio"},
      {"scenario.M", "scenario.vehicles"},
  };
  return groups;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

KeyMap parse_text(std::string_view text) {
  KeyMap out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed_keys().contains(section) || section.empty()) {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!allowed_keys().at(section).contains(key)) {
      throw ConfigError(where + ": unknown key '" + full + "'");
    }
    if (value.empty()) throw ConfigError(where + ": empty value for '" + full + "'");
    if (!out.emplace(full, value).second) {
      throw ConfigError(where + ": duplicate key '" + full + "'");
    }
  }
  for (const auto& group : key_groups()) {
    int present = 0;
    for (const auto& k : group) present += out.contains(k) ? 1 : 0;
    if (present > 1) {
      throw ConfigError("keys '" + group[0] + "' and '" + group[1] + "' are mutually exclusive");
    }
  }
  return out;
}

// Template values overlaid by the user's keys.
KeyMap overlay(KeyMap base, const KeyMap& user) {
  const auto type = user.find("fd.type");
  if (type != user.end() && base.contains("fd.type") && base.at("fd.type") != type->second) {
    std::erase_if(base, [](const auto& kv) { return kv.first.starts_with("fd."); });
  }
  for (const auto& group : key_groups()) {
    const bool user_sets = std::any_of(group.begin(), group.end(),
                                       [&](const std::string& k) { return user.contains(k); });
    if (user_sets) {
      for (const auto& k : group) base.erase(k);
    }
  }
  for (const auto& [k, v] : user) base[k] = v;
  return base;
}

double parse_number(const std::string& key, const std::string& text) {
  auto one = [&](std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError("key '" + key + "': '" + text + "' is not a number");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return one(text);
  const double den = one(trim(std::string_view(text).substr(slash + 1)));
  if (den == 0.0) throw ConfigError("key '" + key + "': division by zero");
  return one(trim(std::string_view(text).substr(0, slash))) / den;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

class Reader {
 public:
  explicit Reader(KeyMap keys) : keys_(std::move(keys)) {}

  bool has(const std::string& key) const { return keys_.contains(key); }

  const std::string& text(const std::string& key) {
    used_.insert(key);
    return keys_.at(key);
  }
  double number(const std::string& key) { return parse_number(key, text(key)); }
  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  int integer(const std::string& key) { return parse_int(key, text(key)); }
  int integer_or(const std::string& key, int fallback) {
    return has(key) ? integer(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  // Keys that are valid in general but meaningless in this configuration.
  void reject_unused() const {
    for (const auto& [k, v] : keys_) {
      if (k == "template" || used_.contains(k)) continue;
      throw ConfigError("key '" + k + "' does not apply to this configuration");
    }
  }

 private:
  KeyMap keys_;
  std::set<std::string> used_;
};

double positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "' must be positive");
  }
  return v;
}

FundamentalDiagram read_fd(Reader& r) {
  const std::string type = r.text("fd.type");
  auto jam_density = [&](double fallback) {
    if (r.has("fd.S")) return 1.0 / positive("fd.S", r.number("fd.S"));
    return r.number_or("fd.K", fallback);
  };
  try {
    if (type == "greenshields") {
      Greenshields p;
      p.V = r.number_or("fd.V", p.V);
      p.K = jam_density(p.K);
      return FundamentalDiagram(p);
    }
    if (type == "triangular") {
      Triangular p;
      p.V = r.number_or("fd.V", p.V);
      p.W = r.number_or("fd.W", p.W);
      p.K = jam_density(p.K);
      return FundamentalDiagram(p);
    }
    if (type == "kerner") {
      Kerner p;
      p.l = r.number_or("fd.l", p.l);
      p.T_rel = r.number_or("fd.T_rel", p.T_rel);
      p.K = jam_density(p.K);
      p.c1 = r.number_or("fd.c1", p.c1);
      p.c2 = r.number_or("fd.c2", p.c2);
      p.c3 = r.number_or("fd.c3", p.c3);
      p.c4 = r.number_or("fd.c4", p.c4);
      if (r.has("fd.clamp")) {
        const std::string c = r.text("fd.clamp");
        if (c != "true" && c != "false") throw ConfigError("key 'fd.clamp' must be true or false");
        p.clamp_nonnegative = c == "true";
      }
      return FundamentalDiagram(p);
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("[fd]: ") + e.what());
  }
  throw ConfigError("key 'fd.type': unknown diagram '" + type +
                    "' (expected greenshields, triangular or kerner)");
}

BaseModel read_base_model(Reader& r) {
  const std::string name = r.text("run.model");
  if (name == "nonstandard") return NonstandardLwr{};
  if (name == "phillips") return PhillipsRelax{positive("run.T", r.number_or("run.T", 5.0))};
  if (name == "jwz") {
    return Jwz{positive("run.T", r.number_or("run.T", 5.0)), r.number_or("run.c0", 2.0)};
  }
  throw ConfigError("key 'run.model': unknown model '" + name +
                    "' (expected nonstandard, phillips or jwz)");
}

Model read_model(Reader& r) {
  const BaseModel base = read_base_model(r);
  const std::string correction = r.has("run.correction") ? r.text("run.correction") : "none";
  if (correction == "none") return std::visit([](const auto& m) { return Model{m}; }, base);
  if (correction == "1") return Corrected1{base};
  if (correction == "2") return Corrected2{base};
  throw ConfigError("key 'run.correction': expected none, 1 or 2; got '" + correction + "'");
}

Scheme read_scheme(Reader& r) {
  if (!r.has("run.scheme")) return Scheme::AnisotropicSymplectic;
  const std::string name = r.text("run.scheme");
  for (Scheme s : {Scheme::AnisotropicSymplectic, Scheme::ForwardSpacing,
                   Scheme::ArithmeticCentral, Scheme::HarmonicCentral,
                   Scheme::ExplicitExplicit}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("key 'run.scheme': unknown scheme '" + name + "'");
}

Measure read_measure(Reader& r) {
  if (!r.has("run.measure")) return Measure::None;
  const std::string name = r.text("run.measure");
  for (Measure m : {Measure::None, Measure::Shock, Measure::Startup}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("key 'run.measure': expected none, shock or startup; got '" + name + "'");
}

std::vector<double> read_sweep(Reader& r) {
  std::vector<double> out;
  if (!r.has("run.sweep")) return out;
  std::istringstream in(r.text("run.sweep"));
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(positive("run.sweep", parse_number("run.sweep", trim(item))));
  }
  std::vector<double> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("key 'run.sweep': values must be distinct");
  }
  return out;
}

Scenario read_scenario(Reader& r, const FundamentalDiagram& fd) {
  Scenario s{fd, 0.0, 0.0, 50, 1.0, 1.0, 0.0, std::nullopt};
  const double K = fd.jam_density();
  s.k1 = r.has("scenario.k1") ? r.number("scenario.k1") : r.number("scenario.k1_over_K") * K;
  if (!(s.k1 > 0.0) || s.k1 > K * (1.0 + 1e-12)) {
    throw ConfigError("key 'scenario.k1': must lie in (0, K] with K = " + format_double(K));
  }
  s.lead_speed = r.has("scenario.lead_speed")
                     ? r.number("scenario.lead_speed")
                     : r.number("scenario.lead_speed_over_V") * fd.free_flow_speed();
  if (!(s.lead_speed >= 0.0)) throw ConfigError("key 'scenario.lead_speed' must be >= 0");
  s.initial_speed = r.optional_number("scenario.initial_speed");
  s.dn = positive("scenario.dn", r.number("scenario.dn"));
  s.dt = r.has("scenario.dt") ? positive("scenario.dt", r.number("scenario.dt"))
                              : s.dn * positive("scenario.dt_ratio", r.number("scenario.dt_ratio"));
  if (r.has("scenario.M")) {
    s.M = r.integer("scenario.M");
  } else if (r.has("scenario.vehicles")) {
    s.M = static_cast<int>(std::lround(positive("scenario.vehicles",
                                                r.number("scenario.vehicles")) / s.dn));
  }
  if (s.M < 0) throw ConfigError("key 'scenario.M' must be >= 0");
  s.duration = r.number("scenario.duration");
  if (!(s.duration >= 0.0)) throw ConfigError("key 'scenario.duration' must be >= 0");
  return s;
}

StabilitySpec read_stability(Reader& r) {
  StabilitySpec s;
  s.s0 = positive("stability.s0", r.number_or("stability.s0", s.s0));
  s.amplitude = r.number_or("stability.amplitude", s.amplitude);
  if (!(s.amplitude >= 0.0)) throw ConfigError("key 'stability.amplitude' must be >= 0");
  s.omega = positive("stability.omega", r.number_or("stability.omega", s.omega));
  s.vehicles = r.integer_or("stability.vehicles", s.vehicles);
  if (s.vehicles < 1) throw ConfigError("key 'stability.vehicles' must be >= 1");
  s.dn = positive("stability.dn", r.number_or("stability.dn", s.dn));
  s.dt = positive("stability.dt", r.number_or("stability.dt", s.dt));
  s.duration = positive("stability.duration", r.number_or("stability.duration", s.duration));
  s.transient_fraction = r.number_or("stability.transient_fraction", s.transient_fraction);
  if (!(s.transient_fraction >= 0.0 && s.transient_fraction < 1.0)) {
    throw ConfigError("key 'stability.transient_fraction' must be in [0, 1)");
  }
  return s;
}

void require_keys(const KeyMap& keys, bool need_scenario) {
  std::vector<std::vector<std::string>> required{{"fd.type"}, {"run.model"}};
  if (need_scenario) {
    required.push_back({"scenario.k1", "scenario.k1_over_K"});
    required.push_back({"scenario.lead_speed", "scenario.lead_speed_over_V"});
    required.push_back({"scenario.dn"});
    required.push_back({"scenario.dt", "scenario.dt_ratio"});
    required.push_back({"scenario.duration"});
  }
  std::string missing;
  for (const auto& alternatives : required) {
    const bool found = std::any_of(alternatives.begin(), alternatives.end(),
                                   [&](const std::string& k) { return keys.contains(k); });
    if (found) continue;
    if (!missing.empty()) missing += ", ";
    missing += alternatives[0];
    for (std::size_t i = 1; i < alternatives.size(); ++i) missing += " | " + alternatives[i];
  }
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing);
}

bool has_section(const KeyMap& keys, std::string_view section) {
  return std::any_of(keys.begin(), keys.end(), [&](const auto& kv) {
    return kv.first.starts_with(std::string(section) + ".");
  });
}

}  // namespace

std::string to_string(Measure measure) {
  switch (measure) {
    case Measure::None: return "none";
    case Measure::Shock: return "shock";
    case Measure::Startup: return "startup";
  }
  return "none";
}

std::vector<std::string> template_names() {
  std::vector<std::string> out;
  for (const auto& t : kTemplates) out.emplace_back(t.name);
  return out;
}

std::string_view template_text(std::string_view name) {
  for (const auto& t : kTemplates) {
    if (t.name == name) return t.text;
  }
  throw ConfigError("unknown template '" + std::string(name) + "'");
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

RunSpec load_spec(std::string_view text) {
  KeyMap keys = parse_text(text);
  if (keys.contains("template")) {
    keys = overlay(parse_text(template_text(keys.at("template"))), keys);
  }
  const bool stability_only = has_section(keys, "stability") && !has_section(keys, "scenario");
  require_keys(keys, !stability_only);

  Reader r(keys);
  RunSpec spec;
  spec.fd = read_fd(r);
  if (!stability_only) spec.scenario = read_scenario(r, spec.fd);
  spec.model = read_model(r);
  spec.scheme = read_scheme(r);
  try {
    check_supported(spec.model, spec.scheme);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'run.scheme': ") + e.what());
  }
  if (r.has("run.output_dir")) spec.output_dir = r.text("run.output_dir");
  spec.sweep = read_sweep(r);
  spec.record_stride = r.integer_or("run.record_stride", 1);
  if (spec.record_stride < 1) throw ConfigError("key 'run.record_stride' must be >= 1");
  spec.measure = read_measure(r);
  spec.measure_first = r.integer_or("run.measure_first", spec.measure_first);
  spec.measure_last = r.integer_or("run.measure_last", spec.measure_last);
  if (spec.measure_first < 1 || spec.measure_last < spec.measure_first) {
    throw ConfigError("keys 'run.measure_first'/'run.measure_last' need 1 <= first <= last");
  }
  spec.startup_threshold = r.optional_number("run.startup_threshold");
  if (has_section(keys, "stability")) spec.stability = read_stability(r);
  r.reject_unused();
  return spec;
}

std::string serialize(const RunSpec& spec) {
  std::ostringstream out;
  auto put = [&](std::string_view key, double v) { out << key << " = " << format_double(v) << "\n"; };

  out << "[fd]\n";
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Greenshields>) {
          out << "type = greenshields\n";
          put("V", p.V);
          put("K", p.K);
        } else if constexpr (std::is_same_v<P, Triangular>) {
          out << "type = triangular\n";
          put("V", p.V);
          put("W", p.W);
          put("K", p.K);
        } else {
          out << "type = kerner\n";
          put("l", p.l);
          put("T_rel", p.T_rel);
          put("K", p.K);
          put("c1", p.c1);
          put("c2", p.c2);
          put("c3", p.c3);
          put("c4", p.c4);
          out << "clamp = " << (p.clamp_nonnegative ? "true" : "false") << "\n";
        }
      },
      spec.fd.law());

  if (spec.scenario) {
    const Scenario& s = *spec.scenario;
    out << "[scenario]\n";
    put("k1", s.k1);
    put("lead_speed", s.lead_speed);
    if (s.initial_speed) put("initial_speed", *s.initial_speed);
    out << "M = " << s.M << "\n";
    put("dn", s.dn);
    put("dt", s.dt);
    put("duration", s.duration);
  }

  out << "[run]\n";
  const auto write_base = [&](const BaseModel& base) {
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, NonstandardLwr>) {
            out << "model = nonstandard\n";
          } else if constexpr (std::is_same_v<M, PhillipsRelax>) {
            out << "model = phillips\n";
            put("T", m.T);
          } else {
            out << "model = jwz\n";
            put("T", m.T);
            put("c0", m.c0);
          }
        },
        base);
  };
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Corrected1>) {
          write_base(m.inner);
          out << "correction = 1\n";
        } else if constexpr (std::is_same_v<M, Corrected2>) {
          write_base(m.inner);
          out << "correction = 2\n";
        } else {
          write_base(BaseModel{m});
        }
      },
      spec.model);
  out << "scheme = " << to_string(spec.scheme) << "\n";
  out << "output_dir = " << spec.output_dir << "\n";
  if (!spec.sweep.empty()) {
    out << "sweep = ";
    for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
      out << (i ? "," : "") << format_double(spec.sweep[i]);
    }
    out << "\n";
  }
  out << "record_stride = " << spec.record_stride << "\n";
  out << "measure = " << to_string(spec.measure) << "\n";
  out << "measure_first = " << spec.measure_first << "\n";
  out << "measure_last = " << spec.measure_last << "\n";
  if (spec.startup_threshold) put("startup_threshold", *spec.startup_threshold);

  if (spec.stability) {
    const StabilitySpec& s = *spec.stability;
    out << "[stability]\n";
    put("s0", s.s0);
    put("amplitude", s.amplitude);
    put("omega", s.omega);
    out << "vehicles = " << s.vehicles << "\n";
    put("dn", s.dn);
    put("dt", s.dt);
    put("duration", s.duration);
    put("transient_fraction", s.transient_fraction);
  }
  return out.str();
}

}  // namespace nslwr
