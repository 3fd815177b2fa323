#include "fdstokes/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

namespace fdstokes {

ConfigError::ConfigError(const std::string& key, const std::string& message)
    : std::invalid_argument(key.empty() ? message : "config key '" + key + "': " + message),
      key_(key) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

constexpr std::array<const char*, 24> kKeys{
    "variant", "fe", "gamma0", "theta", "gamma", "theta_min", "viscous_factor", "center",
    "radius", "n", "subsegments", "volume_degree", "interface_degree", "error_degree", "out",
    "dump_mesh", "dump_geometry", "emit_matrix", "probe_infsup", "threads", "seed", "singular",
    "runs", "config"};

FeTriple parse_fe(const std::string& key, const std::string& value) {
  const auto d = parse_int_list(key, value);
  if (d.size() != 3) throw ConfigError(key, "expected three degrees a,b,c");
  return {d[0], d[1], d[2]};
}

MethodConfig with_parameters(const std::string& key, Variant v, FeTriple fe, const MethodConfig& params) {
  MethodConfig c;
  try {
    c = MethodConfig::make(v, fe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
  c.gamma0 = params.gamma0;
  c.theta = params.theta;
  c.gamma = params.gamma;
  c.theta_min = params.theta_min;
  c.viscous_factor = params.viscous_factor;
  return c;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split(value, ',')) {
    if (item.empty()) throw ConfigError(key, "empty list entry in '" + value + "'");
    out.push_back(to_int(key, item));
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

Assignments parse_config_text(const std::string& text) {
  Assignments out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

Assignments parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig make_run_config(const Assignments& assignments) {
  RunConfig rc;
  std::map<std::string, std::string> last;
  for (const auto& [key, value] : assignments) {
    if (std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) ==
            kKeys.end() ||
        key == "config") {
      throw ConfigError(key, "unknown key");
    }
    last[key] = value;
  }
  auto has = [&](const char* k) { return last.count(k) != 0; };

  Variant variant = Variant::NoStab;
  FeTriple fe{2, 1, 1};
  if (has("variant")) {
    try {
      variant = parse_variant(last["variant"]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("variant", e.what());
    }
  }
  if (has("fe")) fe = parse_fe("fe", last["fe"]);
  try {
    rc.method = MethodConfig::make(variant, fe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(has("fe") ? "fe" : "variant", e.what());
  }

  if (has("gamma0")) rc.method.gamma0 = to_double("gamma0", last["gamma0"]);
  if (has("theta")) rc.method.theta = to_double("theta", last["theta"]);
  if (has("gamma")) rc.method.gamma = to_double("gamma", last["gamma"]);
  if (has("theta_min")) rc.method.theta_min = to_double("theta_min", last["theta_min"]);
  if (has("viscous_factor")) {
    rc.method.viscous_factor = to_int("viscous_factor", last["viscous_factor"]);
  }
  try {
    rc.method.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("method", e.what());
  }
  rc.runs = {rc.method};
  if (has("runs")) {
    rc.runs.clear();
    for (const auto& item : split(last["runs"], ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("runs", "expected VARIANT:a,b,c, got '" + item + "'");
      Variant v;
      try {
        v = parse_variant(trim(item.substr(0, colon)));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("runs", e.what());
      }
      rc.runs.push_back(with_parameters("runs", v, parse_fe("runs", item.substr(colon + 1)), rc.method));
    }
    if (rc.runs.empty()) throw ConfigError("runs", "empty list");
    rc.method = rc.runs.front();
  }

  if (has("radius")) rc.geometry.radius = to_double("radius", last["radius"]);
  if (has("center")) {
    const auto parts = split(last["center"], ',');
    if (parts.size() != 2) throw ConfigError("center", "expected X,Y");
    rc.geometry.center = Point(to_double("center", parts[0]), to_double("center", parts[1]));
  }
  try {
    rc.geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(has("radius") ? "radius" : "center", e.what());
  }

  if (has("n")) {
    rc.n_list = parse_int_list("n", last["n"]);
    for (int n : rc.n_list) {
      if (n < 1) throw ConfigError("n", "mesh sizes must be >= 1");
    }
  }
  if (has("subsegments")) {
    rc.subsegments = to_int("subsegments", last["subsegments"]);
    if (rc.subsegments < 1) throw ConfigError("subsegments", "must be >= 1");
  }
  auto degree = [&](const char* key, int& target) {
    if (!has(key)) return;
    target = to_int(key, last[key]);
    if (target < 1 || target > 6) throw ConfigError(key, "must lie in [1, 6]");
  };
  degree("volume_degree", rc.degrees.volume);
  degree("interface_degree", rc.degrees.interface);
  degree("error_degree", rc.degrees.error);
  if (has("out")) rc.out = last["out"];
  if (has("dump_mesh")) rc.dump_mesh = last["dump_mesh"];
  if (has("dump_geometry")) rc.dump_geometry = last["dump_geometry"];
  if (has("emit_matrix")) rc.emit_matrix = to_bool("emit_matrix", last["emit_matrix"]);
  if (has("probe_infsup")) rc.probe_infsup = to_bool("probe_infsup", last["probe_infsup"]);
  if (has("threads")) rc.threads = to_int("threads", last["threads"]);
  if (has("seed")) rc.seed = static_cast<unsigned>(to_int("seed", last["seed"]));
  if (has("singular")) {
    const std::string& s = last["singular"];
    if (s == "least-squares") rc.least_squares_fallback = true;
    else if (s == "fail") rc.least_squares_fallback = false;
    else throw ConfigError("singular", "expected least-squares or fail, got '" + s + "'");
  }
  return rc;
}

std::string run_output_path(const RunConfig& rc, std::size_t run) {
  if (rc.runs.size() == 1) return rc.out;
  const auto dot = rc.out.find_last_of('.');
  const auto slash = rc.out.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? rc.out.substr(0, dot) : rc.out;
  const std::string ext = has_ext ? rc.out.substr(dot) : "";
  const FeTriple& fe = rc.runs[run].fe;
  return stem + "_" + std::string(to_string(rc.runs[run].variant)) + "_" + std::to_string(fe.velocity) +
         std::to_string(fe.pressure) + std::to_string(fe.multiplier) + ext;
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Unfitted fictitious-domain Stokes solver: convergence sweeps"};
  app.allow_extras(false);
  std::map<std::string, std::string> values;
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::array<Flag, 21> options{{
      {"--config", "config", "flat key=value config file"},
      {"--variant", "variant", "method variant"},
      {"--fe", "fe", "FE degrees velocity,pressure,multiplier"},
      {"--n", "n", "comma-separated mesh sizes"},
      {"--gamma0", "gamma0", "interface traction penalty"},
      {"--theta", "theta", "pressure stabilization parameter"},
      {"--gamma", "gamma", "multiplier stabilization parameter"},
      {"--theta-min", "theta_min", "good-element fluid fraction threshold"},
      {"--viscous-factor", "viscous_factor", "factor on D(u)n in the traction penalty (1 or 2)"},
      {"--radius", "radius", "disk radius"},
      {"--center", "center", "disk center X,Y"},
      {"--subsegments", "subsegments", "chords per interface arc"},
      {"--out", "out", "CSV output path"},
      {"--dump-mesh", "dump_mesh", "write the mesh of the first n as text"},
      {"--dump-geometry", "dump_geometry", "write the cut geometry of the first n as text"},
      {"--threads", "threads", "OpenMP threads (0 = runtime default)"},
      {"--seed", "seed", "random seed"},
      {"--singular", "singular", "least-squares or fail"},
      {"--volume-degree", "volume_degree", "volume quadrature degree"},
      {"--error-degree", "error_degree", "error quadrature degree"},
      {"--runs", "runs", "several sweeps, VARIANT:a,b,c;VARIANT:a,b,c"},
  }};
  for (const auto& f : options) {
    app.add_option_function<std::string>(
        f.name, [&values, key = std::string(f.key)](const std::string& v) { values[key] = v; },
        f.help);
  }
  bool emit = false;
  bool probe = false;
  app.add_flag("--emit-matrix", emit, "write the system matrix per mesh (Matrix Market)");
  app.add_flag("--probe-infsup", probe, "add an inf-sup estimate column (n <= 16)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("", e.what());
  }

  Assignments all;
  if (auto it = values.find("config"); it != values.end()) {
    all = parse_config_file(it->second);
    values.erase(it);
  }
  for (const auto& [k, v] : values) all.emplace_back(k, v);
  if (emit) all.emplace_back("emit_matrix", "true");
  if (probe) all.emplace_back("probe_infsup", "true");
  return make_run_config(all);
}

}  // namespace fdstokes
