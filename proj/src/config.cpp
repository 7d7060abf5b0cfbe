#include "pulsefront/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = [] {
    std::vector<KeySpec> k = {
        {"advection.amplitude", KeyType::Number, "0", "strength of the built-in flow"},
        {"advection.family", KeyType::String, "zero", "zero | cellular | shear | linear_x | csv"},
        {"advection.path", KeyType::String, "", "CSV with columns i,j,qx,qy"},
        {"bounds.cut", KeyType::Integer, "4", "Fourier cut K of the phase log psi"},
        {"bounds.delta0", KeyType::Number, "0.5", "initial coordinate search half-width"},
        {"bounds.family", KeyType::String, "auto", "auto | exp_sigmoid | planar_profile"},
        {"bounds.golden_iters", KeyType::Integer, "16", "golden-section steps per line search"},
        {"bounds.lambda0", KeyType::Number, "1", "starting lambda"},
        {"bounds.warm_start", KeyType::Bool, "true", "KPP: start from lambda* and the projected eigenfunction"},
        {"bounds.prescan", KeyType::Bool, "true", "wide golden search in log lambda first"},
        {"bounds.restarts", KeyType::Integer, "0", "random restarts drawn from the seed"},
        {"bounds.s_samples", KeyType::Integer, "257", "s-lattice size for R"},
        {"bounds.sweeps", KeyType::Integer, "3", "coordinate-descent sweeps"},
        {"cell.dim", KeyType::Integer, "1", "1 or 2"},
        {"cell.geometry", KeyType::String, "torus", "torus | cylinder"},
        {"cell.height", KeyType::Number, "1", "cylinder height H"},
        {"cell.period_x", KeyType::Number, "1", "period along x"},
        {"cell.period_y", KeyType::Number, "1", "period along y (2-D torus)"},
        {"diffusion.axx", KeyType::Number, "1", "A_xx"},
        {"diffusion.axy", KeyType::Number, "0", "A_xy = A_yx (constant family)"},
        {"diffusion.ayy", KeyType::Number, "1", "A_yy"},
        {"diffusion.family", KeyType::String, "constant", "constant | modulated | csv"},
        {"diffusion.mod_x", KeyType::Number, "0", "A_xx factor 1 + mod_x cos(2 pi x / L_x)"},
        {"diffusion.mod_y", KeyType::Number, "0", "A_xx factor 1 + mod_y cos(k y), k = 2 pi / L_y or pi / H"},
        {"diffusion.path", KeyType::String, "", "CSV with columns i,j,axx,axy,ayx,ayy"},
        {"direction.x", KeyType::Number, "1", "propagation direction, x component"},
        {"direction.y", KeyType::Number, "0", "propagation direction, y component"},
        {"eigen.lambda_start", KeyType::Number, "1", "first lambda of the bracket search"},
        {"eigen.tol", KeyType::Number, "1e-9", "eigenvalue enclosure tolerance"},
        {"eigen.upwind", KeyType::Bool, "true", "upwind drift (M-matrix) or centered"},
        {"grid.nx", KeyType::Integer, "64", "nodes along x"},
        {"grid.ny", KeyType::Integer, "1", "nodes along y"},
        {"output.dir", KeyType::String, "out", "output directory"},
        {"output.wall_time", KeyType::Bool, "true", "record wall times; false writes 0"},
        {"reaction.amplitude", KeyType::Number, "0", "h(x) = scale (1 + amplitude sin(2 pi x / L_x))"},
        {"reaction.class", KeyType::String, "", "claimed class; empty uses the profile's own"},
        {"reaction.cutoff", KeyType::Number, "0", "ignition cut-off theta applied to the source; 0 disables"},
        {"reaction.family", KeyType::String, "fisher", "fisher | ignition | zfk_cubic"},
        {"reaction.path", KeyType::String, "", "CSV with columns i,j,h replacing the built-in h"},
        {"reaction.scale", KeyType::Number, "1", "mean of h"},
        {"reaction.theta", KeyType::Number, "0.3", "ignition temperature of the ignition family"},
        {"routes", KeyType::List, "eigenvalue,upper_bound,simulation", "routes run by `speed`"},
        {"seed", KeyType::Integer, "1", "optimizer restart seed"},
        {"sim.amplitude", KeyType::Number, "1", "height of the Heaviside datum"},
        {"sim.clamped", KeyType::Bool, "true", "Dirichlet ends (u = 0 left, u = 1 right)"},
        {"sim.dt", KeyType::Number, "0.01", "time step"},
        {"sim.initial", KeyType::String, "heaviside", "heaviside | planar"},
        {"sim.periods", KeyType::Integer, "40", "strip length in periods"},
        {"sim.sample_every", KeyType::Number, "0.1", "time-series sampling interval"},
        {"sim.snapshot_every", KeyType::Number, "0", "snapshot interval; 0 disables"},
        {"sim.snapshot_format", KeyType::String, "binary", "binary | csv"},
        {"sim.snapshot_from", KeyType::Number, "0", "first snapshot time"},
        {"sim.t_burn", KeyType::Number, "10", "transient discarded before the fit"},
        {"sim.t_fit", KeyType::Number, "20", "length of the fit window"},
    };
    std::sort(k.begin(), k.end(), [](const KeySpec& a, const KeySpec& b) { return a.name < b.name; });
    return k;
  }();
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  const auto& keys = config_keys();
  auto it = std::lower_bound(keys.begin(), keys.end(), name, [](const KeySpec& k, const std::string& n) { return k.name < n; });
  return it != keys.end() && it->name == name ? &*it : nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

bool parse_integer(const std::string& s, long long& v) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

void check_value(const KeySpec& k, const std::string& v) {
  double d;
  long long i;
  bool ok = true;
  switch (k.type) {
    case KeyType::Number: ok = parse_double(v, d); break;
    case KeyType::Integer: ok = parse_integer(v, i); break;
    case KeyType::Bool: ok = v == "true" || v == "false"; break;
    case KeyType::String:
    case KeyType::List: break;
  }
  if (!ok) throw ConfigError("config key '" + k.name + "': malformed value '" + v + "'");
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (c.has(key)) throw ConfigError(where + ": key '" + key + "' given twice");
    c.set(key, value);
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Config c = parse(ss.str(), path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  return c;
}

std::string Config::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

void Config::set(const std::string& key, const std::string& value) {
  const KeySpec* k = find_key(key);
  if (!k) throw ConfigError("unknown config key '" + key + "'");
  const std::string v = trim(value);
  if (v.find('#') != std::string::npos || v.find('\n') != std::string::npos)
    throw ConfigError("config key '" + key + "': value may not contain '#' or newlines");
  check_value(*k, v);
  values_[key] = v;
}

std::string Config::raw(const std::string& key) const {
  const KeySpec* k = find_key(key);
  if (!k) throw ConfigError("unknown config key '" + key + "'");
  auto it = values_.find(key);
  return it == values_.end() ? k->fallback : it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

double Config::get_number(const std::string& key) const {
  double v;
  if (!parse_double(raw(key), v)) throw ConfigError("config key '" + key + "' is not a number");
  return v;
}

long long Config::get_integer(const std::string& key) const {
  long long v;
  if (!parse_integer(raw(key), v)) throw ConfigError("config key '" + key + "' is not an integer");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = raw(key);
  if (v != "true" && v != "false") throw ConfigError("config key '" + key + "' is not a boolean");
  return v == "true";
}

std::vector<std::string> Config::get_list(const std::string& key) const { return split_list(raw(key)); }

}  // namespace pulsefront
