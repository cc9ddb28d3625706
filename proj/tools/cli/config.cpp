#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wwlab/symmetrizer.hpp"

namespace wwcli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return x;
}

template <class Int = long long>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(key, "expected on/off, got '" + v + "'");
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Mode parse_mode(const std::string& key, const std::string& item) {
  // k[,l]:amplitude[:phase]
  std::vector<std::string> parts;
  std::stringstream ss(item);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(trim(p));
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError(key, "mode '" + item + "' is not k[,l]:amplitude[:phase]");
  Mode m;
  const auto comma = parts[0].find(',');
  if (comma == std::string::npos) {
    m.k = static_cast<int>(to_int(key, parts[0]));
  } else {
    m.k = static_cast<int>(to_int(key, trim(parts[0].substr(0, comma))));
    m.l = static_cast<int>(to_int(key, trim(parts[0].substr(comma + 1))));
  }
  m.amplitude = to_double(key, parts[1]);
  if (parts.size() == 3) m.phase = to_double(key, parts[2]);
  return m;
}

std::string format_mode(const Mode& m) { return std::to_string(m.k) + "," + std::to_string(m.l) + ":" + num(m.amplitude) + ":" + num(m.phase); }

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"flat_dn_validation", "dispersion",      "conservation",
                                                 "paralin_residual",   "symbol_calculus", "symmetrizer_run",
                                                 "blowup_watch",       "contraction"};
  return names;
}

std::vector<Mode> parse_modes(const std::string& key, const std::string& text) {
  std::vector<Mode> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_mode(key, item));
  }
  return out;
}

std::string format_modes(const std::vector<Mode>& modes) {
  std::string s;
  for (std::size_t i = 0; i < modes.size(); ++i) s += (i ? "; " : "") + format_mode(modes[i]);
  return s;
}

void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "scenario") c.scenario = v;
  else if (key == "dim") c.dim = static_cast<int>(to_int(key, v));
  else if (key == "N") c.n = static_cast<int>(to_int(key, v));
  else if (key == "M") c.m = static_cast<int>(to_int(key, v));
  else if (key == "g") c.gravity = to_double(key, v);
  else if (key == "h") c.depth = to_double(key, v);
  else if (key == "dt") c.dt = to_double(key, v);
  else if (key == "T") c.duration = to_double(key, v);
  else if (key == "dealias") c.dealias = to_bool(key, v);
  else if (key == "kinetic") c.kinetic = v;
  else if (key == "straightening") c.straightening = v;
  else if (key == "cfl") c.cfl = to_double(key, v);
  else if (key == "sample_interval") c.sample_interval = to_double(key, v);
  else if (key == "s") c.s = to_double(key, v);
  else if (key == "r") c.r = to_double(key, v);
  else if (key == "eps") c.eps = to_double(key, v);
  else if (key == "eps_star") c.eps_star = to_double(key, v);
  else if (key == "stride") c.stride = static_cast<int>(to_int(key, v));
  else if (key == "eta_modes") c.eta_modes = parse_modes(key, v);
  else if (key == "psi_modes") c.psi_modes = parse_modes(key, v);
  else if (key == "eta_file") c.eta_file = v;
  else if (key == "psi_file") c.psi_file = v;
  else if (key == "seed") {
    if (!v.empty() && v[0] == '-') throw ConfigError(key, "must be non-negative");
    c.seed = to_int<unsigned long long>(key, v);
  } else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "delta_mode") {
    const auto m = parse_modes(key, v);
    if (m.size() != 1) throw ConfigError(key, "expected exactly one mode");
    c.delta_mode = m.front();
  } else if (key == "periods") c.periods = to_double(key, v);
  else if (key == "probe_samples") c.probe_samples = static_cast<int>(to_int(key, v));
  else throw ConfigError(key, "unknown key");
}

void apply_setting(ScenarioConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(trim(assignment), "expected key=value");
  apply_setting(c, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (!line.empty()) apply_setting(c, line);
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> as_map(const ScenarioConfig& c) {
  return {{"scenario", c.scenario},
          {"dim", std::to_string(c.dim)},
          {"N", std::to_string(c.n)},
          {"M", std::to_string(c.m)},
          {"g", num(c.gravity)},
          {"h", num(c.depth)},
          {"dt", num(c.dt)},
          {"T", num(c.duration)},
          {"dealias", c.dealias ? "on" : "off"},
          {"kinetic", c.kinetic},
          {"straightening", c.straightening},
          {"cfl", num(c.cfl)},
          {"sample_interval", num(c.sample_interval)},
          {"s", num(c.s)},
          {"r", num(c.r)},
          {"eps", num(c.eps)},
          {"eps_star", num(c.eps_star)},
          {"stride", std::to_string(c.stride)},
          {"eta_modes", format_modes(c.eta_modes)},
          {"psi_modes", format_modes(c.psi_modes)},
          {"eta_file", c.eta_file},
          {"psi_file", c.psi_file},
          {"seed", std::to_string(c.seed)},
          {"delta", num(c.delta)},
          {"delta_mode", format_mode(c.delta_mode)},
          {"periods", num(c.periods)},
          {"probe_samples", std::to_string(c.probe_samples)}};
}

std::string serialize(const ScenarioConfig& c) {
  std::string out;
  for (const auto& [k, v] : as_map(c)) out += k + " = " + v + "\n";
  return out;
}

void validate(const ScenarioConfig& c) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end()) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");
  if (c.dim != 1 && c.dim != 2) throw ConfigError("dim", "must be 1 or 2");
  if (c.n < 8 || (c.n & (c.n - 1)) != 0) throw ConfigError("N", "must be a power of two >= 8");
  if (c.m < 0 || c.m == 1) throw ConfigError("M", "must be 0 (use N) or at least 2");
  if (!(c.gravity >= 0.0)) throw ConfigError("g", "must be non-negative");
  if (!(c.depth > 0.0)) throw ConfigError("h", "must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(c.duration >= 0.0)) throw ConfigError("T", "must be non-negative");
  if (c.kinetic != "closed_form" && c.kinetic != "discrete_gradient") throw ConfigError("kinetic", "must be closed_form or discrete_gradient");
  if (c.straightening != "linear" && c.straightening != "smoothing") throw ConfigError("straightening", "must be linear or smoothing");
  if (c.kinetic == "discrete_gradient" && c.straightening != "linear") throw ConfigError("kinetic", "discrete_gradient needs linear straightening");
  if (!(c.cfl > 0.0)) throw ConfigError("cfl", "must be positive");
  const double dx = wwlab::kTwoPi / c.n;
  if (c.dt > c.cfl * std::pow(dx, 1.5)) throw ConfigError("dt", "exceeds the dispersive CFL bound cfl * dx^{3/2} = " + num(c.cfl * std::pow(dx, 1.5)));
  if (c.sample_interval < 0.0) throw ConfigError("sample_interval", "must be non-negative");
  const double sdef = wwlab::default_sobolev_index(c.dim);
  const double s = c.s > 0.0 ? c.s : sdef;
  if (c.s < 0.0) throw ConfigError("s", "must be non-negative (0 picks the default)");
  if (!(s > 1.5 + 0.5 * c.dim)) throw ConfigError("s", "must exceed 3/2 + d/2");
  if (!(c.r > 2.0)) throw ConfigError("r", "must exceed 2");
  if (!(c.eps > 0.0)) throw ConfigError("eps", "must be positive");
  if (!(c.eps_star > 0.0)) throw ConfigError("eps_star", "must be positive");
  if (c.stride < 1) throw ConfigError("stride", "must be at least 1");
  auto check_modes = [&](const std::string& key, const std::vector<Mode>& modes) {
    for (const Mode& m : modes) {
      if (std::abs(m.k) >= c.n / 2 || std::abs(m.l) >= c.n / 2) throw ConfigError(key, "mode exceeds the grid resolution");
      if (c.dim == 1 && m.l != 0) throw ConfigError(key, "second wavenumber needs dim = 2");
    }
  };
  check_modes("eta_modes", c.eta_modes);
  check_modes("psi_modes", c.psi_modes);
  check_modes("delta_mode", {c.delta_mode});
  if (!c.eta_file.empty() && !c.eta_modes.empty()) throw ConfigError("eta_file", "give either eta_file or eta_modes");
  if (!c.psi_file.empty() && !c.psi_modes.empty()) throw ConfigError("psi_file", "give either psi_file or psi_modes");
  if (!(c.delta > 0.0)) throw ConfigError("delta", "must be positive");
  if (!(c.periods > 0.0)) throw ConfigError("periods", "must be positive");
  if (c.probe_samples < 1) throw ConfigError("probe_samples", "must be at least 1");
  if (c.scenario == "dispersion" && c.eta_modes.empty() && c.eta_file.empty())
    throw ConfigError("eta_modes", "dispersion needs one eta mode");
  if (c.scenario == "flat_dn_validation" && (!c.eta_modes.empty() || !c.eta_file.empty()))
    throw ConfigError("eta_modes", "flat_dn_validation runs on a flat surface");
  if (c.scenario == "contraction") {
    const double mu = c.dim == 1 ? 0.15 : 0.3;
    const double sc = c.s > 0.0 ? c.s : (c.dim == 1 ? 2.5 : 3.0);
    if (!(c.r < sc - 0.5 * c.dim + mu)) throw ConfigError("r", "contraction needs 2 < r < s - d/2 + mu");
  }
}

wwlab::SpectralField field_from_modes(const wwlab::Grid& grid, const std::vector<Mode>& modes) {
  return wwlab::SpectralField::from_function(grid, [&](double x, double y) {
    double v = 0.0;
    for (const Mode& m : modes) v += m.amplitude * std::cos(m.k * x + m.l * y + m.phase);
    return v;
  });
}

}  // namespace wwcli
