#pragma once

// Flat key=value run configuration with per-command defaults.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke::cli {

inline const std::vector<std::string> &commands() {
  static const std::vector<std::string> names = {
      "spectrum", "thermo-sweep", "exact-sweep", "fig1",     "fig2",
      "fig3a",    "fig3b",        "s-figs",      "jc-curve", "convergence"};
  return names;
}

inline const std::vector<std::string> &known_keys() {
  static const std::vector<std::string> keys = {
      "command",   "beta",       "omega",     "alpha_list",     "eta_start",     "eta_stop",
      "eta_steps", "eta",        "n_dipoles", "n_list",         "levels",        "fock",
      "representation", "convention", "zeta_squared", "out",     "threads",       "budget",
      "grid_points", "zeta_max", "fd_step",   "ladder",         "spectrum_levels"};
  return keys;
}

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

/// Raw key/value store; later assignments override earlier ones.
class KeyValues {
public:
  void set(const std::string &key, const std::string &value) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw ValidationError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  void parse_line(const std::string &raw, const std::string &where) {
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      return;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(where + ": expected key=value, got '" + line + "'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  void load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
      throw ValidationError("cannot open config file '" + path + "'");
    std::string line;
    int n = 0;
    while (std::getline(in, line))
      parse_line(line, path + ":" + std::to_string(++n));
  }

  bool has(const std::string &key) const { return values_.count(key) != 0; }
  std::string get(const std::string &key, const std::string &fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  const std::map<std::string, std::string> &all() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

inline double to_double(const std::string &key, const std::string &v) {
  std::istringstream is(v);
  is.imbue(std::locale::classic());
  double x;
  if (!(is >> x) || !(is >> std::ws).eof() || !std::isfinite(x))
    throw ValidationError("config key '" + key + "': not a finite number: '" + v + "'");
  return x;
}

inline long long to_int(const std::string &key, const std::string &v) {
  std::istringstream is(v);
  long long x;
  if (!(is >> x) || !(is >> std::ws).eof())
    throw ValidationError("config key '" + key + "': not an integer: '" + v + "'");
  return x;
}

struct RunConfig {
  std::string command;
  double beta = 0.0;
  double omega = 1.0;
  std::vector<std::string> alpha_list; ///< numbers or "jc"
  double eta_start = 0.0;
  double eta_stop = 1.0;
  int eta_steps = 2; ///< number of grid points
  double eta = 0.0;  ///< single point (spectrum, convergence)
  int n_dipoles = 1;
  std::vector<int> n_list;
  int levels = 0; ///< 0 selects the default for N
  int fock = 0;
  std::string representation = "product";
  std::string convention = "main-text";
  std::string zeta_squared = "projected";
  std::string out;
  int threads = 1;
  std::int64_t budget = 2'000'000;
  int grid_points = 256;
  double zeta_max = 6.0;
  double fd_step = 1e-3;
  std::vector<std::pair<int, int>> ladder;
  int spectrum_levels = 12;

  std::vector<double> eta_grid() const {
    std::vector<double> g(eta_steps);
    for (int i = 0; i < eta_steps; ++i)
      g[i] = eta_start + (eta_stop - eta_start) * double(i) / double(eta_steps - 1);
    return g;
  }

  /// Default (L, M) for N dipoles unless overridden.
  std::pair<int, int> cutoffs(int n) const {
    const int l = levels > 0 ? levels : (n <= 3 ? 8 : 6);
    const int m = fock > 0 ? fock : (n <= 3 ? 40 : 30);
    return {l, m};
  }

  /// Canonical text of every resolved field; hashed for provenance.
  std::string canonical() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "command=" << command << "\nbeta=" << beta << "\nomega=" << omega << "\nalpha_list=";
    for (const auto &a : alpha_list)
      os << a << ',';
    os << "\neta=" << eta_start << ':' << eta_stop << ':' << eta_steps << "\neta_point=" << eta
       << "\nn_dipoles=" << n_dipoles << "\nn_list=";
    for (int n : n_list)
      os << n << ',';
    os << "\nlevels=" << levels << "\nfock=" << fock << "\nrepresentation=" << representation
       << "\nconvention=" << convention << "\nzeta_squared=" << zeta_squared
       << "\nbudget=" << budget << "\ngrid_points=" << grid_points << "\nzeta_max=" << zeta_max
       << "\nfd_step=" << fd_step << "\nladder=";
    for (const auto &[l, m] : ladder)
      os << l << ':' << m << ',';
    os << "\nspectrum_levels=" << spectrum_levels << '\n';
    return os.str();
  }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

struct CommandDefaults {
  double beta;
  const char *alphas;
  double eta_start, eta_stop;
  int eta_steps;
  const char *n_list;
};

inline CommandDefaults defaults_for(const std::string &cmd) {
  if (cmd == "fig1" || cmd == "thermo-sweep")
    return {2.4, cmd == "fig1" ? "0,jc,1" : "1", 0.0, 3.0, 61, "1"};
  if (cmd == "fig2")
    return {2.4, "jc,1", 0.0, 3.0, 61, "1"};
  if (cmd == "jc-curve")
    return {2.4, "jc", 0.0, 3.0, 61, "1"};
  if (cmd == "fig3a")
    return {3.3, "1", 0.0, 1.5, 16, "1,2,3,4"};
  if (cmd == "fig3b")
    return {3.3, "1", 1.0, 3.0, 41, "1,2,3,4"};
  if (cmd == "s-figs")
    return {2.4, "0,jc,1", 0.0, 1.5, 16, "1,2,3"};
  if (cmd == "exact-sweep")
    return {3.3, "1", 0.0, 1.5, 16, "1"};
  if (cmd == "convergence")
    return {3.3, "1", 1.0, 1.0, 2, "2"};
  return {3.3, "1", 0.0, 1.0, 2, "1"}; // spectrum
}

} // namespace detail

inline RunConfig resolve(const KeyValues &kv) {
  RunConfig c;
  c.command = kv.get("command", "");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
    throw ValidationError("unknown or missing command '" + c.command + "'");
  const auto d = detail::defaults_for(c.command);

  c.beta = kv.has("beta") ? to_double("beta", kv.get("beta", "")) : d.beta;
  c.omega = to_double("omega", kv.get("omega", "1"));
  c.alpha_list = split(kv.get("alpha_list", d.alphas), ',');
  for (const auto &a : c.alpha_list)
    if (a != "jc")
      to_double("alpha_list", a);
  if (c.alpha_list.empty())
    throw ValidationError("alpha_list is empty");
  c.eta_start = kv.has("eta_start") ? to_double("eta_start", kv.get("eta_start", "")) : d.eta_start;
  c.eta_stop = kv.has("eta_stop") ? to_double("eta_stop", kv.get("eta_stop", "")) : d.eta_stop;
  c.eta_steps = static_cast<int>(kv.has("eta_steps") ? to_int("eta_steps", kv.get("eta_steps", ""))
                                                     : d.eta_steps);
  c.eta = kv.has("eta") ? to_double("eta", kv.get("eta", "")) : d.eta_start;
  for (const auto &n : split(kv.get("n_list", d.n_list), ','))
    c.n_list.push_back(static_cast<int>(to_int("n_list", n)));
  c.n_dipoles = static_cast<int>(
      to_int("n_dipoles", kv.get("n_dipoles", std::to_string(c.n_list.empty() ? 1 : c.n_list[0]))));
  c.levels = static_cast<int>(to_int("levels", kv.get("levels", "0")));
  c.fock = static_cast<int>(to_int("fock", kv.get("fock", "0")));
  c.representation = kv.get("representation", "product");
  c.convention = kv.get("convention", c.command == "s-figs" ? "self-energy-in-bare" : "main-text");
  c.zeta_squared = kv.get("zeta_squared", "projected");
  c.out = kv.get("out", "");
  c.threads = static_cast<int>(to_int("threads", kv.get("threads", "1")));
  c.budget = to_int("budget", kv.get("budget", "2000000"));
  c.grid_points = static_cast<int>(to_int("grid_points", kv.get("grid_points", "256")));
  c.zeta_max = to_double("zeta_max", kv.get("zeta_max", "6"));
  c.fd_step = to_double("fd_step", kv.get("fd_step", "1e-3"));
  c.spectrum_levels = static_cast<int>(to_int("spectrum_levels", kv.get("spectrum_levels", "12")));
  for (const auto &rung : split(kv.get("ladder", "6:30,8:40,10:60"), ',')) {
    const auto parts = split(rung, ':');
    if (parts.size() != 2)
      throw ValidationError("ladder entries must be L:M, got '" + rung + "'");
    c.ladder.emplace_back(static_cast<int>(to_int("ladder", parts[0])),
                          static_cast<int>(to_int("ladder", parts[1])));
  }

  const bool point_command = c.command == "spectrum" || c.command == "convergence";
  if (!point_command && c.eta_steps < 2)
    throw ValidationError("eta_steps must be >= 2");
  if (!point_command && !(c.eta_start >= 0.0 && c.eta_stop > c.eta_start))
    throw ValidationError("eta grid needs stop > start >= 0");
  if (!(c.eta >= 0.0))
    throw ValidationError("eta must be >= 0");
  if (!(c.omega > 0.0))
    throw ValidationError("omega must be positive");
  if (c.threads < 1)
    throw ValidationError("threads must be >= 1");
  if (c.budget < 1)
    throw ValidationError("budget must be positive");
  if (c.n_dipoles < 1)
    throw ValidationError("n_dipoles must be >= 1");
  for (int n : c.n_list)
    if (n < 1)
      throw ValidationError("n_list entries must be >= 1");
  if (c.representation != "product" && c.representation != "collective")
    throw ValidationError("representation must be product or collective");
  if (c.convention != "main-text" && c.convention != "self-energy-in-bare")
    throw ValidationError("convention must be main-text or self-energy-in-bare");
  if (c.zeta_squared != "projected" && c.zeta_squared != "square")
    throw ValidationError("zeta_squared must be projected or square");
  if (c.levels < 0 || c.fock < 0 || c.levels == 1 || c.fock == 1)
    throw ValidationError("levels and fock must be >= 2 (or 0 for defaults)");
  if (c.grid_points < 3 || !(c.zeta_max > 0.0))
    throw ValidationError("grid_points >= 3 and zeta_max > 0 required");
  if (!(c.fd_step > 0.0))
    throw ValidationError("fd_step must be positive");
  return c;
}

} // namespace dicke::cli
