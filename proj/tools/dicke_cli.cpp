// dicke: figure-data and sweep driver.

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicke/csv.hpp"
#include "dicke/dipole.hpp"
#include "dicke/errors.hpp"
#include "dicke/exactn.hpp"
#include "dicke/gauge.hpp"
#include "dicke/thermo.hpp"
#include "run_config.hpp"

namespace {

using namespace dicke;
using cli::RunConfig;
using Row = std::vector<std::string>;
using Rows = std::vector<Row>;

std::string num(double x) { return csv::number(x); }

// Compact form for provenance comments.
std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Runs tasks on `threads` workers; results are handed back in task order.
// On failure, the rows of every task before the first failing one are kept.
struct SweepResult {
  std::vector<Rows> rows;
  std::exception_ptr error;
};

SweepResult run_tasks(const std::vector<std::function<Rows()>> &tasks, int threads) {
  const std::size_t n = tasks.size();
  std::vector<std::optional<Rows>> done(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        done[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int extra = std::max(0, std::min<int>(threads, static_cast<int>(n)) - 1);
  for (int t = 0; t < extra; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  SweepResult r;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      r.error = errors[i];
      break;
    }
    r.rows.push_back(std::move(*done[i]));
  }
  return r;
}

class Output {
public:
  Output(const std::string &path, const RunConfig &cfg, const std::string &extra) {
    if (path.empty() || path == "-") {
      out_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_)
        throw ValidationError("cannot open output file '" + path + "'");
      out_ = file_.get();
    }
    writer_ = std::make_unique<csv::Writer>(*out_);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(cli::fnv1a(cfg.canonical())));
    writer_->comment("dicke " + cfg.command + " config_hash=" + hash + " " + extra);
  }
  csv::Writer &csv() { return *writer_; }

  void emit(const SweepResult &r) {
    for (const auto &rows : r.rows)
      for (const auto &row : rows)
        writer_->row(row);
    if (r.error)
      writer_->comment("TRUNCATED");
    writer_->flush();
    if (r.error)
      std::rethrow_exception(r.error);
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream *out_ = nullptr;
  std::unique_ptr<csv::Writer> writer_;
};

std::string derived_path(const std::string &out, const std::string &suffix) {
  if (out.empty() || out == "-")
    return "-";
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out + suffix;
  return out.substr(0, dot) + suffix + out.substr(dot);
}

GridSpec grid_of(const RunConfig &c) { return {c.zeta_max, c.grid_points}; }

Convention convention_of(const RunConfig &c) {
  return c.convention == "main-text" ? Convention::MainText : Convention::SelfEnergyInBare;
}

ReducedParams base_params(const RunConfig &c, double beta, int n, int levels) {
  return resonant_params(beta, 0.0, 1.0, n, levels, c.omega, grid_of(c));
}

double resolve_alpha(const std::string &a, const ReducedParams &p) {
  return a == "jc" ? jc_gauge(p) : cli::to_double("alpha_list", a);
}

std::string cutoff_text(const RunConfig &c, const std::vector<int> &ns) {
  std::ostringstream os;
  os << "grid_points=" << c.grid_points << " zeta_max=" << brief(c.zeta_max);
  for (int n : ns) {
    const auto [l, m] = c.cutoffs(n);
    os << " N" << n << ":L=" << l << ",M=" << m;
  }
  return os.str();
}

// -- thermodynamic limit ----------------------------------------------------

Row thermo_header() {
  return {"eta", "alpha_label", "alpha", "phase", "tau", "E_plus", "E_minus", "ground_density",
          "finite_size_offset", "pi_average", "p_t_average", "material_frequency"};
}

Row thermo_row(double eta, const std::string &label, double alpha, const PhasePoint &pt) {
  return {num(eta), label, num(alpha), to_string(pt.phase), num(pt.tau), num(pt.e_plus),
          num(pt.e_minus), num(pt.ground_density), num(pt.finite_size_offset),
          num(pt.pi_average), num(pt.p_t_average), num(pt.renormalized_material_frequency)};
}

// One thermodynamic-limit point; with the self-energy convention the dipole is
// re-solved with its single-dipole renormalisation.
Rows thermo_task(const ReducedParams &base, const RunConfig &c, double eta,
                 const std::string &label, Convention conv) {
  ReducedParams p = base.with_eta(eta);
  const double alpha = resolve_alpha(label, p);
  p.alpha = alpha;
  if (conv == Convention::SelfEnergyInBare) {
    ReducedParams single = p;
    single.n_dipoles = 1;
    p.spectrum = convention_spectrum(single, conv, 2, grid_of(c));
  }
  return {thermo_row(eta, label, alpha, evaluate(p))};
}

void run_thermo(const RunConfig &c, Convention conv, const std::string &path, double beta) {
  const ReducedParams base = base_params(c, beta, 1, 2);
  std::vector<std::function<Rows()>> tasks;
  for (double eta : c.eta_grid())
    for (const auto &a : c.alpha_list)
      tasks.push_back([&, eta, a] { return thermo_task(base, c, eta, a, conv); });
  Output out(path, c,
             "beta=" + brief(beta) + " convention=" + to_string(conv) + " " + cutoff_text(c, {}));
  out.csv().header(thermo_header());
  out.emit(run_tasks(tasks, c.threads));
}

void run_jc_curve(const RunConfig &c) {
  const ReducedParams base = base_params(c, c.beta, 1, 2);
  std::vector<std::function<Rows()>> tasks;
  for (double eta : c.eta_grid())
    tasks.push_back([&, eta]() -> Rows {
      ReducedParams p = base.with_eta(eta);
      p.alpha = jc_gauge(p);
      const CouplingSet k = derive_couplings(p);
      return {{num(eta), num(p.alpha), to_string(classify(k)), num(k.g_alpha),
               num(k.g_prime_alpha)}};
    });
  Output out(c.out, c, "beta=" + brief(c.beta));
  out.csv().header({"eta", "alpha", "phase", "g_alpha", "g_prime_alpha"});
  out.emit(run_tasks(tasks, c.threads));
}

// -- finite N ---------------------------------------------------------------

HilbertConfig hilbert_of(const RunConfig &c, int n) {
  HilbertConfig h;
  h.n_dipoles = n;
  std::tie(h.dipole_levels, h.fock_cutoff) = c.cutoffs(n);
  h.representation =
      c.representation == "collective" ? Representation::CollectiveSpin : Representation::ProductBasis;
  if (h.representation == Representation::CollectiveSpin)
    h.dipole_levels = 2;
  h.budget = c.budget;
  h.zeta_squared =
      c.zeta_squared == "projected" ? SquareConvention::Projected : SquareConvention::SquareOfTruncated;
  return h;
}

Row exact_header() {
  return {"eta", "alpha_label", "alpha", "phase", "N", "L", "M", "G", "E", "gap",
          "G_two_level", "E_two_level", "gap_two_level"};
}

Rows exact_task(const ReducedParams &base, const RunConfig &c, int n, double eta,
                const std::string &label, Convention conv) {
  ReducedParams p = base.with_eta(eta);
  p.n_dipoles = n;
  p.alpha = resolve_alpha(label, p);
  const HilbertConfig h = hilbert_of(c, n);
  const TransitionRow r = transition_point(h, p, eta, conv);
  for (const auto &w : r.warnings)
    std::cerr << "warning: N=" << n << " eta=" << num(eta) << ": " << w << '\n';
  const Phase ph = classify(derive_couplings(p));
  return {{num(eta), label, num(p.alpha), to_string(ph), num(n), num(h.dipole_levels),
           num(h.fock_cutoff), num(r.ground), num(r.excited), num(r.gap),
           num(r.ground_two_level), num(r.excited_two_level), num(r.gap_two_level)}};
}

void run_exact(const RunConfig &c, const std::vector<int> &ns, double beta, Convention conv,
               const std::string &path) {
  int max_l = 2;
  for (int n : ns)
    max_l = std::max(max_l, c.cutoffs(n).first);
  const ReducedParams base = base_params(c, beta, 1, max_l);
  for (int n : ns)
    hilbert_of(c, n).validate();
  std::vector<std::function<Rows()>> tasks;
  for (int n : ns)
    for (const auto &a : c.alpha_list)
      for (double eta : c.eta_grid())
        tasks.push_back([&, n, a, eta] { return exact_task(base, c, n, eta, a, conv); });
  Output out(path, c,
             "beta=" + brief(beta) + " convention=" + to_string(conv) + " " + cutoff_text(c, ns));
  out.csv().header(exact_header());
  out.emit(run_tasks(tasks, c.threads));
}

void run_fig3b(const RunConfig &c) {
  const std::vector<double> grid = c.eta_grid();
  check_uniform(grid, "fig3b");
  const double alpha = cli::to_double("alpha_list", c.alpha_list.front());
  int max_l = 2;
  for (int n : c.n_list)
    max_l = std::max(max_l, c.cutoffs(n).first);
  ReducedParams base = base_params(c, c.beta, 1, max_l);
  base.alpha = alpha;
  for (int n : c.n_list)
    hilbert_of(c, n).validate();
  const Convention conv = Convention::MainText;

  // one task per (N, eta): G_s = G - rho d^2 / 2
  std::vector<std::function<Rows()>> tasks;
  for (int n : c.n_list)
    for (double eta : grid)
      tasks.push_back([&, n, eta]() -> Rows {
        ReducedParams p = base.with_eta(eta);
        p.n_dipoles = n;
        return {{num(ground_energy(hilbert_of(c, n), p, conv) - 0.5 * p.rho_d2())}};
      });
  SweepResult r = run_tasks(tasks, c.threads);

  Row header = {"eta", "alpha", "phase"};
  for (int n : c.n_list)
    header.push_back("d2Gs_N" + std::to_string(n));
  header.push_back("d2Gs_thermo");
  Output out(c.out, c, "beta=" + brief(c.beta) + " " + cutoff_text(c, c.n_list));
  out.csv().header(header);

  const std::size_t per_n = grid.size();
  const std::size_t complete_n = r.rows.size() / per_n;
  std::vector<std::vector<CurvatureRow>> curves;
  for (std::size_t k = 0; k < complete_n; ++k) {
    std::vector<double> gs;
    for (std::size_t i = 0; i < per_n; ++i)
      gs.push_back(std::stod(r.rows[k * per_n + i][0][0]));
    curves.push_back(curvature_from_ground(grid, gs, c.n_list[k], c.omega));
  }
  const double eta_c = critical_eta(base);
  SweepResult table;
  table.error = r.error;
  if (!r.error) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double eta = grid[i];
      Row row = {num(eta), num(alpha),
                 to_string(classify(derive_couplings(base.with_eta(eta))))};
      for (const auto &cv : curves)
        row.push_back(num(cv[i - 1].value));
      row.push_back(num(analytic_second_derivative(eta, eta_c, base.omega_m()) / c.omega));
      table.rows.push_back({row});
    }
  }
  out.emit(table);
}

void run_spectrum(const RunConfig &c) {
  const double e_scale = resonance_energy_scale(c.beta, c.omega, grid_of(c));
  ReducedParams p;
  p.omega = c.omega;
  p.beta = c.beta;
  p.energy_scale = e_scale;
  p.eta = c.eta;
  p.n_dipoles = c.n_dipoles;
  const std::string label = c.alpha_list.front();
  p.alpha = 1.0;
  p.spectrum = solve_double_well({c.beta, e_scale, MainText{}}, grid_of(c), 2, {});
  p.alpha = resolve_alpha(label, p);
  p.spectrum = convention_spectrum(p, convention_of(c), c.spectrum_levels, grid_of(c));
  const Phase ph = classify(derive_couplings(p));

  Output out(c.out, c,
             "beta=" + brief(c.beta) + " energy_scale=" + brief(e_scale) +
                 " convention=" + to_string(convention_of(c)) + " " + cutoff_text(c, {}));
  out.csv().header({"eta", "alpha", "phase", "n", "e_n", "eps_n", "zeta_0n", "zeta_1n"});
  SweepResult r;
  Rows rows;
  const DipoleSpectrum &s = p.spectrum;
  for (int n = 0; n < s.levels(); ++n)
    rows.push_back({num(c.eta), num(p.alpha), to_string(ph), num(n), num(s.dimensionless(n)),
                    num(s.energies[n]), num(s.zeta(0, n)), num(s.zeta(1, n))});
  r.rows.push_back(rows);
  out.emit(r);
}

void run_convergence(const RunConfig &c) {
  int max_l = 2;
  for (const auto &[l, m] : c.ladder)
    max_l = std::max(max_l, l);
  ReducedParams p = base_params(c, c.beta, c.n_dipoles, max_l).with_eta(c.eta);
  p.alpha = resolve_alpha(c.alpha_list.front(), p);
  HilbertConfig h = hilbert_of(c, c.n_dipoles);
  for (const auto &[l, m] : c.ladder) {
    HilbertConfig probe = h;
    probe.dipole_levels = l;
    probe.fock_cutoff = m;
    probe.validate();
  }
  const auto rows = convergence_report(c.ladder, h, p, convention_of(c));
  const Phase ph = classify(derive_couplings(p));
  Output out(c.out, c, "beta=" + brief(c.beta) + " N=" + num(c.n_dipoles));
  out.csv().header({"eta", "alpha", "phase", "L", "M", "dimension", "G", "E1", "delta_G",
                    "delta_E1", "cauchy"});
  SweepResult r;
  Rows table;
  for (const auto &row : rows)
    table.push_back({num(c.eta), num(p.alpha), to_string(ph), num(row.levels), num(row.fock),
                     num(static_cast<long>(row.dimension)), num(row.ground), num(row.excited),
                     row.delta_ground ? num(*row.delta_ground) : "",
                     row.delta_excited ? num(*row.delta_excited) : "",
                     row.cauchy ? "1" : "0"});
  r.rows.push_back(table);
  out.emit(r);
}

void run(const RunConfig &c) {
  const std::string &cmd = c.command;
  if (cmd == "spectrum")
    run_spectrum(c);
  else if (cmd == "thermo-sweep" || cmd == "fig1" || cmd == "fig2")
    run_thermo(c, convention_of(c), c.out, c.beta);
  else if (cmd == "jc-curve")
    run_jc_curve(c);
  else if (cmd == "exact-sweep")
    run_exact(c, {c.n_dipoles}, c.beta, convention_of(c), c.out);
  else if (cmd == "fig3a")
    run_exact(c, c.n_list, c.beta, Convention::MainText, c.out);
  else if (cmd == "fig3b")
    run_fig3b(c);
  else if (cmd == "s-figs") {
    run_thermo(c, convention_of(c), derived_path(c.out, "_renormalized"), c.beta);
    run_exact(c, c.n_list, 1.5, Convention::MainText, derived_path(c.out, "_gauges"));
  } else if (cmd == "convergence")
    run_convergence(c);
}

int exit_code(const Error &e) {
  const std::string k = e.kind();
  if (k == "ValidationError" || k == "GridError" || k == "ConventionMismatch" ||
      k == "DomainError")
    return 2;
  if (k == "ConvergenceError")
    return 3;
  if (k == "BudgetError")
    return 4;
  return 1;
}

void report(const std::string &kind, const std::string &message, int code) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << std::endl;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Gauge-parameterised Dicke model: spectra, phase diagram and exact finite-N sweeps"};
  std::string config_path, command, out, threads, budget;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--command", command, "command to run")
      ->check(CLI::IsMember(dicke::cli::commands()));
  app.add_option("--out", out, "output CSV path ('-' for stdout)");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--budget", budget, "maximum Hilbert-space dimension");
  app.add_option("--set", overrides, "key=value override (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    dicke::cli::KeyValues kv;
    if (!config_path.empty())
      kv.load_file(config_path);
    for (const auto &o : overrides)
      kv.parse_line(o, "--set");
    if (!command.empty())
      kv.set("command", command);
    if (!out.empty())
      kv.set("out", out);
    if (!threads.empty())
      kv.set("threads", threads);
    if (!budget.empty())
      kv.set("budget", budget);
    run(dicke::cli::resolve(kv));
  } catch (const dicke::Error &e) {
    const int code = exit_code(e);
    report(e.kind(), e.what(), code);
    return code;
  } catch (const std::exception &e) {
    report("Error", e.what(), 1);
    return 1;
  }
  return 0;
}
