// Command-line driver: solve the state equation, run the sparse-control
// optimizer, and verify first- and second-order conditions at a candidate
// control. Every command reads one config file, honors a few overrides,
// and writes deterministic text/CSV outputs into the output directory.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "nsoc/config.hpp"
#include "nsoc/curvature.hpp"
#include "nsoc/expr.hpp"
#include "nsoc/reports.hpp"

namespace fs = std::filesystem;
using namespace nsoc;

namespace {

struct Overrides {
  std::optional<double> kappa, nu, eps_floor;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config_path = "nsoc.cfg";
  std::string control_path; // check-foc / check-soc
};

RunConfig load_config(const Overrides& ov) {
  RunConfig c = RunConfig::load(ov.config_path);
  if (ov.kappa) c.kappa = *ov.kappa;
  if (ov.nu) c.nu = *ov.nu;
  if (ov.n) c.n = {*ov.n, *ov.n};
  if (ov.eps_floor) c.optimize.eps_floor = *ov.eps_floor;
  if (ov.seed) c.seed = *ov.seed;
  if (ov.out) c.out_dir = *ov.out;
  return c;
}

class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }
  void flush(const RunConfig& cfg) {
    fs::create_directories(dir_);
    write_file_atomic(dir_ + "/config.txt", cfg.resolved().serialize());
    for (auto& [name, content] : files_) write_file_atomic(dir_ + "/" + name, content);
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string serialize_field(const GridFunction& f) {
  std::ostringstream os;
  write_gridfunction(os, f);
  return os.str();
}

int cmd_solve_state(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  const GridFunction u = cfg.control_field(p.grid);
  const StateSolveReport rep = solve_state(p, u);

  OutputSet out(cfg.out_dir);
  CsvTable residuals({"iteration", "residual"});
  for (std::size_t k = 0; k < rep.residual_history.size(); ++k)
    residuals.add_row({double(k), rep.residual_history[k]});
  TextReport tr;
  tr.add("method", rep.method);
  tr.add("iterations", rep.iterations);
  tr.add("final_residual", rep.final_residual);
  tr.add("converged", rep.ok ? "yes" : "no");
  out.add("y.field", serialize_field(rep.y));
  out.add("state_report.txt", tr.serialize());
  out.add("residuals.csv", residuals.serialize());
  out.flush(cfg);
  if (!rep.ok) {
    std::cerr << "state solve did not converge (residual " << rep.final_residual << ")\n";
    return 2;
  }
  return 0;
}

int cmd_optimize(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  const GridFunction u0 = cfg.control_field(p.grid);
  const OptimizeReport rep = solve_continuation(p, {}, u0, cfg.optimize);

  OutputSet out(cfg.out_dir);
  CsvTable iters({"stage", "iteration", "objective", "residual", "step"});
  for (const auto& r : rep.log)
    iters.add_row({double(r.stage), double(r.iteration), r.objective, r.residual, r.step});
  CsvTable stages({"stage", "eps", "iterations", "residual", "drift"});
  for (std::size_t k = 0; k < rep.stages.size(); ++k) {
    const auto& s = rep.stages[k];
    stages.add_row({double(k), s.eps, double(s.iterations), s.final_residual,
                    s.drift_from_previous});
  }
  TextReport tr;
  tr.add("converged", rep.ok ? "yes" : "no");
  tr.add("stages", static_cast<int>(rep.stages.size()));
  tr.add("final_prox_residual", rep.final_residual);
  tr.add("stationarity_residual", rep.stationarity);
  tr.add("objective", eval_J(p, rep.u));

  const StateSolveReport st = solve_state(p, rep.u);
  out.add("u.field", serialize_field(rep.u));
  out.add("y.field", serialize_field(st.y));
  out.add("optimize_report.txt", tr.serialize());
  out.add("iterations.csv", iters.serialize());
  out.add("stages.csv", stages.serialize());
  out.flush(cfg);
  return rep.ok ? 0 : 2;
}

GridFunction load_control(const RunConfig& cfg, const ControlProblem& p,
                          const std::string& path) {
  GridFunction u = read_gridfunction(path);
  if (!u.grid().same_as(*p.grid))
    throw ConfigError("control file grid does not match the config grid");
  u.set_trace(GridFunction::Trace::free);
  return u;
}

int cmd_check_foc(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  const GridFunction u = load_control(cfg, p, ov.control_path);
  const StationarityReport rep = build_stationarity(p, u);
  const StructureReport structure = check_structure(rep.y, *p.f);

  OutputSet out(cfg.out_dir);
  out.add("foc_report.txt", describe(rep).serialize());
  out.add("structure_report.txt", describe(structure).serialize());
  CsvTable profile({"eps", "measure"});
  for (std::size_t k = 0; k < structure.eps_grid.size(); ++k)
    profile.add_row({structure.eps_grid[k], structure.measure[k]});
  out.add("structure_profile.csv", profile.serialize());
  out.add("p.field", serialize_field(rep.p));
  out.add("lambda.field", serialize_field(rep.lambda));
  out.add("d.field", serialize_field(rep.d));
  out.flush(cfg);
  return 0;
}

int cmd_check_soc(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  const GridFunction u = load_control(cfg, p, ov.control_path);
  const StationarityReport rep = build_stationarity(p, u);

  std::mt19937_64 rng(cfg.seed);
  const int count = cfg.raw.get_int("solver", "soc_directions", 5);
  const std::vector<GridFunction> probes = build_critical_probe_set(p, rep, count, rng);
  SecondOrderOptions sopt;
  sopt.seed = cfg.seed + 1;
  sopt.t_sequence = cfg.t_sequence();
  const SecondOrderReport soc = second_order_report(p, rep, probes, sopt);

  OutputSet out(cfg.out_dir);
  TextReport tr;
  tr.add("verdict", to_string(soc.verdict));
  tr.add("directions", static_cast<int>(soc.rows.size()));
  tr.add("min_Q", soc.min_Q);
  tr.add("growth_samples", soc.growth.samples);
  tr.add("growth_min_quotient", soc.growth.min_quotient);
  out.add("soc_report.txt", tr.serialize());

  CsvTable dirs({"direction", "Q", "term_tracking", "term_fsecond", "term_surface",
                 "Qt_explicit", "Qt_limit", "pairing"});
  CsvTable seqs({"direction", "t", "q", "extrapolation"});
  for (std::size_t k = 0; k < soc.rows.size(); ++k) {
    const auto& r = soc.rows[k];
    dirs.add_row({double(k), r.breakdown.Q, r.breakdown.term_tracking,
                  r.breakdown.term_fsecond, r.breakdown.term_surface,
                  r.breakdown.Q_tilde_explicit, r.qt_limit.estimate, r.membership.pairing});
    for (std::size_t j = 0; j < r.qt_limit.ts.size(); ++j)
      seqs.add_row({double(k), r.qt_limit.ts[j], r.qt_limit.q[j], r.qt_limit.stabilized[j]});
  }
  out.add("soc_directions.csv", dirs.serialize());
  out.add("soc_t_sequences.csv", seqs.serialize());
  out.flush(cfg);
  return 0;
}

int cmd_study_mollifier(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  std::vector<double> sweep = cfg.eps_sweep;
  if (sweep.empty()) sweep = {0.1, 0.05, 0.025, 0.0125};

  CsvTable table({"eps", "max_err", "min_deriv"});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double min_deriv = std::numeric_limits<double>::infinity();
  for (double eps : sweep) {
    const MollifiedFunction fe = p.f->mollify(eps, cfg.moll_quad_order);
    double max_err = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double t = -10.0 + 20.0 * k / 2000.0;
      max_err = std::max(max_err, std::abs(fe.value(t) - p.f->value(t)));
      min_deriv = std::min(min_deriv, fe.deriv(t));
    }
    table.add_row({eps, max_err, min_deriv});
    const double lx = std::log(eps), ly = std::log(max_err);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double n = double(sweep.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  OutputSet out(cfg.out_dir);
  TextReport tr;
  tr.add("rate_slope", slope);
  tr.add("min_mollified_derivative", min_deriv);
  out.add("mollifier_report.txt", tr.serialize());
  out.add("mollifier.csv", table.serialize());
  out.flush(cfg);
  return 0;
}

int cmd_study_onedim_lemma(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  // synthetic configuration: y = sin(pi x) on (0,1), breakpoint at 1/2 with
  // slope jump -1, p = 1, z = 1, y_t = y + t z
  const GridPtr g = build_grid(0.0, 1.0, cfg.n[0]);
  auto f = make_polynomial_nonlinearity({0.5}, {{0.0, 1.0}, {-0.5, 2.0}});
  const GridFunction y = Expression::parse("sin(pi*x)").sample(g, GridFunction::Trace::zero);
  GridFunction pfield(g, 1.0, GridFunction::Trace::free);
  GridFunction z(g, 1.0, GridFunction::Trace::free);

  CsvTable table({"t", "value", "extrapolation"});
  std::vector<double> ts = cfg.t_sequence();
  std::sort(ts.begin(), ts.end(), std::greater<>());
  double prev = 0.0;
  double final_value = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    GridFunction yt = y;
    for (int j = 0; j < yt.size(); ++j) yt[j] += t * z[j];
    yt.set_trace(GridFunction::Trace::free);
    const double v = integral_pT_subcell(*f, y, yt, pfield) / (t * t);
    const double extrap = k == 0 ? v : v + (v - prev);
    table.add_row({t, v, extrap});
    prev = v;
    final_value = v;
  }

  OutputSet out(cfg.out_dir);
  TextReport tr;
  tr.add("final_value", final_value);
  tr.add("reference", -2.0 / (M_PI * std::sqrt(3.0)));
  out.add("onedim_lemma.csv", table.serialize());
  out.add("onedim_lemma_report.txt", tr.serialize());
  out.flush(cfg);
  return 0;
}

int cmd_sweep_kappa(const Overrides& ov) {
  RunConfig cfg = load_config(ov);
  ControlProblem p = cfg.make_problem();
  std::vector<double> kappas = cfg.raw.get_doubles("solver", "kappa_sweep");
  if (kappas.empty()) kappas = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  const auto rows = sparsity_sweep(p, kappas, cfg.optimize);

  CsvTable table({"kappa", "support_measure", "l1_norm", "p_inf_norm", "ok"});
  bool all_ok = true;
  for (const auto& r : rows) {
    table.add_row({r.kappa, r.support_measure, r.l1_norm, r.p_inf_norm, r.ok ? 1.0 : 0.0});
    all_ok = all_ok && r.ok;
  }
  OutputSet out(cfg.out_dir);
  out.add("kappa_sweep.csv", table.serialize());
  out.flush(cfg);
  return all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse optimal control of non-smooth semilinear elliptic PDEs"};
  app.require_subcommand(1);

  Overrides ov;
  app.add_option("--config", ov.config_path, "config file path");
  app.add_option("--out", ov.out, "output directory (overrides config)");
  app.add_option("--seed", ov.seed, "seed for randomized probes");
  app.add_option("--kappa", ov.kappa, "override sparsity weight");
  app.add_option("--nu", ov.nu, "override Tikhonov weight");
  app.add_option("--n", ov.n, "override interior nodes per axis");
  app.add_option("--eps-floor", ov.eps_floor, "override continuation floor");

  auto* c1 = app.add_subcommand("solve-state", "solve A y + f(y) = u");
  auto* c2 = app.add_subcommand("optimize", "continuation proximal-gradient solve");
  auto* c3 = app.add_subcommand("check-foc", "first-order system at a control file");
  c3->add_option("--control", ov.control_path, "control field file")->required();
  auto* c4 = app.add_subcommand("check-soc", "second-order report at a control file");
  c4->add_option("--control", ov.control_path, "control field file")->required();
  auto* c5 = app.add_subcommand("study-mollifier", "mollification error sweep");
  auto* c6 = app.add_subcommand("study-onedim-lemma", "1D surface-term limit study");
  auto* c7 = app.add_subcommand("sweep-kappa", "sparsity sweep over kappa");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c1->parsed()) return cmd_solve_state(ov);
    if (c2->parsed()) return cmd_optimize(ov);
    if (c3->parsed()) return cmd_check_foc(ov);
    if (c4->parsed()) return cmd_check_soc(ov);
    if (c5->parsed()) return cmd_study_mollifier(ov);
    if (c6->parsed()) return cmd_study_onedim_lemma(ov);
    if (c7->parsed()) return cmd_sweep_kappa(ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
