#include "nsoc/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsoc/kernels.hpp"

namespace nsoc {

StationarityReport build_stationarity(const ControlProblem& p, const GridFunction& u) {
  StationarityReport rep;
  rep.u = u;
  const StateSolveReport st = solve_state(p, u);
  require_converged(st);
  rep.y = st.y;

  const PiecewiseSmoothFunction& f = *p.f;
  rep.chi = GridFunction(p.grid);
  for (int j = 0; j < rep.y.size(); ++j) {
    const int i = f.snapped_breakpoint(rep.y[j], p.solver.snap_tol);
    if (i > 0) {
      // Clarke-interval midpoint at snapped nodes, flagged below
      rep.chi[j] = f.clarke(f.breakpoints()[static_cast<std::size_t>(i) - 1]).midpoint();
      ++rep.breakpoint_node_count;
    } else {
      rep.chi[j] = f.piece(f.piece_index(rep.y[j])).d1(rep.y[j]);
    }
    if (!f.clarke(rep.y[j]).contains(rep.chi[j], 1e-12)) rep.chi_in_clarke = false;
  }

  rep.p = solve_adjoint(p, rep.chi, rep.y);
  rep.lambda = lambda_from_p(p, rep.p);
  rep.d = rep.p;
  kernels::axpy(p.nu, u.values(), rep.d.values());
  kernels::axpy(p.kappa, rep.lambda.values(), rep.d.values());
  rep.d.set_trace(GridFunction::Trace::free);

  // adjoint equation residual
  {
    GridFunction r = p.op.apply(rep.p, &rep.chi);
    for (int j = 0; j < r.size(); ++j) r[j] -= p.integrand.dy(j, rep.y[j]);
    rep.adjoint_residual = norm(r, NormKind::Linf);
  }

  for (int j = 0; j < u.size(); ++j) {
    const double tgt = std::clamp(-(rep.p[j] + p.kappa * rep.lambda[j]) / p.nu, p.alpha, p.beta);
    rep.residual_projection_u = std::max(rep.residual_projection_u, std::abs(u[j] - tgt));
    const double lam_tgt = std::clamp(-rep.p[j] / p.kappa, -1.0, 1.0);
    rep.residual_projection_lambda =
        std::max(rep.residual_projection_lambda, std::abs(rep.lambda[j] - lam_tgt));
  }

  // sparsity relation u = 0 <=> |p| <= kappa, excluding the |p| ~ kappa band
  const double band = 1e-6 * std::max(1.0, p.kappa);
  const double ub = zero_band(u);
  for (int j = 0; j < u.size(); ++j) {
    if (std::abs(std::abs(rep.p[j]) - p.kappa) <= band) continue;
    if (std::abs(rep.p[j]) < p.kappa && std::abs(u[j]) > ub)
      rep.residual_sparsity = std::max(rep.residual_sparsity, std::abs(u[j]));
    if (std::abs(rep.p[j]) > p.kappa && std::abs(u[j]) <= ub)
      rep.residual_sparsity =
          std::max(rep.residual_sparsity, std::abs(rep.p[j]) - p.kappa);
  }

  // variational inequality over the box: test the extreme patterns
  {
    const double w = p.grid->cell_volume();
    double base = 0.0, worst = 0.0, d_l1 = 0.0;
    for (int j = 0; j < u.size(); ++j) {
      base += rep.d[j] * u[j];
      d_l1 += std::abs(rep.d[j]);
    }
    auto pattern_value = [&](auto&& pick) {
      double s = 0.0;
      for (int j = 0; j < u.size(); ++j) s += rep.d[j] * pick(rep.d[j]);
      return w * (s - base);
    };
    const double va = pattern_value([&](double) { return p.alpha; });
    const double vb = pattern_value([&](double) { return p.beta; });
    const double vw = pattern_value([&](double dj) { return dj > 0.0 ? p.alpha : p.beta; });
    const double scale = std::max(1.0, w * d_l1 * (p.beta - p.alpha));
    worst = std::max({0.0, -va, -vb, -vw});
    rep.residual_vi = worst / scale;
  }
  return rep;
}

StructureReport check_structure(const GridFunction& y, const PiecewiseSmoothFunction& f,
                                std::vector<double> eps_grid) {
  StructureReport rep;
  if (eps_grid.empty()) {
    for (int k = 0; k <= 20; ++k)
      eps_grid.push_back(std::pow(10.0, -3.0 + 2.0 * k / 20.0));
  }
  std::sort(eps_grid.begin(), eps_grid.end());
  rep.eps_grid = eps_grid;

  const double w = y.grid().cell_volume();
  for (double eps : eps_grid) {
    double m = 0.0;
    for (int j = 0; j < y.size(); ++j)
      for (double tau : f.breakpoints())
        if (std::abs(y[j] - tau) < eps) m += w;
    rep.measure.push_back(m);
  }

  // least-squares slope in log-log over positive entries
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
      if (rep.measure[k] <= 0.0) continue;
      const double lx = std::log(eps_grid[k]), ly = std::log(rep.measure[k]);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++cnt;
    }
    rep.slope = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  }
  rep.c_s = 0.0;
  for (std::size_t k = 0; k < eps_grid.size(); ++k)
    rep.c_s = std::max(rep.c_s, rep.measure[k] / eps_grid[k]);

  LevelSetOptions lopt;
  lopt.throw_on_degenerate = false;
  rep.min_level_grad = std::numeric_limits<double>::infinity();
  bool any_degenerate = false, any_set = false;
  for (double tau : f.breakpoints()) {
    const LevelSet ls = extract_level_set(y, tau, lopt);
    const bool has = y.grid().dim == 1 ? !ls.crossings.empty() : !ls.segments.empty();
    if (has) {
      any_set = true;
      rep.min_level_grad = std::min(rep.min_level_grad, ls.min_grad);
      any_degenerate = any_degenerate || ls.degenerate;
    }
    if (tau == 0.0) rep.dist_zero_level_to_boundary = ls.dist_to_boundary;
  }
  if (!any_set) rep.min_level_grad = 0.0;

  rep.sa_pass = std::abs(rep.slope - 1.0) <= 0.25 && std::isfinite(rep.c_s);
  rep.grad_pass = !any_degenerate;
  return rep;
}

std::vector<SparsitySweepRow> sparsity_sweep(const ControlProblem& p,
                                             const std::vector<double>& kappas,
                                             const OptimizeOptions& opts) {
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    if (!(kappas[k] > 0.0)) throw std::invalid_argument("sparsity_sweep: kappa must be > 0");
    if (k > 0 && !(kappas[k] > kappas[k - 1]))
      throw std::invalid_argument("sparsity_sweep: kappa list must be increasing");
  }
  std::vector<SparsitySweepRow> rows;
  GridFunction warm(p.grid, 0.0, GridFunction::Trace::free);
  for (double kap : kappas) {
    ControlProblem pk = p;
    pk.kappa = kap;
    SparsitySweepRow row;
    row.kappa = kap;
    try {
      const OptimizeReport r = solve_continuation(pk, {}, warm, opts);
      warm = r.u;
      const double ub = zero_band(r.u);
      double supp = 0.0;
      for (int j = 0; j < r.u.size(); ++j)
        if (std::abs(r.u[j]) > ub) supp += p.grid->cell_volume();
      row.support_measure = supp;
      row.l1_norm = eval_j(pk, r.u);
      const GradientReport g = grad_F(pk, r.u);
      row.p_inf_norm = norm(g.p, NormKind::Linf);
      row.ok = r.ok;
    } catch (const SolveError&) {
      row.ok = false;
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace nsoc
