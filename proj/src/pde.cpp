#include "nsoc/pde.hpp"

#include <algorithm>
#include <cmath>

#include "nsoc/kernels.hpp"
#include "nsoc/linsolve.hpp"

namespace nsoc {

Integrand Integrand::tracking(GridFunction y_d) {
  auto yd = std::make_shared<GridFunction>(std::move(y_d));
  Integrand L;
  L.value = [yd](int j, double y) {
    const double d = y - (*yd)[j];
    return 0.5 * d * d;
  };
  L.dy = [yd](int j, double y) { return y - (*yd)[j]; };
  L.dyy = [yd](int, double) { return 1.0; };
  return L;
}

ControlProblem make_problem(GridPtr grid, NonlinearityPtr f, GridFunction y_d,
                            double nu, double kappa, double alpha, double beta,
                            EllipticCoefficients coef) {
  ControlProblem p;
  p.grid = grid;
  p.op = assemble_operator(grid, coef);
  p.f = std::move(f);
  p.integrand = Integrand::tracking(std::move(y_d));
  p.nu = nu;
  p.kappa = kappa;
  p.alpha = alpha;
  p.beta = beta;
  p.validate();
  return p;
}

const StateSolveReport& require_converged(const StateSolveReport& r) {
  if (!r.ok)
    throw SolveError("state solve did not converge (" + r.method + ", residual " +
                         std::to_string(r.final_residual) + ")",
                     r.residual_history);
  return r;
}

namespace {

double state_residual(const ControlProblem& p, const GridFunction& y,
                      const GridFunction& u, auto&& feval, GridFunction& r) {
  r = p.op.apply(y);
  const int n = y.size();
  for (int j = 0; j < n; ++j) r[j] += feval(y[j]) - u[j];
  return norm(r, NormKind::Linf);
}

// Newton iteration on A y + F(y) = u with nodewise slope selection. Solves
// the equivalent form (A + chi) y+ = u - F(y) + chi .* y so iterative
// solves can warm-start from y.
StateSolveReport newton_loop(const ControlProblem& p, const GridFunction& u,
                             const GridFunction* y0, auto&& feval, auto&& fslope,
                             const char* method_tag) {
  StateSolveReport rep;
  rep.method = method_tag;
  rep.y = y0 && !y0->empty() ? *y0 : GridFunction(p.grid);
  const int n = rep.y.size();
  LinearSolve lin{p.solver.lin_rel_tol};
  GridFunction r(p.grid), chi(p.grid), rhs(p.grid);

  for (int it = 0; it <= p.solver.newton_max; ++it) {
    rep.final_residual = state_residual(p, rep.y, u, feval, r);
    rep.residual_history.push_back(rep.final_residual);
    rep.iterations = it;
    if (rep.final_residual <= p.solver.newton_tol) {
      rep.ok = true;
      return rep;
    }
    if (it == p.solver.newton_max) break;
    for (int j = 0; j < n; ++j) {
      chi[j] = fslope(rep.y[j]);
      rhs[j] = u[j] - feval(rep.y[j]) + chi[j] * rep.y[j];
    }
    rep.y = lin.solve(p.op, &chi, rhs, &rep.y);
  }
  return rep;
}

// Damped Picard fallback: y <- (A + cI)^{-1} (u - F(y) + c y).
StateSolveReport picard_loop(const ControlProblem& p, const GridFunction& u,
                             GridFunction y, auto&& feval, double c,
                             std::vector<double> history) {
  StateSolveReport rep;
  rep.method = "damped-picard";
  rep.residual_history = std::move(history);
  LinearSolve lin{p.solver.lin_rel_tol};
  const int n = y.size();
  GridFunction r(p.grid), rhs(p.grid), cvec(p.grid, c);
  for (int it = 0; it <= p.solver.picard_max; ++it) {
    rep.final_residual = state_residual(p, y, u, feval, r);
    rep.residual_history.push_back(rep.final_residual);
    rep.iterations = it;
    if (rep.final_residual <= p.solver.newton_tol) {
      rep.ok = true;
      break;
    }
    if (it == p.solver.picard_max) break;
    for (int j = 0; j < n; ++j) rhs[j] = u[j] - feval(y[j]) + c * y[j];
    y = lin.solve(p.op, &cvec, rhs, &y);
  }
  rep.y = std::move(y);
  return rep;
}

} // namespace

StateSolveReport solve_state(const ControlProblem& p, const GridFunction& u,
                             const GridFunction* y0) {
  const PiecewiseSmoothFunction& f = *p.f;
  auto feval = [&](double t) { return f.value(t); };
  // Newton generalized derivative: right slope at snapped nodes (a valid
  // Clarke element), plain slope elsewhere.
  auto fslope = [&](double t) {
    const int i = f.snapped_breakpoint(t, p.solver.snap_tol);
    if (i > 0) return f.piece(i).d1(f.breakpoints()[static_cast<std::size_t>(i) - 1]);
    return f.piece(f.piece_index(t)).d1(t);
  };
  StateSolveReport rep = newton_loop(p, u, y0, feval, fslope, "semismooth-newton");
  if (rep.ok) return rep;

  // sup of probed slopes over the range reached so far, with margin
  double lo = -1.0, hi = 1.0;
  for (double v : rep.y.values()) {
    lo = std::min(lo, v - 1.0);
    hi = std::max(hi, v + 1.0);
  }
  double c = 0.0;
  for (int k = 0; k <= 128; ++k) {
    const double t = lo + (hi - lo) * k / 128.0;
    c = std::max(c, f.clarke(t).hi);
  }
  return picard_loop(p, u, std::move(rep.y), feval, std::max(c, 1.0),
                     std::move(rep.residual_history));
}

StateSolveReport solve_state_mollified(const ControlProblem& p, const GridFunction& u,
                                       double eps, const GridFunction* y0) {
  if (eps <= 0.0) return solve_state(p, u, y0);
  const MollifiedFunction feps = p.f->mollify(eps, p.moll_quad_order);
  auto feval = [&](double t) { return feps.value(t); };
  auto fslope = [&](double t) { return std::max(feps.deriv(t), 0.0); };
  StateSolveReport rep = newton_loop(p, u, y0, feval, fslope, "newton");
  if (rep.ok) return rep;
  double c = 0.0;
  for (int k = 0; k <= 128; ++k)
    c = std::max(c, feps.deriv(-10.0 + 20.0 * k / 128.0));
  return picard_loop(p, u, std::move(rep.y), feval, std::max(c, 1.0),
                     std::move(rep.residual_history));
}

GridFunction solve_linearized(const ControlProblem& p, const GridFunction& chi,
                              const GridFunction& rhs, const GridFunction* x0) {
  LinearSolve lin{p.solver.lin_rel_tol};
  return lin.solve(p.op, &chi, rhs, x0);
}

GridFunction solve_adjoint_rhs(const ControlProblem& p, const GridFunction& chi,
                               const GridFunction& rhs, const GridFunction* x0) {
  // A is assembled symmetric, so the transpose solve is the forward solve.
  LinearSolve lin{p.solver.lin_rel_tol};
  return lin.solve(p.op, &chi, rhs, x0);
}

GridFunction solve_adjoint(const ControlProblem& p, const GridFunction& chi,
                           const GridFunction& y, const GridFunction* x0) {
  GridFunction rhs(p.grid);
  for (int j = 0; j < y.size(); ++j) rhs[j] = p.integrand.dy(j, y[j]);
  return solve_adjoint_rhs(p, chi, rhs, x0);
}

GridFunction chi_from_state(const ControlProblem& p, const GridFunction& y,
                            int* snapped_count) {
  const PiecewiseSmoothFunction& f = *p.f;
  GridFunction chi(p.grid);
  int snapped = 0;
  for (int j = 0; j < y.size(); ++j) {
    if (f.snapped_breakpoint(y[j], p.solver.snap_tol) > 0) {
      chi[j] = 0.0;
      ++snapped;
    } else {
      chi[j] = f.piece(f.piece_index(y[j])).d1(y[j]);
    }
  }
  if (snapped_count) *snapped_count = snapped;
  return chi;
}

GridFunction solve_dir_deriv_at(const ControlProblem& p, const GridFunction& y,
                                const GridFunction& h) {
  const PiecewiseSmoothFunction& f = *p.f;
  const int n = y.size();
  LinearSolve lin{p.solver.lin_rel_tol};

  std::vector<int> snap(static_cast<std::size_t>(n), -1);
  bool any_snapped = false;
  for (int j = 0; j < n; ++j) {
    snap[static_cast<std::size_t>(j)] = f.snapped_breakpoint(y[j], p.solver.snap_tol);
    any_snapped = any_snapped || snap[static_cast<std::size_t>(j)] > 0;
  }

  GridFunction chi(p.grid);
  for (int j = 0; j < n; ++j) {
    const int i = snap[static_cast<std::size_t>(j)];
    chi[j] = i > 0 ? f.piece(i).d1(f.breakpoints()[static_cast<std::size_t>(i) - 1])
                   : f.piece(f.piece_index(y[j])).d1(y[j]);
  }
  GridFunction d = lin.solve(p.op, &chi, h);
  if (!any_snapped) return d;

  // semismooth iteration on the piecewise-linear reaction term at snapped
  // nodes: slope picked by the sign of the current direction value
  const double scale = std::max(1.0, norm(h, NormKind::Linf));
  for (int it = 0; it < 50; ++it) {
    GridFunction r = p.op.apply(d);
    for (int j = 0; j < n; ++j) {
      const int i = snap[static_cast<std::size_t>(j)];
      const double fd = i > 0 ? f.dir_deriv(f.breakpoints()[static_cast<std::size_t>(i) - 1], d[j])
                              : chi[j] * d[j];
      r[j] += fd - h[j];
    }
    if (norm(r, NormKind::Linf) <= p.solver.newton_tol * scale) return d;
    for (int j = 0; j < n; ++j) {
      const int i = snap[static_cast<std::size_t>(j)];
      if (i > 0) {
        const double tau = f.breakpoints()[static_cast<std::size_t>(i) - 1];
        chi[j] = d[j] < 0.0 ? f.piece(i - 1).d1(tau) : f.piece(i).d1(tau);
      }
    }
    d = lin.solve(p.op, &chi, h, &d);
  }
  GridFunction r = p.op.apply(d);
  std::vector<double> hist;
  for (int j = 0; j < n; ++j) {
    const int i = snap[static_cast<std::size_t>(j)];
    const double fd = i > 0 ? f.dir_deriv(f.breakpoints()[static_cast<std::size_t>(i) - 1], d[j])
                            : chi[j] * d[j];
    r[j] += fd - h[j];
  }
  hist.push_back(norm(r, NormKind::Linf));
  throw SolveError("solve_dir_deriv: semismooth iteration did not converge", hist);
}

GridFunction solve_dir_deriv(const ControlProblem& p, const GridFunction& u,
                             const GridFunction& h) {
  const StateSolveReport rep = solve_state(p, u);
  require_converged(rep);
  return solve_dir_deriv_at(p, rep.y, h);
}

} // namespace nsoc
