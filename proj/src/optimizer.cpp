#include "nsoc/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "nsoc/kernels.hpp"

namespace nsoc {

namespace {

struct SmoothEval {
  double value = 0.0;
  GridFunction y;
};

// F_eps(u) (+ anchor term), reusing the previous state as warm start.
SmoothEval eval_smooth(const ControlProblem& p, double eps, const GridFunction& u,
                       const GridFunction* anchor, const GridFunction* y_warm) {
  SmoothEval out;
  const StateSolveReport rep = solve_state_mollified(p, u, eps, y_warm);
  require_converged(rep);
  out.y = rep.y;
  double track = 0.0;
  for (int j = 0; j < out.y.size(); ++j) track += p.integrand.value(j, out.y[j]);
  track *= p.grid->cell_volume();
  const double l2 = norm(u, NormKind::L2);
  out.value = track + 0.5 * p.nu * l2 * l2;
  if (anchor) {
    const double d = norm(u - *anchor, NormKind::L2);
    out.value += 0.5 * d * d;
  }
  return out;
}

GridFunction smooth_gradient(const ControlProblem& p, double eps, const GridFunction& u,
                             const GridFunction& y, const GridFunction* anchor,
                             GridFunction* p_out) {
  GridFunction chi(p.grid);
  if (eps > 0.0) {
    const MollifiedFunction feps = p.f->mollify(eps, p.moll_quad_order);
    for (int j = 0; j < y.size(); ++j) chi[j] = std::max(feps.deriv(y[j]), 0.0);
  } else {
    chi = chi_from_state(p, y);
  }
  GridFunction padj = solve_adjoint(p, chi, y, p_out && !p_out->empty() ? p_out : nullptr);
  if (p_out) *p_out = padj;
  GridFunction g = padj;
  kernels::axpy(p.nu, u.values(), g.values());
  if (anchor) {
    kernels::axpy(1.0, u.values(), g.values());
    kernels::axpy(-1.0, anchor->values(), g.values());
  }
  return g;
}

} // namespace

StageReport solve_regularized(const ControlProblem& p, double eps,
                              const GridFunction& u_start, const GridFunction* anchor,
                              const OptimizeOptions& opts,
                              std::vector<IterationRecord>* log, int stage_id) {
  p.validate();
  StageReport rep;
  rep.eps = eps;
  rep.u = u_start;
  const double tol = eps > 0.0 ? opts.tol_stage : opts.tol_final;
  double gamma = opts.gamma0 > 0.0 ? opts.gamma0 : 1.0 / p.nu;

  GridFunction u = u_start;
  // keep iterates feasible from the start
  for (int j = 0; j < u.size(); ++j) u[j] = std::clamp(u[j], p.alpha, p.beta);

  SmoothEval cur = eval_smooth(p, eps, u, anchor, nullptr);
  double jcur = cur.value + p.kappa * eval_j(p, u);
  GridFunction padj;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const GridFunction g = smooth_gradient(p, eps, u, cur.y, anchor, &padj);
    GridFunction trial_pt = u;
    kernels::axpy(-gamma, g.values(), trial_pt.values());
    GridFunction u_next = prox_box_l1(trial_pt, gamma, p.kappa, p.alpha, p.beta);

    double step_inf = norm(u_next - u, NormKind::Linf);
    SmoothEval nxt = eval_smooth(p, eps, u_next, anchor, &cur.y);
    double jnext = nxt.value + p.kappa * eval_j(p, u_next);
    double dn = norm(u_next - u, NormKind::L2);

    // sufficient decrease; on failure shrink the step and retry
    int bt = 0;
    while (jnext > jcur - opts.armijo / gamma * dn * dn && bt < 60) {
      gamma *= 0.5;
      trial_pt = u;
      kernels::axpy(-gamma, g.values(), trial_pt.values());
      u_next = prox_box_l1(trial_pt, gamma, p.kappa, p.alpha, p.beta);
      step_inf = norm(u_next - u, NormKind::Linf);
      nxt = eval_smooth(p, eps, u_next, anchor, &cur.y);
      jnext = nxt.value + p.kappa * eval_j(p, u_next);
      dn = norm(u_next - u, NormKind::L2);
      ++bt;
    }
    if (bt >= 60) {
      rep.iterations = it;
      rep.final_residual = step_inf / gamma;
      rep.ok = step_inf / gamma <= tol; // exhausted line search at a fixed point
      break;
    }

    const double residual = step_inf / gamma;
    u = std::move(u_next);
    cur = std::move(nxt);
    jcur = jnext;
    rep.objective_history.push_back(jcur);
    rep.iterations = it;
    rep.final_residual = residual;
    if (log) log->push_back({stage_id, it, jcur, residual, gamma});
    if (residual <= tol) {
      rep.ok = true;
      break;
    }
  }
  rep.u = std::move(u);
  rep.gamma = gamma;
  return rep;
}

std::vector<double> default_eps_schedule(const OptimizeOptions& opts) {
  std::vector<double> s;
  for (double e = opts.eps_start; e >= opts.eps_floor; e /= opts.eps_factor) s.push_back(e);
  s.push_back(0.0);
  return s;
}

OptimizeReport solve_continuation(const ControlProblem& p, std::vector<double> schedule,
                                  const GridFunction& u_start, const OptimizeOptions& opts) {
  if (schedule.empty()) schedule = default_eps_schedule(opts);
  if (schedule.back() != 0.0) schedule.push_back(0.0);
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1]))
      throw std::invalid_argument("continuation: schedule must be strictly decreasing");

  OptimizeReport rep;
  GridFunction u = u_start;
  int stage_id = 0;
  for (double eps : schedule) {
    StageReport st = solve_regularized(p, eps, u, nullptr, opts, &rep.log, stage_id++);
    st.drift_from_previous = norm(st.u - u, NormKind::L2);
    u = st.u;
    rep.final_residual = st.final_residual;
    rep.ok = st.ok;
    rep.stages.push_back(std::move(st));
    if (!rep.stages.back().ok && eps == 0.0) break;
  }
  rep.u = std::move(u);
  rep.stationarity = stationarity_residual(p, rep.u);
  return rep;
}

double stationarity_residual(const ControlProblem& p, const GridFunction& u) {
  const GradientReport g = grad_F(p, u);
  const GridFunction lam = lambda_from_p(p, g.p);
  double worst = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    const double target = std::clamp(-(g.p[j] + p.kappa * lam[j]) / p.nu, p.alpha, p.beta);
    worst = std::max(worst, std::abs(u[j] - target));
  }
  return worst;
}

} // namespace nsoc
