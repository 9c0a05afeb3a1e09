#include "nsoc/objective.hpp"

#include <algorithm>
#include <cmath>

#include "nsoc/kernels.hpp"

namespace nsoc {

double zero_band(const GridFunction& u) {
  return 1e-10 * std::max(1.0, norm(u, NormKind::Linf));
}

double eval_F(const ControlProblem& p, const GridFunction& u) {
  const StateSolveReport rep = solve_state(p, u);
  require_converged(rep);
  double track = 0.0;
  for (int j = 0; j < rep.y.size(); ++j) track += p.integrand.value(j, rep.y[j]);
  track *= p.grid->cell_volume();
  const double l2 = norm(u, NormKind::L2);
  return track + 0.5 * p.nu * l2 * l2;
}

double eval_j(const ControlProblem& p, const GridFunction& u) {
  return p.grid->cell_volume() * kernels::sum_abs(u.values());
}

double eval_J(const ControlProblem& p, const GridFunction& u) {
  return eval_F(p, u) + p.kappa * eval_j(p, u);
}

GradientReport grad_F(const ControlProblem& p, const GridFunction& u,
                      const GridFunction* y_warm) {
  GradientReport g;
  const StateSolveReport rep = solve_state(p, u, y_warm);
  require_converged(rep);
  g.y = rep.y;
  g.chi = chi_from_state(p, g.y, &g.breakpoint_nodes);
  g.p = solve_adjoint(p, g.chi, g.y);
  g.grad = g.p;
  kernels::axpy(p.nu, u.values(), g.grad.values());
  return g;
}

double j_dir_deriv(const GridFunction& u, const GridFunction& v) {
  if (!u.grid().same_as(v.grid())) throw std::invalid_argument("j_dir_deriv: grid mismatch");
  const double band = zero_band(u);
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    if (u[j] > band)
      s += v[j];
    else if (u[j] < -band)
      s -= v[j];
    else
      s += std::abs(v[j]);
  }
  return u.grid().cell_volume() * s;
}

GridFunction lambda_from_p(const ControlProblem& p, const GridFunction& padj) {
  GridFunction lam(padj.grid_ptr(), 0.0, GridFunction::Trace::free);
  for (int j = 0; j < padj.size(); ++j)
    lam[j] = std::clamp(-padj[j] / p.kappa, -1.0, 1.0);
  return lam;
}

MembershipViolation subgradient_membership(const GridFunction& u, const GridFunction& lambda,
                                           double tol) {
  MembershipViolation mv;
  const double band = zero_band(u);
  for (int j = 0; j < u.size(); ++j) {
    double viol = 0.0;
    if (u[j] > band)
      viol = std::abs(lambda[j] - 1.0);
    else if (u[j] < -band)
      viol = std::abs(lambda[j] + 1.0);
    else
      viol = std::max(0.0, std::abs(lambda[j]) - 1.0);
    if (viol > mv.worst) {
      mv.worst = viol;
      mv.worst_node = j;
    }
  }
  mv.member = mv.worst <= tol;
  return mv;
}

double prox_box_l1_scalar(double v, double gk, double alpha, double beta) {
  const double soft = v > gk ? v - gk : (v < -gk ? v + gk : 0.0);
  return std::clamp(soft, alpha, beta);
}

GridFunction prox_box_l1(const GridFunction& v, double gamma, double kappa,
                         double alpha, double beta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_box_l1: gamma must be positive");
  const double gk = gamma * kappa;
  GridFunction w(v.grid_ptr(), 0.0, GridFunction::Trace::free);
  kernels::map(v.values(), w.values(),
               [gk, alpha, beta](double x) { return prox_box_l1_scalar(x, gk, alpha, beta); });
  return w;
}

} // namespace nsoc
