#pragma once

#include "nsoc/pde.hpp"
#include "nsoc/problem.hpp"

namespace nsoc {

// Nodes with |u_j| <= band count as u = 0 when classifying sign sets.
double zero_band(const GridFunction& u);

double eval_F(const ControlProblem& p, const GridFunction& u);
double eval_j(const ControlProblem& p, const GridFunction& u);
double eval_J(const ControlProblem& p, const GridFunction& u);

struct GradientReport {
  GridFunction grad; // p_u + nu u
  GridFunction y;
  GridFunction p;
  GridFunction chi;
  int breakpoint_nodes = 0; // >0 flags formally unverified Gateaux differentiability
};

GradientReport grad_F(const ControlProblem& p, const GridFunction& u,
                      const GridFunction* y_warm = nullptr);

/// j'(u; v) with the three-set nodal decomposition and the zero band.
double j_dir_deriv(const GridFunction& u, const GridFunction& v);

/// lambda = proj_[-1,1](-p / kappa), nodewise.
GridFunction lambda_from_p(const ControlProblem& p, const GridFunction& padj);

struct MembershipViolation {
  bool member = false;
  double worst = 0.0;
  int worst_node = -1;
};

/// Is lambda a subgradient of j at u (nodewise, with the zero band)?
MembershipViolation subgradient_membership(const GridFunction& u, const GridFunction& lambda,
                                           double tol = 1e-10);

/// Pointwise minimizer of (w - v)^2/2 + gamma kappa |w| over [alpha, beta]:
/// soft-threshold by gamma kappa, then clamp.
GridFunction prox_box_l1(const GridFunction& v, double gamma, double kappa,
                         double alpha, double beta);
double prox_box_l1_scalar(double v, double gk, double alpha, double beta);

} // namespace nsoc
