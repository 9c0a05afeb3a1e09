#pragma once

#include <functional>
#include <stdexcept>

#include "nsoc/elliptic.hpp"
#include "nsoc/grid.hpp"
#include "nsoc/nonsmooth.hpp"

namespace nsoc {

/// Tracking-type integrand descriptor: nodewise L(x, y) with first and
/// second derivative in y. The default is L = (y - y_d)^2 / 2.
struct Integrand {
  std::function<double(int, double)> value; // (node, y)
  std::function<double(int, double)> dy;
  std::function<double(int, double)> dyy;

  static Integrand tracking(GridFunction y_d);
};

struct SolverOptions {
  double newton_tol = 1e-10;   // nonlinear residual, L-inf
  int newton_max = 50;
  int picard_max = 500;
  double lin_rel_tol = 1e-12;  // linear solves, relative residual
  double snap_tol = 1e-12;     // breakpoint snap: |y - tau| <= tol (1+|tau|)
};

/// The full problem data: domain/operator, nonlinearity, tracking target,
/// Tikhonov weight nu, sparsity weight kappa, and control bounds.
struct ControlProblem {
  GridPtr grid;
  EllipticOperator op;
  NonlinearityPtr f;
  Integrand integrand;
  double nu = 1e-2;
  double kappa = 5e-3;
  double alpha = -2.0;
  double beta = 2.0;
  SolverOptions solver;
  int moll_quad_order = 32;

  void validate() const {
    if (!(nu > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("problem: nu and kappa must be positive");
    if (!(alpha < 0.0) || !(0.0 < beta))
      throw std::invalid_argument("problem: bounds must satisfy alpha < 0 < beta");
  }
};

ControlProblem make_problem(GridPtr grid, NonlinearityPtr f, GridFunction y_d,
                            double nu, double kappa, double alpha, double beta,
                            EllipticCoefficients coef = {});

} // namespace nsoc
