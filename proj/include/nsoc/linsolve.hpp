#pragma once

#include "nsoc/elliptic.hpp"
#include "nsoc/grid.hpp"

namespace nsoc {

/// Solves (A + diag(chi)) x = rhs for the assembled SPD operator. In 1D the
/// tridiagonal system is solved directly; in 2D a Jacobi-preconditioned
/// conjugate gradient iteration runs to the given relative residual.
/// x0, when nonempty, is the CG warm start.
struct LinearSolve {
  double rel_tol = 1e-12;
  int max_iter = 0; // 0: pick from problem size
  GridFunction solve(const EllipticOperator& op, const GridFunction* chi,
                     const GridFunction& rhs, const GridFunction* x0 = nullptr) const;
};

} // namespace nsoc
