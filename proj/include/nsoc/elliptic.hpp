#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nsoc/grid.hpp"

namespace nsoc {

struct SparseMatrix {
  int rows = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void matvec(std::span<const double> x, std::span<double> y,
              std::span<const double> diag_shift = {}) const;
  bool is_symmetric(double tol = 0.0) const;
};

/// Coefficients of A y = -sum_ij d_j(a_ij d_i y) + a0 y. In 1D a11 may be
/// a per-node field; in 2D the a_ij are a constant SPD 2x2 matrix.
struct EllipticCoefficients {
  double a11 = 1.0;
  double a22 = 1.0;
  double a12 = 0.0;
  std::optional<std::vector<double>> a11_nodal; // 1D only
  double a0 = 0.0;
  std::optional<std::vector<double>> a0_nodal;
};

/// Assembled second-order centered finite-difference operator on the
/// interior nodes. The zero-order term enters the diagonal through the
/// lumped mass, so reaction terms stay nodewise.
struct EllipticOperator {
  GridPtr grid;
  SparseMatrix A;
  double ellipticity = 1.0;

  // y = A x + chi .* x  (chi optional nodewise reaction)
  GridFunction apply(const GridFunction& x,
                     const GridFunction* chi = nullptr) const;
};

EllipticOperator assemble_operator(const GridPtr& grid,
                                   const EllipticCoefficients& coef);

} // namespace nsoc
