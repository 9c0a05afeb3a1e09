#include "nsoc/linsolve.hpp"

#include <cmath>
#include <stdexcept>

#include "nsoc/kernels.hpp"

namespace nsoc {

namespace {

GridFunction solve_tridiag(const EllipticOperator& op, const GridFunction* chi,
                           const GridFunction& rhs) {
  const int n = rhs.size();
  std::vector<double> dl(static_cast<std::size_t>(n), 0.0),
      d(static_cast<std::size_t>(n), 0.0), du(static_cast<std::size_t>(n), 0.0);
  const SparseMatrix& A = op.A;
  for (int i = 0; i < n; ++i) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (j == i - 1)
        dl[static_cast<std::size_t>(i)] = A.val[k];
      else if (j == i)
        d[static_cast<std::size_t>(i)] = A.val[k];
      else if (j == i + 1)
        du[static_cast<std::size_t>(i)] = A.val[k];
      else
        throw std::logic_error("solve_tridiag: matrix is not tridiagonal");
    }
    if (chi) d[static_cast<std::size_t>(i)] += (*chi)[i];
  }
  // Thomas algorithm
  std::vector<double> c(static_cast<std::size_t>(n)), r(static_cast<std::size_t>(n));
  GridFunction x(rhs.grid_ptr());
  c[0] = du[0] / d[0];
  r[0] = rhs[0] / d[0];
  for (int i = 1; i < n; ++i) {
    const double m = d[static_cast<std::size_t>(i)] -
                     dl[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i) - 1];
    c[static_cast<std::size_t>(i)] = du[static_cast<std::size_t>(i)] / m;
    r[static_cast<std::size_t>(i)] =
        (rhs[i] - dl[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i) - 1]) / m;
  }
  x[n - 1] = r[static_cast<std::size_t>(n) - 1];
  for (int i = n - 2; i >= 0; --i)
    x[i] = r[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)] * x[i + 1];
  return x;
}

GridFunction solve_cg(const EllipticOperator& op, const GridFunction* chi,
                      const GridFunction& rhs, const GridFunction* x0,
                      double rel_tol, int max_iter) {
  const int n = rhs.size();
  GridFunction x = x0 && !x0->empty() ? *x0 : GridFunction(rhs.grid_ptr());
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  const SparseMatrix& A = op.A;
  for (int i = 0; i < n; ++i) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      if (A.col[k] == i) diag[static_cast<std::size_t>(i)] = A.val[k];
    if (chi) diag[static_cast<std::size_t>(i)] += (*chi)[i];
  }

  auto chi_span = chi ? std::span<const double>(chi->values()) : std::span<const double>{};
  std::vector<double> r(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n)),
      p(static_cast<std::size_t>(n)), Ap(static_cast<std::size_t>(n));

  A.matvec(x.values(), Ap, chi_span);
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = rhs[i] - Ap[static_cast<std::size_t>(i)];
  const double bnorm = std::sqrt(kernels::dot(rhs.values(), rhs.values()));
  if (bnorm == 0.0) return GridFunction(rhs.grid_ptr());
  const double tol2 = (rel_tol * bnorm) * (rel_tol * bnorm);

  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = kernels::dot(r, z);
  if (max_iter <= 0) max_iter = 40 * static_cast<int>(std::sqrt(double(n))) + 200;

  for (int it = 0; it < max_iter; ++it) {
    if (kernels::dot(r, r) <= tol2) break;
    A.matvec(p, Ap, chi_span);
    const double alpha = rz / kernels::dot(p, Ap);
    kernels::axpy(alpha, p, x.values());
    kernels::axpy(-alpha, Ap, r);
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
    const double rz_new = kernels::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    kernels::add_scaled(z, beta, p, p);
  }
  if (kernels::dot(r, r) > tol2 * 4.0)
    throw std::runtime_error("cg: no convergence to requested residual");
  return x;
}

} // namespace

GridFunction LinearSolve::solve(const EllipticOperator& op, const GridFunction* chi,
                                const GridFunction& rhs, const GridFunction* x0) const {
  if (chi) {
    for (double v : chi->values())
      if (v < 0.0) throw std::invalid_argument("linear solve: negative reaction coefficient");
  }
  if (rhs.grid().dim == 1) return solve_tridiag(op, chi, rhs);
  return solve_cg(op, chi, rhs, x0, rel_tol, max_iter);
}

} // namespace nsoc
