#include "nsoc/elliptic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "nsoc/kernels.hpp"

namespace nsoc {

void SparseMatrix::matvec(std::span<const double> x, std::span<double> y,
                          std::span<const double> diag_shift) const {
  kernels::csr_matvec(row_ptr, col, val, diag_shift, x, y);
}

bool SparseMatrix::is_symmetric(double tol) const {
  std::map<std::pair<int, int>, double> entries;
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      entries[{i, col[k]}] = val[k];
  for (const auto& [ij, v] : entries) {
    auto it = entries.find({ij.second, ij.first});
    const double vt = it == entries.end() ? 0.0 : it->second;
    if (std::abs(v - vt) > tol * std::max(1.0, std::abs(v))) return false;
  }
  return true;
}

GridFunction EllipticOperator::apply(const GridFunction& x,
                                     const GridFunction* chi) const {
  GridFunction y(grid);
  A.matvec(x.values(), y.values(),
           chi ? std::span<const double>(chi->values()) : std::span<const double>{});
  return y;
}

namespace {

struct Builder {
  int n;
  std::vector<std::vector<std::pair<int, double>>> rows;
  explicit Builder(int n_) : n(n_), rows(static_cast<std::size_t>(n_)) {}
  void add(int i, int j, double v) {
    if (j < 0 || j >= n) return; // Dirichlet neighbor, value 0
    rows[static_cast<std::size_t>(i)].emplace_back(j, v);
  }
  SparseMatrix finish() const {
    SparseMatrix m;
    m.rows = n;
    m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
      std::map<int, double> merged;
      for (auto [j, v] : rows[static_cast<std::size_t>(i)]) merged[j] += v;
      m.row_ptr[static_cast<std::size_t>(i) + 1] =
          m.row_ptr[static_cast<std::size_t>(i)] + static_cast<int>(merged.size());
      for (auto [j, v] : merged) {
        m.col.push_back(j);
        m.val.push_back(v);
      }
    }
    return m;
  }
};

} // namespace

EllipticOperator assemble_operator(const GridPtr& grid,
                                   const EllipticCoefficients& coef) {
  const Grid& g = *grid;
  const int n = g.num_nodes();

  std::vector<double> a0(static_cast<std::size_t>(n), coef.a0);
  if (coef.a0_nodal) {
    if (static_cast<int>(coef.a0_nodal->size()) != n)
      throw std::invalid_argument("assemble_operator: a0 field size mismatch");
    a0 = *coef.a0_nodal;
  }
  for (double v : a0)
    if (v < 0.0) throw std::invalid_argument("assemble_operator: a0 must be >= 0");

  EllipticOperator op;
  op.grid = grid;
  Builder b(n);

  if (g.dim == 1) {
    if (!(coef.a11 > 0.0) && !coef.a11_nodal)
      throw std::invalid_argument("assemble_operator: a11 must be positive");
    std::vector<double> a(static_cast<std::size_t>(n), coef.a11);
    if (coef.a11_nodal) {
      if (static_cast<int>(coef.a11_nodal->size()) != n)
        throw std::invalid_argument("assemble_operator: a11 field size mismatch");
      a = *coef.a11_nodal;
      for (double v : a)
        if (!(v > 0.0)) throw std::invalid_argument("assemble_operator: a11 must be positive");
    }
    // -(a y')' with midpoint coefficients a_{i+1/2} = (a_i + a_{i+1})/2;
    // at the boundary the one-sided node value is used.
    const double inv_h2 = 1.0 / (g.h[0] * g.h[0]);
    double emin = a[0];
    for (int i = 0; i < n; ++i) {
      const double am = i == 0 ? a[0] : 0.5 * (a[static_cast<std::size_t>(i) - 1] + a[static_cast<std::size_t>(i)]);
      const double ap = i == n - 1 ? a[static_cast<std::size_t>(n) - 1]
                                   : 0.5 * (a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(i) + 1]);
      b.add(i, i - 1, -am * inv_h2);
      b.add(i, i, (am + ap) * inv_h2 + a0[static_cast<std::size_t>(i)]);
      b.add(i, i + 1, -ap * inv_h2);
      emin = std::min(emin, a[static_cast<std::size_t>(i)]);
    }
    op.ellipticity = emin;
  } else {
    const double a11 = coef.a11, a22 = coef.a22, a12 = coef.a12;
    if (coef.a11_nodal)
      throw std::invalid_argument("assemble_operator: variable coefficients are 1D only");
    const double det = a11 * a22 - a12 * a12;
    if (!(a11 > 0.0) || !(det > 0.0))
      throw std::invalid_argument("assemble_operator: coefficient matrix must be SPD");
    const double ix2 = a11 / (g.h[0] * g.h[0]);
    const double iy2 = a22 / (g.h[1] * g.h[1]);
    const double cross = 2.0 * a12 / (4.0 * g.h[0] * g.h[1]);
    for (int j = 0; j < g.n[1]; ++j) {
      for (int i = 0; i < g.n[0]; ++i) {
        const int r = g.index(i, j);
        auto at = [&](int ii, int jj) -> int {
          if (ii < 0 || ii >= g.n[0] || jj < 0 || jj >= g.n[1]) return -1;
          return g.index(ii, jj);
        };
        b.add(r, r, 2.0 * ix2 + 2.0 * iy2 + a0[static_cast<std::size_t>(r)]);
        b.add(r, at(i - 1, j), -ix2);
        b.add(r, at(i + 1, j), -ix2);
        b.add(r, at(i, j - 1), -iy2);
        b.add(r, at(i, j + 1), -iy2);
        if (a12 != 0.0) {
          // centered stencil for -2 a12 d1 d2 y
          b.add(r, at(i + 1, j + 1), -cross);
          b.add(r, at(i - 1, j - 1), -cross);
          b.add(r, at(i + 1, j - 1), cross);
          b.add(r, at(i - 1, j + 1), cross);
        }
      }
    }
    // smallest eigenvalue of the 2x2 coefficient matrix
    const double tr = a11 + a22;
    op.ellipticity = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
  }

  op.A = b.finish();
  return op;
}

} // namespace nsoc
