#include "nsoc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace nsoc::kernels {

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double sum_abs(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z) {
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + alpha * y[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void csr_matvec(std::span<const int> row_ptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> diag_shift,
                std::span<const double> x, std::span<double> y) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    if (!diag_shift.empty()) s += diag_shift[i] * x[i];
    y[i] = s;
  }
}

} // namespace serial

namespace {

// Block-partial reduction; block order is fixed, so the result does not
// depend on the thread count.
template <class BlockFn, class Combine>
double blocked_reduce(std::size_t n, double init, BlockFn block_fn, Combine comb) {
  if (n == 0) return init;
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks);
  const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (nb > 4)
#endif
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, n);
    partial[b] = block_fn(lo, hi);
  }
  double s = init;
  for (double p : partial) s = comb(s, p);
  return s;
}

} // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_reduce(
      a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        return s;
      },
      [](double x, double y) { return x + y; });
}

double sum(std::span<const double> a) {
  return blocked_reduce(
      a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i];
        return s;
      },
      [](double x, double y) { return x + y; });
}

double sum_abs(std::span<const double> a) {
  return blocked_reduce(
      a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::abs(a[i]);
        return s;
      },
      [](double x, double y) { return x + y; });
}

double max_abs(std::span<const double> a) {
  return blocked_reduce(
      a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i]));
        return m;
      },
      [](double x, double y) { return std::max(x, y); });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 8192)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 8192)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) z[i] = x[i] + alpha * y[i];
}

void scale(double alpha, std::span<double> x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 8192)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= alpha;
}

void csr_matvec(std::span<const int> row_ptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> diag_shift,
                std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 2048)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    if (!diag_shift.empty()) s += diag_shift[i] * x[i];
    y[i] = s;
  }
}

} // namespace nsoc::kernels
