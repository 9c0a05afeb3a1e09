#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel nodal kernels. Every kernel has a serial reference
// implementation in kernels::serial used by the tests and the benchmark;
// the primary entry points run the OpenMP variants when compiled with
// OpenMP and fall back to the serial ones otherwise.
//
// Reductions use a fixed block decomposition (partial sums per block of
// kReductionBlock entries, accumulated in block order), so results are
// identical for any thread count.

namespace nsoc::kernels {

inline constexpr std::size_t kReductionBlock = 4096;

namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double sum_abs(std::span<const double> a);
double max_abs(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// z = x + alpha * y
void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z);
void scale(double alpha, std::span<double> x);
// y = A x for CSR (row_ptr/col/val) plus diagonal shift: y = Ax + d .* x
void csr_matvec(std::span<const int> row_ptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> diag_shift,
                std::span<const double> x, std::span<double> y);

} // namespace serial

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double sum_abs(std::span<const double> a);
double max_abs(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z);
void scale(double alpha, std::span<double> x);
void csr_matvec(std::span<const int> row_ptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> diag_shift,
                std::span<const double> x, std::span<double> y);

// Applies fn to every entry: out[i] = fn(in[i]). Fn must be re-entrant.
template <class Fn>
void map(std::span<const double> in, std::span<double> out, Fn fn) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 2048)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(in[i]);
}

} // namespace nsoc::kernels
