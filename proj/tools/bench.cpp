// Timing comparison of the serial reference kernels against the OpenMP
// variants, plus one end-to-end state solve. Run with different
// OMP_NUM_THREADS settings to see scaling.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nsoc/expr.hpp"
#include "nsoc/kernels.hpp"
#include "nsoc/pde.hpp"

using namespace nsoc;
using Clock = std::chrono::steady_clock;

namespace {

template <class Fn>
double time_ms(int reps, Fn fn) {
  fn(); // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

volatile double sink = 0.0;

} // namespace

int main() {
  const int n = 1 << 20;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = unif(rng);
    b[i] = unif(rng);
  }

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif
  std::printf("%-22s %12s %12s %8s\n", "kernel", "serial[ms]", "parallel[ms]", "speedup");

  auto row = [&](const char* name, double ts, double tp) {
    std::printf("%-22s %12.3f %12.3f %8.2f\n", name, ts, tp, ts / tp);
  };

  row("dot (1M)", time_ms(50, [&] { sink = kernels::serial::dot(a, b); }),
      time_ms(50, [&] { sink = kernels::dot(a, b); }));
  row("sum_abs (1M)", time_ms(50, [&] { sink = kernels::serial::sum_abs(a); }),
      time_ms(50, [&] { sink = kernels::sum_abs(a); }));
  row("axpy (1M)", time_ms(50, [&] { kernels::serial::axpy(0.5, a, c); }),
      time_ms(50, [&] { kernels::axpy(0.5, a, c); }));

  {
    const auto grid = build_grid({0.0, 0.0}, {1.0, 1.0}, {511, 511});
    const EllipticOperator op = assemble_operator(grid, {});
    std::vector<double> x(static_cast<std::size_t>(grid->num_nodes()));
    std::vector<double> y(x.size());
    for (auto& v : x) v = unif(rng);
    row("matvec 5pt (511^2)",
        time_ms(20, [&] { kernels::serial::csr_matvec(op.A.row_ptr, op.A.col, op.A.val, {}, x, y); }),
        time_ms(20, [&] { op.A.matvec(x, y); }));
  }

  {
    const auto grid = build_grid({0.0, 0.0}, {1.0, 1.0}, {255, 255});
    ControlProblem p = make_problem(grid, make_max_nonlinearity(),
                                    GridFunction(grid), 1e-2, 5e-3, -2.0, 2.0);
    const GridFunction u =
        Expression::parse("(2*pi^2+1)*sin(pi*x1)*sin(pi*x2)").sample(grid);
    const double t = time_ms(3, [&] { sink = solve_state(p, u).final_residual; });
    std::printf("%-22s %12s %12.3f %8s\n", "state solve (255^2)", "-", t, "-");
  }
  return 0;
}
