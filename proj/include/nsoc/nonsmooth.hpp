#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nsoc {

/// One smooth piece of the nonlinearity: value and first two derivatives,
/// evaluable on all of R (used only on its assigned interval).
struct Piece {
  std::function<double(double)> f, d1, d2;

  static Piece polynomial(std::vector<double> coeffs_ascending);
  static Piece linear(double intercept, double slope) {
    return polynomial({intercept, slope});
  }
};

struct ClarkeInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

class MollifiedFunction;

/// Finitely piecewise-C^2 monotone nonlinearity: breakpoints tau_1<...<tau_K
/// and K+1 pieces selected by the half-open intervals (tau_i, tau_{i+1}].
/// Construction validates continuity at each breakpoint, sampled
/// monotonicity of each piece, and a nonzero derivative jump sigma_i.
class PiecewiseSmoothFunction {
 public:
  PiecewiseSmoothFunction(std::vector<double> breakpoints, std::vector<Piece> pieces);

  int num_breakpoints() const { return static_cast<int>(tau_.size()); }
  const std::vector<double>& breakpoints() const { return tau_; }

  double value(double t) const;
  // Reject t exactly at a breakpoint; use dir_deriv or clarke there.
  double slope_offbreak(double t) const;
  double curvature_offbreak(double t) const;

  // f'(t; h): one-sided slope selected by the sign of h at breakpoints.
  double dir_deriv(double t, double h) const;

  // Jump of the derivative at tau_i (1-based): f'_{i-1}(tau_i) - f'_i(tau_i).
  double sigma(int i) const;
  double sigma_max() const;

  ClarkeInterval clarke(double t) const;

  // Quarter of the smallest breakpoint gap; 1 when K <= 1.
  double epsilon0() const;

  bool at_breakpoint(double t) const;
  // Index of the breakpoint t is snapped to (|t - tau_i| <= 1e-12 (1+|tau_i|)),
  // or -1. Used by the PDE layer to classify state nodes.
  int snapped_breakpoint(double t, double tol = 1e-12) const;

  MollifiedFunction mollify(double eps, int quad_order = 32) const;

  int piece_index(double t) const;
  const Piece& piece(int i) const { return pieces_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> tau_;
  std::vector<Piece> pieces_;
  std::vector<double> sigma_;
};

using NonlinearityPtr = std::shared_ptr<const PiecewiseSmoothFunction>;

NonlinearityPtr make_max_nonlinearity();
NonlinearityPtr make_polynomial_nonlinearity(std::vector<double> breakpoints,
                                             std::vector<std::vector<double>> coeffs);

/// f_eps = (1/eps) f * (psi o (Id/eps)) with the standard symmetric bump
/// psi(s) = c exp(-1/(1-s^2)) on (-1,1). The convolution integral is split
/// at the pullbacks of the breakpoints, then Gauss-Legendre quadrature of
/// the given order is applied per subinterval.
class MollifiedFunction {
 public:
  MollifiedFunction(const PiecewiseSmoothFunction* base, double eps, int quad_order);

  double eps() const { return eps_; }
  double value(double t) const;
  double deriv(double t) const;

 private:
  const PiecewiseSmoothFunction* base_;
  double eps_;
  int order_;
};

// Normalized bump kernel (unit mass on [-1,1]); exposed for oracle tests.
double mollifier_kernel(double s);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

} // namespace nsoc
