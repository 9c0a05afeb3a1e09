#pragma once

#include <random>
#include <string>
#include <vector>

#include "nsoc/stationarity.hpp"

namespace nsoc {

/// Window difference field zeta(u; t, h) = -sum_i sigma_i T_i built from the
/// states y = S(u) and y_t = S(u + t h).
GridFunction zeta_from_states(const PiecewiseSmoothFunction& f, const GridFunction& y,
                              const GridFunction& y_t);

struct ZetaReport {
  GridFunction zeta;
  GridFunction y;
  GridFunction y_t;
};

ZetaReport zeta_field(const ControlProblem& p, const GridFunction& u, double t,
                      const GridFunction& h);

/// Per-breakpoint window field T_i (1-based i) from two states.
GridFunction window_field_T(const PiecewiseSmoothFunction& f, int i, const GridFunction& y,
                            const GridFunction& y_t);

/// integral of p * sum_i T_i with the windows resolved below cell size:
/// the fields are treated as piecewise linear along grid lines and each
/// window becomes a subinterval with a quadratic integrand (1D only).
double integral_pT_subcell(const PiecewiseSmoothFunction& f, const GridFunction& y,
                           const GridFunction& y_t, const GridFunction& p);

std::vector<double> geometric_t_sequence(double t0 = 1e-1, double factor = 0.5, int len = 8);

struct QTildeEstimate {
  double estimate = 0.0;
  std::vector<double> ts;          // sorted decreasing
  std::vector<double> q;           // (1/t^2) integral p zeta
  std::vector<double> stabilized;  // Richardson-stabilized tail values
  double tail_variation = 0.0;     // |q_n - q_{n-1}| / max(1e-300, |q_n|)
};

/// Difference-quotient estimate of the window curvature term along one
/// geometric t-sequence; the minimum of the stabilized tail is reported.
QTildeEstimate Q_tilde_limit(const ControlProblem& p, const GridFunction& u_bar,
                             const GridFunction& p_bar, const GridFunction& h,
                             std::vector<double> ts = {});

/// Same quotient sequence with per-entry directions h_n (sequence-invariance
/// probes).
QTildeEstimate Q_tilde_limit_seq(const ControlProblem& p, const GridFunction& u_bar,
                                 const GridFunction& p_bar,
                                 const std::vector<GridFunction>& hs,
                                 std::vector<double> ts);

/// r(y) = integral p_bar [ chi_bar (y - y_bar) - f(y) + f(y_bar) ].
double taylor_remainder(const ControlProblem& p, const GridFunction& y_bar,
                        const GridFunction& p_bar, const GridFunction& y);

struct CurvatureBreakdown {
  double term_tracking = 0.0;  // d2L/dy2 z^2 + nu h^2
  double term_fsecond = 0.0;   // -1_{off E_f} p f'' z^2
  double term_surface = 0.0;   // sum_i sigma_i int p z^2 / |grad y|
  double Q = 0.0;
  double Q_tilde_explicit = 0.0; // surface term / 2
  GridFunction z;              // S'(u) h
  int surface_points = 0;
};

CurvatureBreakdown Q_explicit(const ControlProblem& p, const GridFunction& y_bar,
                              const GridFunction& p_bar, const GridFunction& h);

struct CriticalMembership {
  bool member = false;
  double sign_violation = 0.0;      // active-set sign conditions
  double pairing = 0.0;             // (p + nu u, v) + kappa j'(u; v)
  double pairing_scale = 1.0;
  double max_dv_product = 0.0;      // max_j |d_j v_j|
  double lambda_identity_violation = 0.0; // | |v| - lambda v | on {u = 0}
};

CriticalMembership critical_cone_membership(const ControlProblem& p,
                                            const StationarityReport& rep,
                                            const GridFunction& v, double tol = 1e-6);

/// Lemma-style densification: clamp to [-1/eps^2, 1/eps^2] where
/// u + eps v stays in the box and |u| is 0 or at least eps; zero elsewhere.
GridFunction densify_critical_direction(const ControlProblem& p,
                                        const StationarityReport& rep,
                                        const GridFunction& v, double eps);

/// Probe set for the second-order report: densified projected random
/// fields, coordinate bumps on {d = 0}, and the projected negative
/// gradient; non-members after projection are dropped.
std::vector<GridFunction> build_critical_probe_set(const ControlProblem& p,
                                                   const StationarityReport& rep, int count,
                                                   std::mt19937_64& rng);

struct SecondOrderRow {
  CurvatureBreakdown breakdown;
  QTildeEstimate qt_limit;
  CriticalMembership membership;
};

enum class SecondOrderVerdict { VACUOUS, INDEFINITE, NECESSARY_CONSISTENT, SUFFICIENT_INDICATED };
std::string to_string(SecondOrderVerdict v);

struct GrowthProbe {
  int samples = 0;
  double min_quotient = 0.0; // min (J(u) - J(u_bar)) / ||u - u_bar||_L2^2
};

struct SecondOrderReport {
  std::vector<SecondOrderRow> rows;
  SecondOrderVerdict verdict = SecondOrderVerdict::VACUOUS;
  double min_Q = 0.0;
  GrowthProbe growth;
};

struct SecondOrderOptions {
  double tol_necessary = 1e-8;
  double margin_sufficient = 1e-8;
  int growth_samples = 100;
  double growth_scale = 5e-2;
  std::uint64_t seed = 1;
  std::vector<double> t_sequence; // empty: geometric default
};

SecondOrderReport second_order_report(const ControlProblem& p, const StationarityReport& rep,
                                      const std::vector<GridFunction>& directions,
                                      const SecondOrderOptions& opts = {});

struct SubderivativeRow {
  double t = 0.0;
  double D = 0.0; // [F(u+th) - F(u) - t (w, h)] / (t^2/2)
};

std::vector<SubderivativeRow> second_subderivative_check(const ControlProblem& p,
                                                         const StationarityReport& rep,
                                                         const GridFunction& h,
                                                         std::vector<double> ts = {});

} // namespace nsoc
