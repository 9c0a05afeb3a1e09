#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nsoc/objective.hpp"

namespace nsoc {

struct OptimizeOptions {
  double gamma0 = 0.0;       // 0: use 1/nu
  double armijo = 1e-4;
  double tol_stage = 1e-8;   // prox-gradient residual, eps > 0 stages
  double tol_final = 1e-9;   // final (eps = 0) stage
  int max_iter = 5000;
  double eps_start = 1e-1;
  double eps_floor = 1e-6;
  double eps_factor = 2.0;
};

struct IterationRecord {
  int stage = 0;
  int iteration = 0;
  double objective = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct StageReport {
  double eps = 0.0;
  GridFunction u;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> objective_history;
  bool ok = false;
  double gamma = 0.0;
  double drift_from_previous = 0.0; // ||u_k - u_{k-1}||_L2 across stages
};

struct OptimizeReport {
  GridFunction u;
  std::vector<StageReport> stages;
  double final_residual = 0.0; // prox residual of the last stage
  double stationarity = 0.0;   // projection-identity residual at the final u
  bool ok = false;
  std::vector<IterationRecord> log;
};

/// Proximal gradient on J_eps over the box, soft-thresholded by gamma kappa,
/// with backtracking on the smooth part. eps = 0 runs the non-smooth
/// problem with the exact gradient pipeline. The optional anchor adds the
/// proximal term |u - anchor|^2/2 to the objective.
StageReport solve_regularized(const ControlProblem& p, double eps,
                              const GridFunction& u_start,
                              const GridFunction* anchor = nullptr,
                              const OptimizeOptions& opts = {},
                              std::vector<IterationRecord>* log = nullptr, int stage_id = 0);

std::vector<double> default_eps_schedule(const OptimizeOptions& opts);

/// Warm-started continuation over a strictly decreasing eps schedule whose
/// last entry is 0 (appended when missing).
OptimizeReport solve_continuation(const ControlProblem& p, std::vector<double> schedule,
                                  const GridFunction& u_start,
                                  const OptimizeOptions& opts = {});

/// || u - proj_[alpha,beta](-(p + kappa lambda)/nu) ||_inf with p from the
/// exact gradient pipeline and lambda = proj_[-1,1](-p/kappa).
double stationarity_residual(const ControlProblem& p, const GridFunction& u);

} // namespace nsoc
