#pragma once

#include <vector>

#include "nsoc/levelset.hpp"
#include "nsoc/objective.hpp"
#include "nsoc/optimizer.hpp"

namespace nsoc {

/// First-order system at a candidate control: adjoint state, multipliers,
/// and the residuals of the projection identities, the sparsity relation,
/// and the variational inequality.
struct StationarityReport {
  GridFunction u, y, p, lambda, d, chi;
  bool chi_in_clarke = true;
  int breakpoint_node_count = 0;
  double residual_projection_u = 0.0;
  double residual_projection_lambda = 0.0;
  double residual_sparsity = 0.0;
  double residual_vi = 0.0;
  double adjoint_residual = 0.0; // || A^T p + chi p - dL/dy ||_inf
};

StationarityReport build_stationarity(const ControlProblem& p, const GridFunction& u);

struct StructureReport {
  std::vector<double> eps_grid;
  std::vector<double> measure;  // sum over breakpoints of |{|y - tau_i| < eps}|
  double slope = 0.0;           // log-log least squares fit
  double c_s = 0.0;             // max over eps of measure/eps
  double min_level_grad = 0.0;  // over all breakpoint level sets
  double dist_zero_level_to_boundary = -1.0; // only when 0 is a breakpoint
  bool sa_pass = false;
  bool grad_pass = false;
};

StructureReport check_structure(const GridFunction& y, const PiecewiseSmoothFunction& f,
                                std::vector<double> eps_grid = {});

struct SparsitySweepRow {
  double kappa = 0.0;
  double support_measure = 0.0;
  double l1_norm = 0.0;
  double p_inf_norm = 0.0;
  bool ok = false;
};

std::vector<SparsitySweepRow> sparsity_sweep(const ControlProblem& p,
                                             const std::vector<double>& kappas,
                                             const OptimizeOptions& opts = {});

} // namespace nsoc
