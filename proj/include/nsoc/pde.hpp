#pragma once

#include <string>
#include <vector>

#include "nsoc/problem.hpp"

namespace nsoc {

struct StateSolveReport {
  GridFunction y;
  int iterations = 0;
  double final_residual = 0.0;
  std::string method; // "semismooth-newton" | "damped-picard" | "newton"
  bool ok = false;
  std::vector<double> residual_history;
};

struct SolveError : std::runtime_error {
  std::vector<double> residual_history;
  SolveError(const std::string& what, std::vector<double> hist)
      : std::runtime_error(what), residual_history(std::move(hist)) {}
};

// Throws SolveError unless the report converged.
const StateSolveReport& require_converged(const StateSolveReport& r);

/// Semismooth Newton on the nodal system A y + f(y) = u with damped Picard
/// fallback. y0, when given, is the warm start.
StateSolveReport solve_state(const ControlProblem& p, const GridFunction& u,
                             const GridFunction* y0 = nullptr);

/// Newton on A y + f_eps(y) = u.
StateSolveReport solve_state_mollified(const ControlProblem& p, const GridFunction& u,
                                       double eps, const GridFunction* y0 = nullptr);

/// z = (A + diag(chi))^{-1} rhs; chi >= 0 nodewise.
GridFunction solve_linearized(const ControlProblem& p, const GridFunction& chi,
                              const GridFunction& rhs, const GridFunction* x0 = nullptr);

/// Adjoint solve with right-hand side dL/dy(., y).
GridFunction solve_adjoint(const ControlProblem& p, const GridFunction& chi,
                           const GridFunction& y, const GridFunction* x0 = nullptr);

/// Adjoint solve with an explicit right-hand side (A is assembled symmetric,
/// so this is the transpose solve).
GridFunction solve_adjoint_rhs(const ControlProblem& p, const GridFunction& chi,
                               const GridFunction& rhs, const GridFunction* x0 = nullptr);

/// Directional derivative of the control-to-state map: solves the nodal
/// system A d + f'(y; d) = h semismoothly, y = S(u). When no node of y is
/// snapped to a breakpoint this reduces to one linearized solve with
/// chi = f'(y).
GridFunction solve_dir_deriv(const ControlProblem& p, const GridFunction& u,
                             const GridFunction& h);
GridFunction solve_dir_deriv_at(const ControlProblem& p, const GridFunction& y,
                                const GridFunction& h);

/// chi = 1_{y not in E_f} f'(y) nodewise (0 at snapped nodes); returns the
/// snapped node count through the out parameter when given.
GridFunction chi_from_state(const ControlProblem& p, const GridFunction& y,
                            int* snapped_count = nullptr);

} // namespace nsoc
