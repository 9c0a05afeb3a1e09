#pragma once

#include <memory>
#include <string>

#include "nsoc/grid.hpp"

namespace nsoc {

/// Tiny expression language over the spatial coordinates: numbers, x (1D)
/// or x1/x2 (2D), pi, + - * / ^, unary minus, parentheses, and the
/// functions sin, cos, exp, abs. Used for targets and initial controls.
class Expression {
 public:
  static Expression parse(const std::string& text);
  double eval(double x1, double x2 = 0.0) const;
  GridFunction sample(const GridPtr& grid,
                      GridFunction::Trace tr = GridFunction::Trace::free) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

} // namespace nsoc
