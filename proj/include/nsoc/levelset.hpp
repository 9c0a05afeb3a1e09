#pragma once

#include <stdexcept>
#include <vector>

#include "nsoc/grid.hpp"

namespace nsoc {

struct GradientDegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Crossing {          // 1D
  double x = 0.0;
  double grad = 0.0;       // |y'(x)|
};

struct Segment {           // 2D marching-squares segment
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double length = 0.0;
  double grad = 0.0;       // |grad y| at the midpoint (bilinear)
  double mid_x = 0.0, mid_y = 0.0;
};

/// Level set {y = tau} extracted from the nodal field (boundary ring
/// included with value 0). Crossings/segments lying on the domain boundary
/// are dropped: fields in H^1_0 vanish there, so their surface
/// contributions are zero.
struct LevelSet {
  double tau = 0.0;
  std::vector<Crossing> crossings; // 1D
  std::vector<Segment> segments;   // 2D
  double measure = 0.0;            // counting measure (1D) / total length (2D)
  double min_grad = 0.0;
  double dist_to_boundary = 0.0;   // from the retained part to the domain boundary
  bool degenerate = false;         // some |grad| fell below the floor
};

struct LevelSetOptions {
  double grad_floor_rel = 1e-3; // relative to the max gradient magnitude
  bool throw_on_degenerate = true;
};

LevelSet extract_level_set(const GridFunction& y, double tau,
                           const LevelSetOptions& opts = {});

// Quadratic interpolation through the 3 nodes nearest to x (1D).
double interp_quadratic(const GridFunction& f, double x);
// Bilinear interpolation at (x, y) (2D).
double interp_bilinear(const GridFunction& f, double x, double y);

} // namespace nsoc
