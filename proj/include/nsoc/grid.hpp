#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace nsoc {

/// Uniform tensor grid on an interval (dim 1) or axis-aligned rectangle
/// (dim 2) with homogeneous Dirichlet boundary. Only interior nodes carry
/// unknowns; n[d] is the interior node count per axis and
/// h[d] = (high[d] - low[d]) / (n[d] + 1).
struct Grid {
  int dim = 1;
  std::array<double, 2> low{0.0, 0.0};
  std::array<double, 2> high{1.0, 1.0};
  std::array<int, 2> n{0, 1};
  std::array<double, 2> h{0.0, 0.0};

  int num_nodes() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  double cell_volume() const { return dim == 1 ? h[0] : h[0] * h[1]; }

  // Interior node coordinate; 1D index i in [0, n0), 2D (i,j) with
  // row-major flattening idx = j*n0 + i (x1 fastest).
  double coord(int axis, int i) const { return low[axis] + h[axis] * (i + 1); }
  int index(int i, int j) const { return j * n[0] + i; }

  bool same_as(const Grid& o) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(double low, double high, int n);
GridPtr build_grid(std::array<double, 2> low, std::array<double, 2> high,
                   std::array<int, 2> n);

/// Nodal scalar field on the interior nodes of a grid. Fields representing
/// H^1_0 members have an implicit zero trace on the boundary; controls and
/// multipliers need no boundary condition and are marked free-trace.
class GridFunction {
 public:
  enum class Trace { zero, free };

  GridFunction() = default;
  explicit GridFunction(GridPtr g, double fill = 0.0, Trace tr = Trace::zero)
      : grid_(std::move(g)),
        values_(static_cast<std::size_t>(grid_->num_nodes()), fill),
        trace_(tr) {}

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  Trace trace() const { return trace_; }
  void set_trace(Trace t) { trace_ = t; }

  int size() const { return static_cast<int>(values_.size()); }
  double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Nodal value including the boundary ring: 1D i in [-1, n0], 2D likewise
  // per axis. Boundary returns 0 for zero-trace fields.
  double at_full(int i, int j = 0) const;

  bool empty() const { return !grid_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  Trace trace_ = Trace::zero;
};

enum class NormKind { L2, Linf, H10 };

/// Nodal (mass-lumped) quadrature: each interior node carries weight h
/// (1D) or h1*h2 (2D).
double integrate(const GridFunction& f);
double inner(const GridFunction& a, const GridFunction& b);
double norm(const GridFunction& f, NormKind which);

GridFunction nodal_coords(const GridPtr& g, int axis);

// u op v / scalar helpers (elementwise, same grid).
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

// Text serialization: header "grid <dim> <low...> <high...> <n...>", then
// one nodal value per line, row-major, 17 significant digits.
void write_gridfunction(std::ostream& os, const GridFunction& f);
void write_gridfunction(const std::string& path, const GridFunction& f);
GridFunction read_gridfunction(std::istream& is);
GridFunction read_gridfunction(const std::string& path);

} // namespace nsoc
