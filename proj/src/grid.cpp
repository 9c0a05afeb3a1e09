#include "nsoc/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nsoc/kernels.hpp"

namespace nsoc {

bool Grid::same_as(const Grid& o) const {
  return dim == o.dim && low == o.low && high == o.high && n == o.n;
}

static void check_axis(double low, double high, int n) {
  if (n < 2) throw std::invalid_argument("grid: need at least 2 interior nodes per axis");
  if (!(low < high)) throw std::invalid_argument("grid: degenerate bounds");
}

GridPtr build_grid(double low, double high, int n) {
  check_axis(low, high, n);
  auto g = std::make_shared<Grid>();
  g->dim = 1;
  g->low = {low, 0.0};
  g->high = {high, 1.0};
  g->n = {n, 1};
  g->h = {(high - low) / (n + 1), 0.0};
  return g;
}

GridPtr build_grid(std::array<double, 2> low, std::array<double, 2> high,
                   std::array<int, 2> n) {
  check_axis(low[0], high[0], n[0]);
  check_axis(low[1], high[1], n[1]);
  auto g = std::make_shared<Grid>();
  g->dim = 2;
  g->low = low;
  g->high = high;
  g->n = n;
  g->h = {(high[0] - low[0]) / (n[0] + 1), (high[1] - low[1]) / (n[1] + 1)};
  return g;
}

double GridFunction::at_full(int i, int j) const {
  const Grid& g = *grid_;
  const bool inside = g.dim == 1 ? (i >= 0 && i < g.n[0])
                                 : (i >= 0 && i < g.n[0] && j >= 0 && j < g.n[1]);
  if (inside) return values_[static_cast<std::size_t>(g.dim == 1 ? i : g.index(i, j))];
  if (trace_ != Trace::zero)
    throw std::logic_error("at_full: boundary value of a free-trace field");
  return 0.0;
}

static void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.empty() || b.empty() || !a.grid().same_as(b.grid()))
    throw std::invalid_argument("grid mismatch");
}

double integrate(const GridFunction& f) {
  if (f.empty()) throw std::invalid_argument("integrate: empty field");
  return f.grid().cell_volume() * kernels::sum(f.values());
}

double inner(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  return a.grid().cell_volume() * kernels::dot(a.values(), b.values());
}

// Discrete H^1_0 seminorm squared: sum over grid edges of the squared
// difference quotient times the cell volume; boundary neighbors are 0.
static double h10_energy(const GridFunction& f) {
  const Grid& g = f.grid();
  if (f.trace() != GridFunction::Trace::zero)
    throw std::invalid_argument("H10 norm needs a zero-trace field");
  double e = 0.0;
  if (g.dim == 1) {
    const double inv_h = 1.0 / g.h[0];
    double prev = 0.0;
    for (int i = 0; i < g.n[0]; ++i) {
      const double d = f[i] - prev;
      e += d * d * inv_h;
      prev = f[i];
    }
    e += prev * prev * inv_h;
  } else {
    const double wx = g.h[1] / g.h[0];
    const double wy = g.h[0] / g.h[1];
    for (int j = 0; j < g.n[1]; ++j) {
      double prev = 0.0;
      for (int i = 0; i < g.n[0]; ++i) {
        const double d = f[g.index(i, j)] - prev;
        e += d * d * wx;
        prev = f[g.index(i, j)];
      }
      e += prev * prev * wx;
    }
    for (int i = 0; i < g.n[0]; ++i) {
      double prev = 0.0;
      for (int j = 0; j < g.n[1]; ++j) {
        const double d = f[g.index(i, j)] - prev;
        e += d * d * wy;
        prev = f[g.index(i, j)];
      }
      e += prev * prev * wy;
    }
  }
  return e;
}

double norm(const GridFunction& f, NormKind which) {
  if (f.empty()) throw std::invalid_argument("norm: empty field");
  switch (which) {
    case NormKind::Linf:
      return kernels::max_abs(f.values());
    case NormKind::L2:
      return std::sqrt(f.grid().cell_volume() * kernels::dot(f.values(), f.values()));
    case NormKind::H10:
      return std::sqrt(h10_energy(f));
  }
  return 0.0;
}

GridFunction nodal_coords(const GridPtr& g, int axis) {
  GridFunction f(g, 0.0, GridFunction::Trace::free);
  if (g->dim == 1) {
    for (int i = 0; i < g->n[0]; ++i) f[i] = g->coord(0, i);
  } else {
    for (int j = 0; j < g->n[1]; ++j)
      for (int i = 0; i < g->n[0]; ++i)
        f[g->index(i, j)] = axis == 0 ? g->coord(0, i) : g->coord(1, j);
  }
  return f;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction r = a;
  kernels::axpy(1.0, b.values(), r.values());
  return r;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction r = a;
  kernels::axpy(-1.0, b.values(), r.values());
  return r;
}

GridFunction operator*(double s, const GridFunction& a) {
  GridFunction r = a;
  kernels::scale(s, r.values());
  return r;
}

void write_gridfunction(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid();
  char buf[64];
  os << "grid " << g.dim;
  for (int d = 0; d < g.dim; ++d) {
    std::snprintf(buf, sizeof buf, " %.17g", g.low[d]);
    os << buf;
  }
  for (int d = 0; d < g.dim; ++d) {
    std::snprintf(buf, sizeof buf, " %.17g", g.high[d]);
    os << buf;
  }
  for (int d = 0; d < g.dim; ++d) os << ' ' << g.n[d];
  os << '\n';
  for (double v : f.values()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    os << buf;
  }
}

void write_gridfunction(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_gridfunction(os, f);
}

GridFunction read_gridfunction(std::istream& is) {
  std::string tag;
  int dim = 0;
  if (!(is >> tag >> dim) || tag != "grid" || (dim != 1 && dim != 2))
    throw std::runtime_error("gridfunction: bad header");
  std::array<double, 2> low{0, 0}, high{0, 1};
  std::array<int, 2> n{0, 1};
  for (int d = 0; d < dim; ++d) is >> low[d];
  for (int d = 0; d < dim; ++d) is >> high[d];
  for (int d = 0; d < dim; ++d) is >> n[d];
  if (!is) throw std::runtime_error("gridfunction: bad header fields");
  GridPtr g = dim == 1 ? build_grid(low[0], high[0], n[0]) : build_grid(low, high, n);
  GridFunction f(g, 0.0, GridFunction::Trace::free);
  for (int i = 0; i < f.size(); ++i) {
    if (!(is >> f[i])) throw std::runtime_error("gridfunction: truncated values");
  }
  return f;
}

GridFunction read_gridfunction(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_gridfunction(is);
}

} // namespace nsoc
