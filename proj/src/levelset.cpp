#include "nsoc/levelset.hpp"

#include <algorithm>
#include <cmath>

namespace nsoc {

namespace {

// root of the quadratic through (x0,g0),(x1,g1),(x2,g2) inside [lo, hi];
// falls back to the secant root of the bracketing pair
double quadratic_root(double x0, double g0, double x1, double g1, double x2, double g2,
                      double lo, double hi) {
  // Newton divided differences
  const double d01 = (g1 - g0) / (x1 - x0);
  const double d12 = (g2 - g1) / (x2 - x1);
  const double c2 = (d12 - d01) / (x2 - x0);
  // g(x) = g1 + d(x - x1) + c2 (x - x1)(x - x0') form; expand around x1
  // g(x) = a (x-x1)^2 + b (x-x1) + c with
  const double a = c2;
  const double b = d01 + c2 * (x1 - x0);
  const double c = g1;
  double root;
  if (std::abs(a) < 1e-14 * std::max(1.0, std::abs(b))) {
    root = x1 - c / b;
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc < 0.0) {
      root = x1 - c / b;
    } else {
      const double sq = std::sqrt(disc);
      const double r1 = x1 + (-b + sq) / (2 * a);
      const double r2 = x1 + (-b - sq) / (2 * a);
      const bool in1 = r1 >= lo && r1 <= hi, in2 = r2 >= lo && r2 <= hi;
      if (in1 && in2)
        root = std::abs(r1 - 0.5 * (lo + hi)) < std::abs(r2 - 0.5 * (lo + hi)) ? r1 : r2;
      else if (in1)
        root = r1;
      else if (in2)
        root = r2;
      else
        root = x1 - c / b;
    }
  }
  return std::clamp(root, lo, hi);
}

LevelSet extract_1d(const GridFunction& y, double tau, const LevelSetOptions& opts) {
  const Grid& g = y.grid();
  LevelSet ls;
  ls.tau = tau;
  const int n = g.n[0];
  auto gx = [&](int i) { return g.low[0] + g.h[0] * (i + 1); }; // i in [-1, n]
  auto gv = [&](int i) { return y.at_full(i) - tau; };

  double max_grad = 0.0;
  for (int i = -1; i < n; ++i)
    max_grad = std::max(max_grad, std::abs(gv(i + 1) - gv(i)) / g.h[0]);

  const double span = g.high[0] - g.low[0];
  for (int i = -1; i < n; ++i) {
    const double a = gv(i), b = gv(i + 1);
    if ((a > 0.0) == (b > 0.0)) continue;
    // 3-node quadratic centered on the smaller-|g| end of the bracket
    int c = std::abs(a) <= std::abs(b) ? i : i + 1;
    c = std::clamp(c, 0, n - 1); // keep the stencil inside [-1, n]
    const double x0 = gx(c - 1), x1 = gx(c), x2 = gx(c + 1);
    const double root = quadratic_root(x0, gv(c - 1), x1, gv(c), x2, gv(c + 1), gx(i), gx(i + 1));
    if (root - g.low[0] <= 1e-12 * span || g.high[0] - root <= 1e-12 * span)
      continue; // boundary crossing, surface contribution vanishes
    // derivative of the same quadratic at the root
    const double d01 = (gv(c) - gv(c - 1)) / (x1 - x0);
    const double d12 = (gv(c + 1) - gv(c)) / (x2 - x1);
    const double c2 = (d12 - d01) / (x2 - x0);
    const double deriv = d01 + c2 * (2.0 * root - x0 - x1);
    ls.crossings.push_back({root, std::abs(deriv)});
  }

  ls.measure = static_cast<double>(ls.crossings.size());
  ls.min_grad = ls.crossings.empty() ? max_grad : ls.crossings.front().grad;
  ls.dist_to_boundary = span;
  for (const auto& cr : ls.crossings) {
    ls.min_grad = std::min(ls.min_grad, cr.grad);
    ls.dist_to_boundary =
        std::min({ls.dist_to_boundary, cr.x - g.low[0], g.high[0] - cr.x});
  }
  if (!ls.crossings.empty() && ls.min_grad <= opts.grad_floor_rel * max_grad) {
    ls.degenerate = true;
    if (opts.throw_on_degenerate)
      throw GradientDegenerateError("level set: |grad y| below floor at a crossing");
  }
  return ls;
}

struct CellPoint {
  double x, y;
};

LevelSet extract_2d(const GridFunction& f, double tau, const LevelSetOptions& opts) {
  const Grid& g = f.grid();
  LevelSet ls;
  ls.tau = tau;
  const int nx = g.n[0], ny = g.n[1];
  const double hx = g.h[0], hy = g.h[1];
  auto px = [&](int i) { return g.low[0] + hx * (i + 1); };
  auto py = [&](int j) { return g.low[1] + hy * (j + 1); };
  auto val = [&](int i, int j) { return f.at_full(i, j) - tau; };

  double max_grad = 0.0;
  ls.dist_to_boundary = std::max(g.high[0] - g.low[0], g.high[1] - g.low[1]);

  auto on_boundary = [&](double x, double y) {
    const double sx = g.high[0] - g.low[0], sy = g.high[1] - g.low[1];
    return x - g.low[0] <= 1e-12 * sx || g.high[0] - x <= 1e-12 * sx ||
           y - g.low[1] <= 1e-12 * sy || g.high[1] - y <= 1e-12 * sy;
  };

  // cells indexed by lower-left corner (i,j) in [-1, n)
  for (int j = -1; j < ny; ++j) {
    for (int i = -1; i < nx; ++i) {
      const double v00 = val(i, j), v10 = val(i + 1, j);
      const double v01 = val(i, j + 1), v11 = val(i + 1, j + 1);
      const double gx_est = std::max(std::abs(v10 - v00), std::abs(v11 - v01)) / hx;
      const double gy_est = std::max(std::abs(v01 - v00), std::abs(v11 - v10)) / hy;
      max_grad = std::max(max_grad, std::hypot(gx_est, gy_est));

      int code = 0;
      if (v00 > 0.0) code |= 1;
      if (v10 > 0.0) code |= 2;
      if (v11 > 0.0) code |= 4;
      if (v01 > 0.0) code |= 8;
      if (code == 0 || code == 15) continue;

      const double x0 = px(i), y0c = py(j);
      auto edge_bottom = [&] { return CellPoint{x0 + hx * v00 / (v00 - v10), y0c}; };
      auto edge_top = [&] { return CellPoint{x0 + hx * v01 / (v01 - v11), y0c + hy}; };
      auto edge_left = [&] { return CellPoint{x0, y0c + hy * v00 / (v00 - v01)}; };
      auto edge_right = [&] { return CellPoint{x0 + hx, y0c + hy * v10 / (v10 - v11)}; };

      std::vector<std::pair<CellPoint, CellPoint>> segs;
      switch (code) {
        case 1: case 14: segs.push_back({edge_left(), edge_bottom()}); break;
        case 2: case 13: segs.push_back({edge_bottom(), edge_right()}); break;
        case 4: case 11: segs.push_back({edge_right(), edge_top()}); break;
        case 8: case 7:  segs.push_back({edge_top(), edge_left()}); break;
        case 3: case 12: segs.push_back({edge_left(), edge_right()}); break;
        case 6: case 9:  segs.push_back({edge_bottom(), edge_top()}); break;
        case 5: case 10: {
          // saddle: resolve with the cell-center average (asymptotic decider)
          const double center = 0.25 * (v00 + v10 + v01 + v11);
          const bool center_pos = center > 0.0;
          if ((code == 5) == center_pos) {
            segs.push_back({edge_left(), edge_top()});
            segs.push_back({edge_bottom(), edge_right()});
          } else {
            segs.push_back({edge_left(), edge_bottom()});
            segs.push_back({edge_right(), edge_top()});
          }
          break;
        }
      }

      for (auto& [a, b] : segs) {
        if (on_boundary(a.x, a.y) && on_boundary(b.x, b.y)) continue;
        Segment s;
        s.x0 = a.x; s.y0 = a.y; s.x1 = b.x; s.y1 = b.y;
        s.length = std::hypot(b.x - a.x, b.y - a.y);
        if (s.length == 0.0) continue;
        s.mid_x = 0.5 * (a.x + b.x);
        s.mid_y = 0.5 * (a.y + b.y);
        // bilinear gradient at the midpoint
        const double tx = (s.mid_x - x0) / hx, ty = (s.mid_y - y0c) / hy;
        const double dx = ((v10 - v00) * (1.0 - ty) + (v11 - v01) * ty) / hx;
        const double dy = ((v01 - v00) * (1.0 - tx) + (v11 - v10) * tx) / hy;
        s.grad = std::hypot(dx, dy);
        ls.segments.push_back(s);
        ls.measure += s.length;
        const double bd = std::min(
            {s.mid_x - g.low[0], g.high[0] - s.mid_x, s.mid_y - g.low[1], g.high[1] - s.mid_y});
        ls.dist_to_boundary = std::min(ls.dist_to_boundary, bd);
      }
    }
  }

  ls.min_grad = ls.segments.empty() ? max_grad : ls.segments.front().grad;
  for (const auto& s : ls.segments) ls.min_grad = std::min(ls.min_grad, s.grad);
  if (!ls.segments.empty() && ls.min_grad <= opts.grad_floor_rel * max_grad) {
    ls.degenerate = true;
    if (opts.throw_on_degenerate)
      throw GradientDegenerateError("level set: |grad y| below floor on a segment");
  }
  return ls;
}

} // namespace

LevelSet extract_level_set(const GridFunction& y, double tau, const LevelSetOptions& opts) {
  return y.grid().dim == 1 ? extract_1d(y, tau, opts) : extract_2d(y, tau, opts);
}

double interp_quadratic(const GridFunction& f, double x) {
  const Grid& g = f.grid();
  const int n = g.n[0];
  // nearest node index in the extended line [-1, n]
  int c = static_cast<int>(std::lround((x - g.low[0]) / g.h[0])) - 1;
  c = std::clamp(c, 0, n - 1);
  const double x0 = g.low[0] + g.h[0] * c; // node c-1
  const double g0 = f.at_full(c - 1), g1 = f.at_full(c), g2 = f.at_full(c + 1);
  const double t = (x - x0) / g.h[0]; // in node units from node c-1
  // Lagrange on equispaced nodes {0,1,2}
  return 0.5 * g0 * (t - 1.0) * (t - 2.0) - g1 * t * (t - 2.0) + 0.5 * g2 * t * (t - 1.0);
}

double interp_bilinear(const GridFunction& f, double x, double y) {
  const Grid& g = f.grid();
  int i = static_cast<int>(std::floor((x - g.low[0]) / g.h[0])) - 1;
  int j = static_cast<int>(std::floor((y - g.low[1]) / g.h[1])) - 1;
  i = std::clamp(i, -1, g.n[0] - 1);
  j = std::clamp(j, -1, g.n[1] - 1);
  const double x0 = g.low[0] + g.h[0] * (i + 1), y0 = g.low[1] + g.h[1] * (j + 1);
  const double tx = std::clamp((x - x0) / g.h[0], 0.0, 1.0);
  const double ty = std::clamp((y - y0) / g.h[1], 0.0, 1.0);
  const double v00 = f.at_full(i, j), v10 = f.at_full(i + 1, j);
  const double v01 = f.at_full(i, j + 1), v11 = f.at_full(i + 1, j + 1);
  return v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty) + v01 * (1 - tx) * ty + v11 * tx * ty;
}

} // namespace nsoc
