#include "nsoc/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsoc/kernels.hpp"
#include "nsoc/levelset.hpp"

namespace nsoc {

namespace {

// window membership for breakpoint i (1-based): first window has sign +1,
// second -1, as in T_i = (y_t - tau_i)(1_{W1} - 1_{W2})
inline int window_sign(const PiecewiseSmoothFunction& f, int i, double ybar, double yt) {
  const auto& tau = f.breakpoints();
  const int K = f.num_breakpoints();
  const double ti = tau[static_cast<std::size_t>(i) - 1];
  const double t_lo = i >= 2 ? tau[static_cast<std::size_t>(i) - 2]
                             : -std::numeric_limits<double>::infinity();
  const double t_hi = i < K ? tau[static_cast<std::size_t>(i)]
                            : std::numeric_limits<double>::infinity();
  const double e0 = f.epsilon0();
  if (ybar > ti && ybar < t_hi && yt > ti - e0 && yt < ti) return 1;
  if (ybar > t_lo && ybar < ti && yt > ti && yt < ti + e0) return -1;
  return 0;
}

} // namespace

GridFunction window_field_T(const PiecewiseSmoothFunction& f, int i, const GridFunction& y,
                            const GridFunction& y_t) {
  GridFunction T(y.grid_ptr());
  const double tau = f.breakpoints()[static_cast<std::size_t>(i) - 1];
  for (int j = 0; j < y.size(); ++j) {
    const int s = window_sign(f, i, y[j], y_t[j]);
    if (s != 0) T[j] = s * (y_t[j] - tau);
  }
  return T;
}

GridFunction zeta_from_states(const PiecewiseSmoothFunction& f, const GridFunction& y,
                              const GridFunction& y_t) {
  GridFunction zeta(y.grid_ptr());
  const int K = f.num_breakpoints();
  for (int i = 1; i <= K; ++i) {
    const double sig = f.sigma(i);
    const double tau = f.breakpoints()[static_cast<std::size_t>(i) - 1];
    for (int j = 0; j < y.size(); ++j) {
      const int s = window_sign(f, i, y[j], y_t[j]);
      if (s != 0) zeta[j] -= sig * s * (y_t[j] - tau);
    }
  }
  return zeta;
}

ZetaReport zeta_field(const ControlProblem& p, const GridFunction& u, double t,
                      const GridFunction& h) {
  if (!(t > 0.0)) throw std::invalid_argument("zeta_field: t must be positive");
  ZetaReport rep;
  const StateSolveReport sy = solve_state(p, u);
  require_converged(sy);
  rep.y = sy.y;
  GridFunction ut = u;
  kernels::axpy(t, h.values(), ut.values());
  const StateSolveReport st = solve_state(p, ut, &rep.y);
  require_converged(st);
  rep.y_t = st.y;
  rep.zeta = zeta_from_states(*p.f, rep.y, rep.y_t);
  return rep;
}

double integral_pT_subcell(const PiecewiseSmoothFunction& f, const GridFunction& y,
                           const GridFunction& y_t, const GridFunction& p) {
  const Grid& g = y.grid();
  if (g.dim != 1)
    throw std::invalid_argument("integral_pT_subcell: 1D only");
  const int n = g.n[0];
  const double h = g.h[0];
  const double e0 = f.epsilon0();
  const int K = f.num_breakpoints();
  double total = 0.0;

  auto yb = [&](int i) { return y.at_full(i); };
  auto yt = [&](int i) { return y_t.at_full(i); };
  auto pv = [&](int i) { return p.at_full(i); };

  // On each cell the nodal fields are linear; each window condition is a
  // linear inequality, so the window is a subinterval and p (y_t - tau)
  // is quadratic there. Simpson is exact for that.
  for (int c = -1; c < n; ++c) {
    const double x0 = g.low[0] + h * (c + 1), x1 = x0 + h;
    const double a_y = yb(c), b_y = yb(c + 1);
    const double a_t = yt(c), b_t = yt(c + 1);
    const double a_p = pv(c), b_p = pv(c + 1);
    auto lin = [&](double va, double vb, double s) { return va + (vb - va) * s; };

    for (int i = 1; i <= K; ++i) {
      const auto& tau = f.breakpoints();
      const double ti = tau[static_cast<std::size_t>(i) - 1];
      const double t_lo = i >= 2 ? tau[static_cast<std::size_t>(i) - 2]
                                 : -std::numeric_limits<double>::infinity();
      const double t_hi = i < K ? tau[static_cast<std::size_t>(i)]
                                : std::numeric_limits<double>::infinity();

      // clip [0,1] by the linear condition lo < lin(va,vb,s) < hi
      auto clip = [&](double lo_s, double hi_s, double va, double vb, double lo, double hi,
                      bool& empty) -> std::pair<double, double> {
        double a = lo_s, b = hi_s;
        const double slope = vb - va;
        auto cut = [&](double bound, bool keep_below) {
          if (std::abs(slope) < 1e-300) {
            const bool ok = keep_below ? va < bound : va > bound;
            if (!ok) empty = true;
            return;
          }
          const double s = (bound - va) / slope;
          const bool below_left = slope > 0.0 ? true : false;
          if (keep_below) { // lin < bound
            if (below_left) b = std::min(b, s); else a = std::max(a, s);
          } else { // lin > bound
            if (below_left) a = std::max(a, s); else b = std::min(b, s);
          }
        };
        if (std::isfinite(lo)) cut(lo, false);
        if (std::isfinite(hi)) cut(hi, true);
        if (a >= b) empty = true;
        return {a, b};
      };

      // window 1: y in (ti, t_hi), y_t in (ti - e0, ti), sign +1
      // window 2: y in (t_lo, ti), y_t in (ti, ti + e0), sign -1
      for (int w = 0; w < 2; ++w) {
        bool empty = false;
        double a = 0.0, b = 1.0;
        if (w == 0) {
          std::tie(a, b) = clip(a, b, a_y, b_y, ti, t_hi, empty);
          if (!empty) std::tie(a, b) = clip(a, b, a_t, b_t, ti - e0, ti, empty);
        } else {
          std::tie(a, b) = clip(a, b, a_y, b_y, t_lo, ti, empty);
          if (!empty) std::tie(a, b) = clip(a, b, a_t, b_t, ti, ti + e0, empty);
        }
        if (empty || a >= b) continue;
        auto integrand = [&](double s) { return lin(a_p, b_p, s) * (lin(a_t, b_t, s) - ti); };
        const double mid = 0.5 * (a + b);
        const double val =
            (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(mid) + integrand(b));
        total += (w == 0 ? 1.0 : -1.0) * h * val;
      }
    }
  }
  return total;
}

std::vector<double> geometric_t_sequence(double t0, double factor, int len) {
  std::vector<double> ts;
  double t = t0;
  for (int k = 0; k < len; ++k, t *= factor) ts.push_back(t);
  return ts;
}

namespace {

QTildeEstimate finish_estimate(std::vector<double> ts, std::vector<double> q) {
  QTildeEstimate est;
  est.ts = std::move(ts);
  est.q = std::move(q);
  est.stabilized = est.q;
  for (std::size_t k = 1; k < est.q.size(); ++k)
    est.stabilized[k] = est.q[k] + (est.q[k] - est.q[k - 1]); // O(t) Richardson
  const std::size_t n = est.q.size();
  const std::size_t tail = std::min<std::size_t>(3, n);
  est.estimate = est.stabilized[n - 1];
  for (std::size_t k = n - tail; k < n; ++k)
    est.estimate = std::min(est.estimate, est.stabilized[k]);
  if (n >= 2)
    est.tail_variation =
        std::abs(est.q[n - 1] - est.q[n - 2]) / std::max(1e-300, std::abs(est.q[n - 1]));
  return est;
}

} // namespace

QTildeEstimate Q_tilde_limit_seq(const ControlProblem& p, const GridFunction& u_bar,
                                 const GridFunction& p_bar,
                                 const std::vector<GridFunction>& hs, std::vector<double> ts) {
  if (ts.size() < 4) throw std::invalid_argument("Q_tilde_limit: need at least 4 t entries");
  std::sort(ts.begin(), ts.end(), std::greater<>());
  if (hs.size() != ts.size())
    throw std::invalid_argument("Q_tilde_limit_seq: one direction per t entry");
  const StateSolveReport sy = solve_state(p, u_bar);
  require_converged(sy);
  std::vector<double> q;
  GridFunction warm = sy.y;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    GridFunction ut = u_bar;
    kernels::axpy(ts[k], hs[k].values(), ut.values());
    const StateSolveReport st = solve_state(p, ut, &warm);
    require_converged(st);
    warm = st.y;
    GridFunction zeta = zeta_from_states(*p.f, sy.y, st.y);
    GridFunction pz = zeta;
    for (int j = 0; j < pz.size(); ++j) pz[j] *= p_bar[j];
    q.push_back(integrate(pz) / (ts[k] * ts[k]));
  }
  return finish_estimate(std::move(ts), std::move(q));
}

QTildeEstimate Q_tilde_limit(const ControlProblem& p, const GridFunction& u_bar,
                             const GridFunction& p_bar, const GridFunction& h,
                             std::vector<double> ts) {
  if (ts.empty()) ts = geometric_t_sequence();
  std::sort(ts.begin(), ts.end(), std::greater<>());
  return Q_tilde_limit_seq(p, u_bar, p_bar, std::vector<GridFunction>(ts.size(), h), ts);
}

double taylor_remainder(const ControlProblem& p, const GridFunction& y_bar,
                        const GridFunction& p_bar, const GridFunction& y) {
  const GridFunction chi = chi_from_state(p, y_bar);
  GridFunction field(p.grid);
  for (int j = 0; j < y.size(); ++j)
    field[j] = p_bar[j] * (chi[j] * (y[j] - y_bar[j]) - p.f->value(y[j]) + p.f->value(y_bar[j]));
  return integrate(field);
}

CurvatureBreakdown Q_explicit(const ControlProblem& p, const GridFunction& y_bar,
                              const GridFunction& p_bar, const GridFunction& h) {
  CurvatureBreakdown out;
  out.z = solve_dir_deriv_at(p, y_bar, h);
  const PiecewiseSmoothFunction& f = *p.f;

  GridFunction tracking(p.grid);
  GridFunction fsec(p.grid);
  for (int j = 0; j < y_bar.size(); ++j) {
    tracking[j] = p.integrand.dyy(j, y_bar[j]) * out.z[j] * out.z[j] + p.nu * h[j] * h[j];
    if (f.snapped_breakpoint(y_bar[j], p.solver.snap_tol) < 0)
      fsec[j] = -p_bar[j] * f.piece(f.piece_index(y_bar[j])).d2(y_bar[j]) * out.z[j] * out.z[j];
  }
  out.term_tracking = integrate(tracking);
  out.term_fsecond = integrate(fsec);

  for (int i = 1; i <= f.num_breakpoints(); ++i) {
    const double tau = f.breakpoints()[static_cast<std::size_t>(i) - 1];
    const LevelSet ls = extract_level_set(y_bar, tau);
    double s = 0.0;
    if (p.grid->dim == 1) {
      for (const auto& cr : ls.crossings) {
        const double pv = interp_quadratic(p_bar, cr.x);
        const double zv = interp_quadratic(out.z, cr.x);
        s += pv * zv * zv / cr.grad;
        ++out.surface_points;
      }
    } else {
      for (const auto& seg : ls.segments) {
        const double pv = interp_bilinear(p_bar, seg.mid_x, seg.mid_y);
        const double zv = interp_bilinear(out.z, seg.mid_x, seg.mid_y);
        s += pv * zv * zv / seg.grad * seg.length;
        ++out.surface_points;
      }
    }
    out.term_surface += f.sigma(i) * s;
  }
  out.Q = out.term_tracking + out.term_fsecond + out.term_surface;
  out.Q_tilde_explicit = 0.5 * out.term_surface;
  return out;
}

CriticalMembership critical_cone_membership(const ControlProblem& p,
                                            const StationarityReport& rep,
                                            const GridFunction& v, double tol) {
  CriticalMembership m;
  const double act = 1e-12 * (p.beta - p.alpha);
  const double ub = zero_band(rep.u);
  for (int j = 0; j < v.size(); ++j) {
    if (rep.u[j] - p.alpha <= act) m.sign_violation = std::max(m.sign_violation, -v[j]);
    if (p.beta - rep.u[j] <= act) m.sign_violation = std::max(m.sign_violation, v[j]);
    m.max_dv_product = std::max(m.max_dv_product, std::abs(rep.d[j] * v[j]));
    if (std::abs(rep.u[j]) <= ub)
      m.lambda_identity_violation = std::max(
          m.lambda_identity_violation, std::abs(std::abs(v[j]) - rep.lambda[j] * v[j]));
  }
  m.sign_violation = std::max(m.sign_violation, 0.0);

  GridFunction w = rep.p;
  kernels::axpy(p.nu, rep.u.values(), w.values());
  m.pairing = inner(w, v) + p.kappa * j_dir_deriv(rep.u, v);
  m.pairing_scale =
      std::max(1.0, (norm(w, NormKind::L2) + p.kappa) * std::max(1.0, norm(v, NormKind::L2)));
  m.member = m.sign_violation <= tol * std::max(1.0, norm(v, NormKind::Linf)) &&
             std::abs(m.pairing) <= tol * m.pairing_scale;
  return m;
}

GridFunction densify_critical_direction(const ControlProblem& p, const StationarityReport& rep,
                                        const GridFunction& v, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0 / (p.beta - p.alpha)))
    throw std::invalid_argument("densify: eps must lie in (0, 1/(beta-alpha))");
  const double cap = 1.0 / (eps * eps);
  const double ub = zero_band(rep.u);
  GridFunction out(v.grid_ptr(), 0.0, GridFunction::Trace::free);
  for (int j = 0; j < v.size(); ++j) {
    const double uj = rep.u[j];
    const double pushed = uj + eps * v[j];
    const bool in_box = pushed >= p.alpha && pushed <= p.beta;
    const bool u_ok = std::abs(uj) <= ub || std::abs(uj) >= eps;
    out[j] = in_box && u_ok ? std::clamp(v[j], -cap, cap) : 0.0;
  }
  return out;
}

std::vector<GridFunction> build_critical_probe_set(const ControlProblem& p,
                                                   const StationarityReport& rep, int count,
                                                   std::mt19937_64& rng) {
  std::vector<GridFunction> probes;
  const double ub = zero_band(rep.u);
  const double act = 1e-12 * (p.beta - p.alpha);
  const double d_tol = std::max(1e-7 * std::max(1.0, norm(rep.d, NormKind::Linf)),
                                10.0 * rep.residual_projection_u);

  auto project = [&](GridFunction v) {
    for (int j = 0; j < v.size(); ++j) {
      if (std::abs(rep.d[j]) > d_tol) v[j] = 0.0;
      if (rep.u[j] - p.alpha <= act) v[j] = std::max(v[j], 0.0);
      if (p.beta - rep.u[j] <= act) v[j] = std::min(v[j], 0.0);
      if (std::abs(rep.u[j]) <= ub) {
        if (rep.lambda[j] >= 1.0 - 1e-9)
          v[j] = std::max(v[j], 0.0);
        else if (rep.lambda[j] <= -1.0 + 1e-9)
          v[j] = std::min(v[j], 0.0);
        else
          v[j] = 0.0;
      }
    }
    return v;
  };
  auto push_if_member = [&](GridFunction v) {
    const double nv = norm(v, NormKind::L2);
    if (nv < 1e-12) return;
    kernels::scale(1.0 / nv, v.values());
    if (critical_cone_membership(p, rep, v).member) probes.push_back(std::move(v));
  };

  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  // (a) densified random fields
  int made = 0;
  for (int k = 0; k < 4 * count && made < count; ++k) {
    GridFunction v(p.grid, 0.0, GridFunction::Trace::free);
    for (int j = 0; j < v.size(); ++j) v[j] = unif(rng);
    v = project(std::move(v));
    const double nv = norm(v, NormKind::L2);
    if (nv < 1e-12) continue;
    kernels::scale(1.0 / nv, v.values());
    GridFunction dens = densify_critical_direction(p, rep, v, 0.05);
    const std::size_t before = probes.size();
    push_if_member(std::move(dens));
    if (probes.size() > before) ++made;
  }
  // (b) coordinate bumps supported on {d = 0}
  std::vector<int> free_nodes;
  for (int j = 0; j < rep.u.size(); ++j)
    if (std::abs(rep.d[j]) <= d_tol && std::abs(rep.u[j]) > ub) free_nodes.push_back(j);
  if (!free_nodes.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, free_nodes.size() - 1);
    for (int k = 0; k < std::min(count, 8); ++k) {
      GridFunction v(p.grid, 0.0, GridFunction::Trace::free);
      v[free_nodes[pick(rng)]] = 1.0;
      push_if_member(project(std::move(v)));
    }
  }
  // (c) projected negative gradient
  {
    GridFunction v = rep.p;
    kernels::axpy(p.nu, rep.u.values(), v.values());
    kernels::scale(-1.0, v.values());
    push_if_member(project(std::move(v)));
  }
  return probes;
}

std::string to_string(SecondOrderVerdict v) {
  switch (v) {
    case SecondOrderVerdict::VACUOUS: return "VACUOUS";
    case SecondOrderVerdict::INDEFINITE: return "INDEFINITE";
    case SecondOrderVerdict::NECESSARY_CONSISTENT: return "NECESSARY-CONSISTENT";
    case SecondOrderVerdict::SUFFICIENT_INDICATED: return "SUFFICIENT-INDICATED";
  }
  return "?";
}

SecondOrderReport second_order_report(const ControlProblem& p, const StationarityReport& rep,
                                      const std::vector<GridFunction>& directions,
                                      const SecondOrderOptions& opts) {
  SecondOrderReport out;
  std::vector<double> ts = opts.t_sequence.empty() ? geometric_t_sequence() : opts.t_sequence;

  double min_q = std::numeric_limits<double>::infinity();
  for (const GridFunction& h : directions) {
    SecondOrderRow row;
    row.membership = critical_cone_membership(p, rep, h);
    if (!row.membership.member) continue;
    row.breakdown = Q_explicit(p, rep.y, rep.p, h);
    row.qt_limit = Q_tilde_limit(p, rep.u, rep.p, h, ts);
    min_q = std::min(min_q, row.breakdown.Q);
    out.rows.push_back(std::move(row));
  }

  if (out.rows.empty()) {
    out.verdict = SecondOrderVerdict::VACUOUS;
    return out;
  }
  out.min_Q = min_q;
  if (min_q >= opts.margin_sufficient)
    out.verdict = SecondOrderVerdict::SUFFICIENT_INDICATED;
  else if (min_q >= -opts.tol_necessary)
    out.verdict = SecondOrderVerdict::NECESSARY_CONSISTENT;
  else
    out.verdict = SecondOrderVerdict::INDEFINITE;

  // quadratic growth probe around u_bar
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double Jbar = eval_J(p, rep.u);
  out.growth.min_quotient = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opts.growth_samples; ++s) {
    GridFunction u(p.grid, 0.0, GridFunction::Trace::free);
    for (int j = 0; j < u.size(); ++j)
      u[j] = std::clamp(rep.u[j] + opts.growth_scale * unif(rng), p.alpha, p.beta);
    const double dn = norm(u - rep.u, NormKind::L2);
    if (dn < 1e-14) continue;
    const double q = (eval_J(p, u) - Jbar) / (dn * dn);
    out.growth.min_quotient = std::min(out.growth.min_quotient, q);
    ++out.growth.samples;
  }
  return out;
}

std::vector<SubderivativeRow> second_subderivative_check(const ControlProblem& p,
                                                         const StationarityReport& rep,
                                                         const GridFunction& h,
                                                         std::vector<double> ts) {
  if (ts.empty()) ts = geometric_t_sequence();
  std::sort(ts.begin(), ts.end(), std::greater<>());
  GridFunction w = rep.p;
  kernels::axpy(p.nu, rep.u.values(), w.values());
  const double F0 = eval_F(p, rep.u);
  const double wh = inner(w, h);
  std::vector<SubderivativeRow> rows;
  for (double t : ts) {
    GridFunction u = rep.u;
    kernels::axpy(t, h.values(), u.values());
    const double Ft = eval_F(p, u);
    rows.push_back({t, (Ft - F0 - t * wh) / (0.5 * t * t)});
  }
  return rows;
}

} // namespace nsoc
