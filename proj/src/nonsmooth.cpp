#include "nsoc/nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nsoc {

Piece Piece::polynomial(std::vector<double> c) {
  auto horner = [](const std::vector<double>& a, double t) {
    double v = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * t + *it;
    return v;
  };
  auto derive = [](const std::vector<double>& a) {
    std::vector<double> d;
    for (std::size_t k = 1; k < a.size(); ++k) d.push_back(double(k) * a[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
  };
  std::vector<double> c1 = derive(c);
  std::vector<double> c2 = derive(c1);
  Piece p;
  p.f = [c, horner](double t) { return horner(c, t); };
  p.d1 = [c1, horner](double t) { return horner(c1, t); };
  p.d2 = [c2, horner](double t) { return horner(c2, t); };
  return p;
}

PiecewiseSmoothFunction::PiecewiseSmoothFunction(std::vector<double> breakpoints,
                                                 std::vector<Piece> pieces)
    : tau_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.size() != tau_.size() + 1)
    throw std::invalid_argument("nonlinearity: need K+1 pieces for K breakpoints");
  for (std::size_t i = 1; i < tau_.size(); ++i)
    if (!(tau_[i - 1] < tau_[i]))
      throw std::invalid_argument("nonlinearity: breakpoints must be strictly increasing");

  for (std::size_t i = 0; i < tau_.size(); ++i) {
    const double t = tau_[i];
    const double left = pieces_[i].f(t), right = pieces_[i + 1].f(t);
    if (std::abs(left - right) > 1e-12 * (1.0 + std::abs(right)))
      throw std::invalid_argument("nonlinearity: discontinuous at breakpoint");
    const double s = pieces_[i].d1(t) - pieces_[i + 1].d1(t);
    if (std::abs(s) <= 1e-12)
      throw std::invalid_argument("nonlinearity: derivative jump sigma_i must be nonzero");
    sigma_.push_back(s);
  }

  // sampled monotonicity on each piece's clamped range
  const double pad = 10.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double lo = i == 0 ? (tau_.empty() ? -pad : tau_.front() - pad) : tau_[i - 1];
    const double hi = i == pieces_.size() - 1 ? (tau_.empty() ? pad : tau_.back() + pad)
                                              : tau_[i];
    for (int k = 0; k <= 64; ++k) {
      const double t = lo + (hi - lo) * k / 64.0;
      if (pieces_[i].d1(t) < -1e-12)
        throw std::invalid_argument("nonlinearity: pieces must be monotonically increasing");
    }
  }
}

int PiecewiseSmoothFunction::piece_index(double t) const {
  // number of breakpoints strictly below t selects the half-open interval
  return static_cast<int>(std::lower_bound(tau_.begin(), tau_.end(), t) - tau_.begin());
}

double PiecewiseSmoothFunction::value(double t) const {
  return pieces_[static_cast<std::size_t>(piece_index(t))].f(t);
}

bool PiecewiseSmoothFunction::at_breakpoint(double t) const {
  return std::binary_search(tau_.begin(), tau_.end(), t);
}

int PiecewiseSmoothFunction::snapped_breakpoint(double t, double tol) const {
  for (std::size_t i = 0; i < tau_.size(); ++i)
    if (std::abs(t - tau_[i]) <= tol * (1.0 + std::abs(tau_[i]))) return static_cast<int>(i) + 1;
  return -1;
}

double PiecewiseSmoothFunction::slope_offbreak(double t) const {
  if (at_breakpoint(t))
    throw std::invalid_argument("slope_offbreak: t is a breakpoint, use dir_deriv/clarke");
  return pieces_[static_cast<std::size_t>(piece_index(t))].d1(t);
}

double PiecewiseSmoothFunction::curvature_offbreak(double t) const {
  if (at_breakpoint(t))
    throw std::invalid_argument("curvature_offbreak: t is a breakpoint");
  return pieces_[static_cast<std::size_t>(piece_index(t))].d2(t);
}

double PiecewiseSmoothFunction::dir_deriv(double t, double h) const {
  if (h == 0.0) return 0.0;
  auto it = std::lower_bound(tau_.begin(), tau_.end(), t);
  if (it != tau_.end() && *it == t) {
    const std::size_t k = static_cast<std::size_t>(it - tau_.begin());
    // pieces_[k] is the left piece at tau_{k+1}, pieces_[k+1] the right one
    return h > 0.0 ? pieces_[k + 1].d1(t) * h : pieces_[k].d1(t) * h;
  }
  return pieces_[static_cast<std::size_t>(piece_index(t))].d1(t) * h;
}

double PiecewiseSmoothFunction::sigma(int i) const {
  if (i < 1 || i > num_breakpoints()) throw std::invalid_argument("sigma: index out of range");
  return sigma_[static_cast<std::size_t>(i) - 1];
}

double PiecewiseSmoothFunction::sigma_max() const {
  double m = 0.0;
  for (double s : sigma_) m = std::max(m, std::abs(s));
  return m;
}

ClarkeInterval PiecewiseSmoothFunction::clarke(double t) const {
  auto it = std::lower_bound(tau_.begin(), tau_.end(), t);
  if (it != tau_.end() && *it == t) {
    const std::size_t k = static_cast<std::size_t>(it - tau_.begin());
    const double a = pieces_[k].d1(t), b = pieces_[k + 1].d1(t);
    return {std::min(a, b), std::max(a, b)};
  }
  const double d = pieces_[static_cast<std::size_t>(piece_index(t))].d1(t);
  return {d, d};
}

double PiecewiseSmoothFunction::epsilon0() const {
  if (num_breakpoints() <= 1) return 1.0;
  double gap = tau_[1] - tau_[0];
  for (std::size_t i = 2; i < tau_.size(); ++i) gap = std::min(gap, tau_[i] - tau_[i - 1]);
  return 0.25 * gap;
}

MollifiedFunction PiecewiseSmoothFunction::mollify(double eps, int quad_order) const {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
  return MollifiedFunction(this, eps, quad_order);
}

NonlinearityPtr make_max_nonlinearity() {
  return std::make_shared<PiecewiseSmoothFunction>(
      std::vector<double>{0.0},
      std::vector<Piece>{Piece::polynomial({0.0}), Piece::polynomial({0.0, 1.0})});
}

NonlinearityPtr make_polynomial_nonlinearity(std::vector<double> breakpoints,
                                             std::vector<std::vector<double>> coeffs) {
  std::vector<Piece> pieces;
  for (auto& c : coeffs) pieces.push_back(Piece::polynomial(std::move(c)));
  return std::make_shared<PiecewiseSmoothFunction>(std::move(breakpoints), std::move(pieces));
}

// ---- quadrature and kernel ----

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<double> x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
  const int m = (order + 1) / 2;
  for (int k = 0; k < m; ++k) {
    double z = std::cos(M_PI * (k + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it_n = 0; it_n < 100; ++it_n) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(k)] = -z;
    x[static_cast<std::size_t>(order - 1 - k)] = z;
    const double wk = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(k)] = wk;
    w[static_cast<std::size_t>(order - 1 - k)] = wk;
  }
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

double bump_unnormalized(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_normalization() {
  static const double c = [] {
    const auto& [x, w] = gauss_legendre(64);
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) m += w[k] * bump_unnormalized(x[k]);
    return 1.0 / m;
  }();
  return c;
}

} // namespace

double mollifier_kernel(double s) { return bump_normalization() * bump_unnormalized(s); }

MollifiedFunction::MollifiedFunction(const PiecewiseSmoothFunction* base, double eps,
                                     int quad_order)
    : base_(base), eps_(eps), order_(quad_order) {}

namespace {

// integral over [-1,1] of g(s) psi(s) ds, with the interval split at the
// given interior kink locations
template <class G>
double convolve(const std::vector<double>& cuts, int order, G g) {
  const auto& [x, w] = gauss_legendre(order);
  double total = 0.0;
  double a = -1.0;
  auto run = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = mid + half * x[k];
      s += w[k] * g(t) * mollifier_kernel(t);
    }
    total += half * s;
  };
  for (double c : cuts) {
    if (c > a && c < 1.0) {
      run(a, c);
      a = c;
    }
  }
  run(a, 1.0);
  return total;
}

std::vector<double> kink_pullbacks(const PiecewiseSmoothFunction& f, double t, double eps) {
  // f(t - eps s) kinks where t - eps s = tau_i, i.e. s = (t - tau_i)/eps
  std::vector<double> cuts;
  for (double tau : f.breakpoints()) {
    const double s = (t - tau) / eps;
    if (s > -1.0 && s < 1.0) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

} // namespace

double MollifiedFunction::value(double t) const {
  const auto cuts = kink_pullbacks(*base_, t, eps_);
  return convolve(cuts, order_, [&](double s) { return base_->value(t - eps_ * s); });
}

double MollifiedFunction::deriv(double t) const {
  const auto cuts = kink_pullbacks(*base_, t, eps_);
  return convolve(cuts, order_, [&](double s) {
    const double arg = t - eps_ * s;
    // one-sided slope by the half-open piece selection; exact breakpoint
    // hits are measure zero under the quadrature
    return base_->piece(base_->piece_index(arg)).d1(arg);
  });
}

} // namespace nsoc
