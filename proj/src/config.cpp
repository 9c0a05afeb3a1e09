#include "nsoc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsoc/expr.hpp"

namespace nsoc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line, section = "";
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    kv.data_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_text(ss.str());
}

bool KeyValueFile::has(const std::string& s, const std::string& k) const {
  auto it = data_.find(s);
  return it != data_.end() && it->second.count(k) > 0;
}

std::string KeyValueFile::get(const std::string& s, const std::string& k) const {
  if (!has(s, k)) throw ConfigError("config: missing key [" + s + "] " + k);
  return data_.at(s).at(k);
}

std::string KeyValueFile::get_or(const std::string& s, const std::string& k,
                                 const std::string& fb) const {
  return has(s, k) ? data_.at(s).at(k) : fb;
}

double KeyValueFile::get_double(const std::string& s, const std::string& k, double fb) const {
  if (!has(s, k)) return fb;
  try {
    return std::stod(get(s, k));
  } catch (const std::exception&) {
    throw ConfigError("config: [" + s + "] " + k + " is not a number");
  }
}

int KeyValueFile::get_int(const std::string& s, const std::string& k, int fb) const {
  if (!has(s, k)) return fb;
  try {
    return std::stoi(get(s, k));
  } catch (const std::exception&) {
    throw ConfigError("config: [" + s + "] " + k + " is not an integer");
  }
}

std::uint64_t KeyValueFile::get_u64(const std::string& s, const std::string& k,
                                    std::uint64_t fb) const {
  if (!has(s, k)) return fb;
  try {
    return std::stoull(get(s, k));
  } catch (const std::exception&) {
    throw ConfigError("config: [" + s + "] " + k + " is not an unsigned integer");
  }
}

std::vector<double> KeyValueFile::get_doubles(const std::string& s, const std::string& k) const {
  std::vector<double> out;
  if (!has(s, k)) return out;
  std::istringstream is(get(s, k));
  double v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw ConfigError("config: [" + s + "] " + k + " has non-numeric entries");
  return out;
}

void KeyValueFile::set(const std::string& s, const std::string& k, const std::string& v) {
  data_[s][k] = v;
}

std::string KeyValueFile::serialize() const {
  std::ostringstream os;
  for (const auto& [sec, keys] : data_) {
    os << '[' << sec << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v << '\n';
    os << '\n';
  }
  return os.str();
}

RunConfig RunConfig::load(const std::string& path) {
  return from_kv(KeyValueFile::parse_file(path));
}

RunConfig RunConfig::from_kv(KeyValueFile kv) {
  RunConfig c;
  c.raw = kv;
  c.dim = kv.get_int("problem", "dim", 1);
  if (c.dim != 1 && c.dim != 2) throw ConfigError("config: dim must be 1 or 2");

  auto take_pair = [&](const std::string& key, auto& arr, auto fallback0, auto fallback1) {
    const auto vals = kv.get_doubles("problem", key);
    if (vals.empty()) {
      arr = {fallback0, fallback1};
      return;
    }
    if (static_cast<int>(vals.size()) != c.dim && vals.size() != 1)
      throw ConfigError("config: " + key + " needs one value per axis");
    arr[0] = static_cast<std::remove_reference_t<decltype(arr[0])>>(vals[0]);
    arr[1] = static_cast<std::remove_reference_t<decltype(arr[1])>>(
        vals.size() > 1 ? vals[1] : vals[0]);
  };
  take_pair("low", c.low, 0.0, 0.0);
  take_pair("high", c.high, 1.0, 1.0);
  std::array<double, 2> nn{999.0, 999.0};
  take_pair("n", nn, 999.0, 999.0);
  c.n = {static_cast<int>(nn[0]), static_cast<int>(nn[1])};

  c.coef.a11 = kv.get_double("problem", "a11", 1.0);
  c.coef.a22 = kv.get_double("problem", "a22", 1.0);
  c.coef.a12 = kv.get_double("problem", "a12", 0.0);
  c.nonlinearity = kv.get_or("problem", "nonlinearity", "max");
  c.breakpoints = kv.get_doubles("problem", "breakpoints");
  for (int i = 0;; ++i) {
    const std::string key = "piece" + std::to_string(i);
    if (!kv.has("problem", key)) break;
    c.piece_coeffs.push_back(kv.get_doubles("problem", key));
  }
  c.y_d_expr = kv.get_or("problem", "y_d", "0");
  if (kv.has("problem", "y_d_file")) c.y_d_file = kv.get("problem", "y_d_file");
  c.u_expr = kv.get_or("problem", "u", "0");
  if (kv.has("problem", "u_file")) c.u_file = kv.get("problem", "u_file");
  c.nu = kv.get_double("problem", "nu", 1e-2);
  c.kappa = kv.get_double("problem", "kappa", 5e-3);
  c.alpha = kv.get_double("problem", "alpha", -2.0);
  c.beta = kv.get_double("problem", "beta", 2.0);

  c.solver.newton_tol = kv.get_double("solver", "newton_tol", 1e-10);
  c.solver.newton_max = kv.get_int("solver", "newton_max", 50);
  c.solver.picard_max = kv.get_int("solver", "picard_max", 500);
  c.solver.lin_rel_tol = kv.get_double("solver", "lin_tol", 1e-12);
  c.solver.snap_tol = kv.get_double("solver", "snap_tol", 1e-12);
  c.optimize.tol_stage = kv.get_double("solver", "prox_tol", 1e-8);
  c.optimize.tol_final = kv.get_double("solver", "prox_tol_final", 1e-9);
  c.optimize.max_iter = kv.get_int("solver", "prox_max_iter", 5000);
  c.optimize.gamma0 = kv.get_double("solver", "gamma0", 0.0);
  c.optimize.armijo = kv.get_double("solver", "armijo", 1e-4);
  c.optimize.eps_start = kv.get_double("solver", "eps_start", 1e-1);
  c.optimize.eps_floor = kv.get_double("solver", "eps_floor", 1e-6);
  c.optimize.eps_factor = kv.get_double("solver", "eps_factor", 2.0);
  c.moll_quad_order = kv.get_int("solver", "moll_quad_order", 32);
  c.eps_sweep = kv.get_doubles("solver", "eps_sweep");
  c.t_start = kv.get_double("solver", "t_start", 1e-1);
  c.t_factor = kv.get_double("solver", "t_factor", 0.5);
  c.t_len = kv.get_int("solver", "t_len", 8);
  c.seed = kv.get_u64("solver", "seed", 1);

  c.out_dir = kv.get_or("output", "dir", "out");

  if (!(c.optimize.tol_stage > 0.0) || !(c.optimize.tol_final > 0.0) ||
      !(c.solver.newton_tol > 0.0) || !(c.solver.lin_rel_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (!(c.optimize.eps_factor > 1.0) || !(c.optimize.eps_start > c.optimize.eps_floor))
    throw ConfigError("config: eps schedule must decrease");
  return c;
}

GridPtr RunConfig::make_grid() const {
  return dim == 1 ? build_grid(low[0], high[0], n[0]) : build_grid(low, high, n);
}

ControlProblem RunConfig::make_problem() const {
  const GridPtr g = make_grid();
  NonlinearityPtr f;
  if (nonlinearity == "max") {
    f = make_max_nonlinearity();
  } else if (nonlinearity == "piecewise-linear" || nonlinearity == "piecewise-cubic") {
    if (breakpoints.empty() && piece_coeffs.size() != 1)
      throw ConfigError("config: piecewise nonlinearity needs breakpoints");
    if (piece_coeffs.size() != breakpoints.size() + 1)
      throw ConfigError("config: need one piece per interval (K+1 pieces)");
    try {
      f = make_polynomial_nonlinearity(breakpoints, piece_coeffs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: invalid nonlinearity: ") + e.what());
    }
  } else {
    throw ConfigError("config: unknown nonlinearity '" + nonlinearity + "'");
  }

  GridFunction yd;
  if (y_d_file) {
    yd = read_gridfunction(*y_d_file);
    if (!yd.grid().same_as(*g)) throw ConfigError("config: y_d_file grid mismatch");
  } else {
    try {
      yd = Expression::parse(y_d_expr).sample(g);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: bad y_d: ") + e.what());
    }
  }

  try {
    ControlProblem p = nsoc::make_problem(g, f, std::move(yd), nu, kappa, alpha, beta, coef);
    p.solver = solver;
    p.moll_quad_order = moll_quad_order;
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

GridFunction RunConfig::control_field(const GridPtr& g) const {
  if (u_file) {
    GridFunction u = read_gridfunction(*u_file);
    if (!u.grid().same_as(*g)) throw ConfigError("config: u_file grid mismatch");
    u.set_trace(GridFunction::Trace::free);
    return u;
  }
  try {
    return Expression::parse(u_expr).sample(g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: bad u: ") + e.what());
  }
}

std::vector<double> RunConfig::t_sequence() const {
  std::vector<double> ts;
  double t = t_start;
  for (int k = 0; k < t_len; ++k, t *= t_factor) ts.push_back(t);
  return ts;
}

KeyValueFile RunConfig::resolved() const {
  KeyValueFile kv = raw;
  kv.set("problem", "dim", std::to_string(dim));
  kv.set("problem", "low", dim == 1 ? fmt(low[0]) : fmt(low[0]) + " " + fmt(low[1]));
  kv.set("problem", "high", dim == 1 ? fmt(high[0]) : fmt(high[0]) + " " + fmt(high[1]));
  kv.set("problem", "n",
         dim == 1 ? std::to_string(n[0]) : std::to_string(n[0]) + " " + std::to_string(n[1]));
  kv.set("problem", "nonlinearity", nonlinearity);
  kv.set("problem", "nu", fmt(nu));
  kv.set("problem", "kappa", fmt(kappa));
  kv.set("problem", "alpha", fmt(alpha));
  kv.set("problem", "beta", fmt(beta));
  kv.set("problem", "y_d", y_d_expr);
  kv.set("solver", "eps_floor", fmt(optimize.eps_floor));
  kv.set("solver", "seed", std::to_string(seed));
  kv.set("output", "dir", out_dir);
  return kv;
}

} // namespace nsoc
