#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsoc/optimizer.hpp"
#include "nsoc/problem.hpp"

namespace nsoc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat-section key-value config file: "[section]" headers, "key = value"
/// lines, '#' comments. Values may be scalars, word lists, or expressions.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string serialize() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

struct RunConfig {
  KeyValueFile raw;

  // problem
  int dim = 1;
  std::array<double, 2> low{0.0, 0.0};
  std::array<double, 2> high{1.0, 1.0};
  std::array<int, 2> n{999, 999};
  EllipticCoefficients coef;
  std::string nonlinearity = "max";
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> piece_coeffs;
  std::string y_d_expr = "0";
  std::optional<std::string> y_d_file;
  std::string u_expr = "0";
  std::optional<std::string> u_file;
  double nu = 1e-2, kappa = 5e-3, alpha = -2.0, beta = 2.0;

  // solver
  SolverOptions solver;
  OptimizeOptions optimize;
  int moll_quad_order = 32;
  std::vector<double> eps_sweep;     // mollifier / S_eps studies
  double t_start = 1e-1, t_factor = 0.5;
  int t_len = 8;
  std::uint64_t seed = 1;

  // output
  std::string out_dir = "out";

  static RunConfig load(const std::string& path);
  static RunConfig from_kv(KeyValueFile kv);

  GridPtr make_grid() const;
  ControlProblem make_problem() const;
  GridFunction control_field(const GridPtr& g) const;
  std::vector<double> t_sequence() const;
  // re-serializes the effective settings (used for the config echo)
  KeyValueFile resolved() const;
};

} // namespace nsoc
