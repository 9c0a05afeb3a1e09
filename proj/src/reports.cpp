#include "nsoc/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nsoc {

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("csv: row width does not match header");
  rows_.push_back(row);
}

std::string CsvTable::serialize() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < header_.size(); ++k)
    os << (k ? "," : "") << header_[k];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k)
      os << (k ? "," : "") << format_g17(row[k]);
    os << '\n';
  }
  return os.str();
}

void TextReport::add(const std::string& key, double value) {
  lines_.emplace_back(key, format_g17(value));
}
void TextReport::add(const std::string& key, const std::string& value) {
  lines_.emplace_back(key, value);
}
void TextReport::add(const std::string& key, int value) {
  lines_.emplace_back(key, std::to_string(value));
}

std::string TextReport::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : lines_) os << k << ": " << v << '\n';
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

TextReport describe(const StationarityReport& rep) {
  TextReport r;
  r.add("residual_projection_u", rep.residual_projection_u);
  r.add("residual_projection_lambda", rep.residual_projection_lambda);
  r.add("residual_sparsity", rep.residual_sparsity);
  r.add("residual_vi", rep.residual_vi);
  r.add("adjoint_residual", rep.adjoint_residual);
  r.add("breakpoint_node_count", rep.breakpoint_node_count);
  r.add("chi_in_clarke", rep.chi_in_clarke ? "yes" : "no");
  return r;
}

TextReport describe(const CurvatureBreakdown& b) {
  TextReport r;
  r.add("term_tracking", b.term_tracking);
  r.add("term_fsecond", b.term_fsecond);
  r.add("term_surface", b.term_surface);
  r.add("Q", b.Q);
  r.add("Q_tilde_explicit", b.Q_tilde_explicit);
  r.add("surface_points", b.surface_points);
  return r;
}

TextReport describe(const StructureReport& rep) {
  TextReport r;
  r.add("sa_slope", rep.slope);
  r.add("c_s", rep.c_s);
  r.add("min_level_grad", rep.min_level_grad);
  r.add("dist_zero_level_to_boundary", rep.dist_zero_level_to_boundary);
  r.add("sa_pass", rep.sa_pass ? "yes" : "no");
  r.add("grad_pass", rep.grad_pass ? "yes" : "no");
  return r;
}

} // namespace nsoc
