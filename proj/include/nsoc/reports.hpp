#pragma once

#include <string>
#include <vector>

#include "nsoc/curvature.hpp"
#include "nsoc/stationarity.hpp"

namespace nsoc {

/// CSV table with a header row; doubles are written with 17 significant
/// digits so outputs are byte-reproducible.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  std::string serialize() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// "key: value" report block writer.
class TextReport {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, int value);
  std::string serialize() const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

// write-to-temp-then-rename, so partial outputs never appear
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_g17(double v);

TextReport describe(const StationarityReport& rep);
TextReport describe(const CurvatureBreakdown& breakdown);
TextReport describe(const StructureReport& rep);

} // namespace nsoc
