#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wws/grid.hpp"

namespace wws {

using json = nlohmann::json;

inline constexpr int kReportSchema = 1;

// Number with 17 significant digits; "null" for non-finite values.
std::string format_number(double v);

// Serializes with every float printed at 17 significant digits, keys in sorted order and
// two-space indentation, so equal inputs give byte-identical text.
std::string dump_json(const json& j);

// Stores v under key; a non-finite v becomes null and a note is added under "notes".
void put_number(json& obj, const std::string& key, double v);
void put_complex(json& obj, const std::string& key, cplx v);  // {"re": .., "im": ..}
json number_array(const std::vector<double>& v);
json number_array(const RVec& v);
json complex_array(const CVec& v);  // [[re, im], ...]

// New report object carrying the schema version and the report kind.
json report_header(const std::string& kind);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

// Comma-separated, header row, LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  size_t columns_;
};

}  // namespace wws
