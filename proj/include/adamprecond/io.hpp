#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace adamprecond {

using Json = nlohmann::ordered_json;

// %.17g for every float; non-finite floats become null.
std::string format_double(double v);
std::string dump_json(const Json& j, int indent = 2);

// RFC-4180 writer with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

std::string csv_field(double v);

void write_dat(std::ostream& os, const std::vector<std::pair<double, double>>& points,
               const std::string& comment);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace adamprecond
