#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace papc {

/// Shortest decimal that round-trips, '.' separator, independent of the
/// global locale.
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  /// Throws std::invalid_argument if the field count differs from the header.
  void row(const std::vector<std::string>& fields);

 private:
  void write(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace papc
