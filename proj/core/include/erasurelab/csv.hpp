#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace erasurelab {

// Shortest round-trip-safe rendering at 17 significant digits ('.' decimal).
std::string format_double(double v);

/// Comma-separated rows with a header, LF line endings, floats at 17
/// significant digits. Fields containing ',' or '"' are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& cell(std::string_view v);
  CsvWriter& cell(const char* v) { return cell(std::string_view(v)); }
  CsvWriter& cell(const std::string& v) { return cell(std::string_view(v)); }
  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& cell(unsigned v) { return cell(static_cast<std::uint64_t>(v)); }
  CsvWriter& cell(bool v) { return cell(std::string_view(v ? "1" : "0")); }
  void end_row();

  std::size_t columns() const { return header_.size(); }

 private:
  void raw(std::string_view v);

  std::ostream& out_;
  std::vector<std::string> header_;
  std::size_t pending_ = 0;
};

}  // namespace erasurelab
