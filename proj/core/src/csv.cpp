#include "erasurelab/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "erasurelab/error.hpp"

namespace erasurelab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), header_(std::move(header)) {
  for (const auto& h : header_) raw(h);
  end_row();
}

void CsvWriter::raw(std::string_view v) {
  if (pending_ == header_.size()) throw Error("CSV row has more cells than the header");
  if (pending_ > 0) out_ << ',';
  if (v.find_first_of(",\"\n") != std::string_view::npos) {
    out_ << '"';
    for (char c : v) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << v;
  }
  ++pending_;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  raw(v);
  return *this;
}

CsvWriter& CsvWriter::cell(double v) {
  raw(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
  raw(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) {
  raw(std::to_string(v));
  return *this;
}

void CsvWriter::end_row() {
  if (pending_ != header_.size()) throw Error("CSV row has fewer cells than the header");
  out_ << '\n';
  pending_ = 0;
}

}  // namespace erasurelab
