#include "csv.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "error.hpp"

namespace horocover {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw ValidationError("out", "cannot write '" + path + "'");
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::separator() {
  if (in_row_++) out_ << ',';
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  separator();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    out_ << v;
    return *this;
  }
  out_ << '"';
  for (char c : v) out_ << (c == '"' ? "\"\"" : std::string(1, c));
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error(path_ + ": row has " + std::to_string(in_row_) + " fields, header has " +
                           std::to_string(columns_));
  }
  out_ << '\n';
  in_row_ = 0;
  if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
}

}  // namespace horocover
