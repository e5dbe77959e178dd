#include "pnss/csv.hpp"

#include <charconv>
#include <cmath>

#include "pnss/error.hpp"

namespace pnss {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
  return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary | std::ios::trunc), width_(columns.size()) {
  if (!out_) throw Error("cannot open " + path + " for writing");
  out_ << "# config_hash=" << config_hash << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != width_) throw Error("CSV row width does not match header");
  line_.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line_ += ',';
    line_ += format_number(values[i]);
  }
  line_ += '\n';
  out_ << line_;
  if (!out_) throw Error("CSV write failed");
}

}  // namespace pnss
