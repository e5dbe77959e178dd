#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace pnss {

/// Locale-independent CSV: '#' comment line with the config hash, a header
/// row, then rows of doubles at 15 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            const std::vector<std::string>& columns);

  void row(std::span<const double> values);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::string line_;
};

/// Shortest "%.15g"-equivalent rendering of `v` without locale effects.
std::string format_number(double v);

}  // namespace pnss
