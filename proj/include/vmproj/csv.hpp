#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vmproj {

/// Shortest decimal text that round-trips to the same double.
std::string formatNumber(double value);

/// Comma-separated writer; every row must match the header width.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace vmproj
