#pragma once

// RFC 4180 CSV: comma separated, CRLF-free (LF line ends), fields quoted
// when they contain a comma, a quote or a line break.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dyson::experiments {

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_real(double x);

std::string quote_field(std::string_view field);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  std::size_t columns() const noexcept { return header_.size(); }
  /// InvariantError unless the row has one field per column.
  void write_row(const std::vector<std::string>& fields);
  void flush();

 private:
  void write_line(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::vector<std::string> header_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Parses a whole document. ConfigError on malformed quoting, a missing
/// header, or rows whose width differs from the header.
CsvTable parse_csv(std::string_view text);

}  // namespace dyson::experiments
