#include "dyson/experiments/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dyson/errors.hpp"

namespace dyson::experiments {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
  if (header_.empty()) throw InvariantError("CsvWriter: empty header");
  write_line(header_);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  if (fields.size() != header_.size()) {
    throw InvariantError("CsvWriter: row has " + std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(header_.size()));
  }
  write_line(fields);
}

void CsvWriter::flush() { out_.flush(); }

void CsvWriter::write_line(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << quote_field(fields[k]);
  }
  out_ << '\n';
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw ConfigError("csv: unexpected character after closing quote", "csv");
        }
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"') {
      if (field_started && !field.empty()) throw ConfigError("csv: quote inside an unquoted field", "csv");
      quoted = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_record();
      i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (quoted) throw ConfigError("csv: unterminated quoted field", "csv");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw ConfigError("csv: missing header row", "csv");
  CsvTable table{std::move(records.front()), {}};
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ConfigError("csv: row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                            " fields, header has " + std::to_string(table.header.size()),
                        "csv");
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

}  // namespace dyson::experiments
