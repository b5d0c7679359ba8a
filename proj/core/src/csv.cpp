#include "mfchaos/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mfchaos {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote_if_needed(std::string_view v) {
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
  write_line(header_);
}

void CsvWriter::write_line(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << quote_if_needed(fields[i]);
  }
  out_ << '\n';
}

CsvWriter::Row& CsvWriter::Row::operator<<(double v) {
  fields_.push_back(format_double(v));
  return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::string_view v) {
  fields_.emplace_back(v);
  return *this;
}

void CsvWriter::Row::end() {
  if (fields_.size() != writer_.columns()) throw std::logic_error("CsvWriter: column count mismatch");
  writer_.write_line(fields_);
  fields_.clear();
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("CSV column not found: " + std::string(name));
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  auto finish_row = [&] {
    fields.push_back(std::move(field));
    field.clear();
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      table.rows.push_back(std::move(fields));
    }
    fields.clear();
    any = false;
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      finish_row();
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) finish_row();
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace mfchaos
