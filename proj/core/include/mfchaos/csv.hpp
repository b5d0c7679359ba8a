#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace mfchaos {

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" otherwise.
std::string format_double(double value);

/// Comma-separated rows with a fixed header. Fields containing a comma,
/// quote or newline are quoted. Output depends only on the values written.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  class Row {
   public:
    explicit Row(CsvWriter& writer) : writer_(writer) {}
    Row& operator<<(double v);
    template <std::integral T>
    Row& operator<<(T v) {
      if constexpr (std::is_same_v<T, bool>) {
        fields_.emplace_back(v ? "true" : "false");
      } else {
        fields_.push_back(std::to_string(v));
      }
      return *this;
    }
    Row& operator<<(std::string_view v);
    Row& operator<<(const char* v) { return *this << std::string_view(v); }
    Row& operator<<(const std::string& v) { return *this << std::string_view(v); }
    /// Writes the row; throws std::logic_error on a column-count mismatch.
    void end();

   private:
    CsvWriter& writer_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(*this); }
  std::size_t columns() const noexcept { return header_.size(); }

 private:
  void write_line(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::vector<std::string> header_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads files written by CsvWriter (RFC 4180 quoting).
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mfchaos
