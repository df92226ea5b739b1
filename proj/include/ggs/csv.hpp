#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ggs {

/// Shortest round-trip decimal form of a double (locale-independent).
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// RFC-4180 writer: comma separated, CRLF line endings, fields quoted only
/// when they contain a comma, quote, CR or LF.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view s) {
    separate();
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
      out_ << s;
    } else {
      out_ << '"';
      for (char c : s) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    }
    return *this;
  }
  CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(double v) { return field(format_double(v)); }
  CsvWriter& field(std::uint64_t v) { return field(std::to_string(v)); }
  CsvWriter& field(std::int64_t v) { return field(std::to_string(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  CsvWriter& field(unsigned v) { return field(std::to_string(v)); }

  CsvWriter& row(const std::vector<std::string>& fields) {
    for (const auto& f : fields) field(f);
    return end_row();
  }

  CsvWriter& end_row() {
    out_ << "\r\n";
    first_ = true;
    return *this;
  }

 private:
  void separate() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ostream& out_;
  bool first_ = true;
};

}  // namespace ggs
