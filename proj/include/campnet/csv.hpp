#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace campnet::csv {

// Escapes per RFC 4180: fields containing comma, quote, CR or LF are quoted,
// embedded quotes doubled.
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

// Incremental RFC 4180 reader. Handles quoted fields with embedded commas,
// doubled quotes and newlines, and both LF and CRLF records.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads the next record. Returns nullopt at end of input.
  std::optional<std::vector<std::string>> next();

 private:
  std::istream& in_;
};

}  // namespace campnet::csv
