#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "campnet/csv.hpp"
#include "campnet/rng.hpp"

#include <sstream>

using namespace campnet;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& text) {
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = reader.next()) rows.push_back(*row);
  return rows;
}

}  // namespace

TEST_CASE("escape quotes only when needed") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("") == "");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv::escape("cr\rhere") == "\"cr\rhere\"");
}

TEST_CASE("join_row terminates the record") {
  CHECK(csv::join_row({"a", "b", "c"}) == "a,b,c\n");
  CHECK(csv::join_row({"x,y", "z"}) == "\"x,y\",z\n");
}

TEST_CASE("reader handles plain and quoted fields") {
  auto rows = read_all("a,b,c\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});

  rows = read_all("\"a,b\",\"with \"\"q\"\"\",\"multi\nline\"\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == std::vector<std::string>{"a,b", "with \"q\"", "multi\nline"});
}

TEST_CASE("reader accepts CRLF and missing final newline") {
  auto rows = read_all("a,b\r\nc,d\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
  CHECK(rows[1] == std::vector<std::string>{"c", "d"});

  rows = read_all("a,b");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
}

TEST_CASE("reader keeps empty fields") {
  auto rows = read_all(",\n,,\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"", ""});
  CHECK(rows[1] == std::vector<std::string>{"", "", ""});
}

TEST_CASE("round-trip of random rows") {
  Rng rng(31);
  const std::string alphabet = "ab,\"\n\r x";
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> row;
    auto fields = 1 + rng.next_below(5);
    for (std::uint64_t f = 0; f < fields; ++f) {
      std::string field;
      auto len = rng.next_below(8);
      for (std::uint64_t i = 0; i < len; ++i)
        field += alphabet[static_cast<std::size_t>(rng.next_below(alphabet.size()))];
      row.push_back(field);
    }
    // A lone trailing empty field is not distinguishable from a bare
    // newline, so keep the last field non-empty.
    if (row.back().empty()) row.back() = "x";
    auto rows = read_all(csv::join_row(row));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == row);
  }
}
