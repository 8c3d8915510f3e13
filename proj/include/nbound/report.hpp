#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nbound/bounds.hpp"
#include "nbound/fem/capacity.hpp"

namespace nb {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "nbound 0.3.0";

Json to_json(const CuspProfile& profile);
Json to_json(const BoundReport& rep);
Json to_json(const ClassicalBounds& cb);
Json to_json(const fem::TransferReport& rep);

/// Finite doubles as numbers, non-finite ones as the strings "inf", "-inf", "nan".
Json number(double x);

/// Small CSV writer: '#' comment preamble, header row, then rows in insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_comment(const std::string& line);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

/// Cell text for a double (shortest round-trip form, "inf"/"nan" otherwise).
std::string cell(double x);

}  // namespace nb
