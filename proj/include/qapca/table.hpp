#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qapca {

/// Column-ordered result table with typed cells; serializes to CSV and to
/// a JSON array of row objects. Number formatting is shortest-round-trip,
/// so identical values always print identically.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add_row(std::vector<nlohmann::json> row);

  std::string to_csv() const;
  std::string to_json() const;

  void write(const std::string& path_prefix, const std::string& name,
             const std::string& format) const;
};

}  // namespace qapca
