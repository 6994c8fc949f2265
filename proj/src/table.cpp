#include "qapca/table.hpp"

#include <fstream>
#include <stdexcept>

namespace qapca {

void Table::add_row(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("Table: row width does not match column count");
  }
  rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
      if (c == '"') quoted += "\"\"";
      else quoted.push_back(c);
    }
    quoted += '"';
    return quoted;
  }
  return v.dump();
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void Table::write(const std::string& path_prefix, const std::string& name,
                  const std::string& format) const {
  const std::string path = path_prefix + "." + name + "." + format;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Table: cannot write '" + path + "'");
  out << (format == "json" ? to_json() : to_csv());
}

}  // namespace qapca
