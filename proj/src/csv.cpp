#include "qapca/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qapca {

std::vector<std::string> split_csv_record(const std::string& line, int line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw CsvError("unterminated quote at line " + std::to_string(line_number), line_number);
  fields.push_back(std::move(current));
  return fields;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& cell, int line_number, const std::string& column) {
  const std::string t = trim(cell);
  if (t.empty()) {
    throw CsvError("missing value in column '" + column + "' at line " + std::to_string(line_number),
                   line_number);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw CsvError("non-numeric value '" + t + "' in column '" + column + "' at line " +
                       std::to_string(line_number),
                   line_number);
  }
  return value;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::string line;
  int line_number = 0;
  if (!std::getline(in, line)) throw CsvError("file is empty (no header)", 1);
  ++line_number;
  const std::vector<std::string> header = split_csv_record(line, line_number);

  int label_index = -1;
  std::vector<int> feature_indices;
  std::vector<std::string> feature_names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (!schema.label_column.empty() && name == schema.label_column) {
      label_index = static_cast<int>(i);
      continue;
    }
    if (std::find(schema.ignore_columns.begin(), schema.ignore_columns.end(), name) !=
        schema.ignore_columns.end()) {
      continue;
    }
    feature_indices.push_back(static_cast<int>(i));
    feature_names.push_back(name);
  }
  if (!schema.label_column.empty() && label_index < 0) {
    throw CsvError("label column '" + schema.label_column + "' not found in header", 1);
  }
  if (feature_indices.empty()) throw CsvError("no feature columns in header", 1);

  std::vector<std::vector<double>> samples;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_record(line, line_number);
    if (fields.size() != header.size()) {
      throw CsvError("expected " + std::to_string(header.size()) + " fields but found " +
                         std::to_string(fields.size()) + " at line " + std::to_string(line_number),
                     line_number);
    }
    std::vector<double> row;
    row.reserve(feature_indices.size());
    for (std::size_t f = 0; f < feature_indices.size(); ++f) {
      row.push_back(parse_number(fields[static_cast<std::size_t>(feature_indices[f])], line_number,
                                 feature_names[f]));
    }
    samples.push_back(std::move(row));
    if (label_index >= 0) labels.push_back(trim(fields[static_cast<std::size_t>(label_index)]));
  }
  if (samples.empty()) throw CsvError("no data rows", line_number);

  LabeledDataset out;
  out.train = Matrix(static_cast<Eigen::Index>(feature_indices.size()),
                     static_cast<Eigen::Index>(samples.size()));
  for (std::size_t c = 0; c < samples.size(); ++c) {
    for (std::size_t r = 0; r < feature_indices.size(); ++r) {
      out.train(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = samples[c][r];
    }
  }
  out.train_labels = std::move(labels);
  out.fault_onset = schema.fault_onset;
  return out;
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix_csv: cannot write '" + path + "'");
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out << (c ? "," : "") << 'c' << (c + 1);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << nlohmann::json(m(r, c)).dump();  // shortest round-trip formatting
    }
    out << '\n';
  }
}

}  // namespace qapca
