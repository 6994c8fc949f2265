#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qapca/eval.hpp"
#include "qapca/linalg.hpp"

namespace qapca {

/// CSV parse failure; the message carries the 1-based line number.
struct CsvError : std::runtime_error {
  int line;
  CsvError(const std::string& what, int line_number)
      : std::runtime_error(what), line(line_number) {}
};

/// How to interpret a CSV file: which column holds the class/fault label
/// (empty = none) and which columns to drop (identifiers and the like).
struct CsvSchema {
  std::string label_column;
  std::vector<std::string> ignore_columns;
  std::optional<int> fault_onset;
};

/// Loads a header-first numeric CSV (RFC-4180 quoting) into a dataset:
/// rows become samples, remaining columns become features, so train is
/// D x N. Throws CsvError naming the offending line for malformed rows,
/// non-numeric cells, or a missing label column.
LabeledDataset load_csv(const std::string& path, const CsvSchema& schema);

/// Splits a single CSV record into fields, honoring quotes.
std::vector<std::string> split_csv_record(const std::string& line, int line_number);

/// Writes a matrix as CSV with generated column headers (c1, c2, ...).
void save_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace qapca
