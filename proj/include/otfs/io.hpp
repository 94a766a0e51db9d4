#pragma once

#include "otfs/core.hpp"

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace otfs {

struct CsvOptions {
  bool has_header = true;
  char delimiter = ',';
  /// Header name, or 0-based column index, of the integer class label.
  std::optional<std::string> label_column;
};

/// RFC 4180 style table: optional header, quoted fields with "" escapes,
/// CRLF or LF line ends, blank lines skipped. Errors name the 1-based file
/// line and column.
DataMatrix load_csv(const std::string& path, const CsvOptions& options = {});
DataMatrix parse_csv(std::istream& in, const CsvOptions& options = {},
                     const std::string& origin = "<input>");

/// Header row (column names, or f0..f{d-1} when unnamed), then one line per
/// row; labels, if any, go to a trailing column named label_name.
std::string format_csv(const DataMatrix& m, char delimiter = ',',
                       const std::string& label_name = "label");

/// Shortest decimal text that parses back to exactly x.
std::string format_double(double x);

/// Writes to a sibling temporary file, then renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace otfs
