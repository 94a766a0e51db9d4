#include "otfs/io.hpp"
#include "otfs/error.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace otfs {

namespace {

std::vector<std::string> split_record(const std::string& line, char delim, const std::string& origin,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"' && cur.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (ch == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) {
    std::ostringstream msg;
    msg << origin << ": line " << line_no << ": unterminated quoted field";
    throw ValidationError(msg.str());
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

DataMatrix parse_csv(std::istream& in, const CsvOptions& options, const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    records.push_back(split_record(line, options.delimiter, origin, line_no));
    line_numbers.push_back(line_no);
  }
  if (records.empty()) throw ValidationError(origin + ": no data");

  std::vector<std::string> header;
  std::size_t first = 0;
  if (options.has_header) {
    header = records.front();
    for (auto& h : header) h = trim(h);
    first = 1;
    if (records.size() == 1) throw ValidationError(origin + ": header but no data rows");
  }
  const std::size_t width = records[first].size();
  if (options.has_header && header.size() != width) {
    std::ostringstream msg;
    msg << origin << ": row " << line_numbers[first] << ": " << width << " fields, header has "
        << header.size();
    throw ValidationError(msg.str());
  }

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    const std::string& want = *options.label_column;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == want) label_col = c;
    }
    long long as_index = 0;
    if (!label_col && parse_int(want, as_index) && as_index >= 0 && static_cast<std::size_t>(as_index) < width) {
      label_col = static_cast<std::size_t>(as_index);
    }
    if (!label_col) {
      throw ValidationError(origin + ": label column '" + want + "' not found");
    }
  }

  const auto n = static_cast<Index>(records.size() - first);
  const auto d = static_cast<Index>(width - (label_col ? 1 : 0));
  Matrix values(n, d);
  Labels labels;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) names.push_back(header[c]);
  }
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto row = static_cast<Index>(r - first);
    if (rec.size() != width) {
      std::ostringstream msg;
      msg << origin << ": row " << line_numbers[r] << ": expected " << width << " fields, found "
          << rec.size();
      throw ValidationError(msg.str());
    }
    Index out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      auto where = [&] {
        std::ostringstream msg;
        msg << origin << ": row " << line_numbers[r] << ", column " << (c + 1);
        if (c < header.size()) msg << " ('" << header[c] << "')";
        return msg.str();
      };
      if (label_col && c == *label_col) {
        long long v = 0;
        if (!parse_int(rec[c], v)) throw ValidationError(where() + ": label '" + rec[c] + "' is not an integer");
        labels.push_back(static_cast<int>(v));
        continue;
      }
      double v = 0.0;
      if (!parse_number(rec[c], v)) throw ValidationError(where() + ": '" + rec[c] + "' is not a number");
      if (!std::isfinite(v)) throw ValidationError(where() + ": non-finite value");
      values(row, out_col++) = v;
    }
  }
  if (label_col) return DataMatrix(std::move(values), std::move(labels), std::move(names));
  return DataMatrix(std::move(values), std::nullopt, std::move(names));
}

DataMatrix load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return parse_csv(in, options, path);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double: buffer too small");
  return std::string(buf, ptr);
}

std::string format_csv(const DataMatrix& m, char delimiter, const std::string& label_name) {
  std::string out;
  const auto& names = m.column_names();
  for (Index j = 0; j < m.cols(); ++j) {
    if (j) out += delimiter;
    out += static_cast<std::size_t>(j) < names.size() && !names[static_cast<std::size_t>(j)].empty()
               ? names[static_cast<std::size_t>(j)]
               : "f" + std::to_string(j);
  }
  if (m.has_labels()) {
    if (m.cols()) out += delimiter;
    out += label_name;
  }
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += delimiter;
      out += format_double(m.values()(i, j));
    }
    if (m.has_labels()) {
      if (m.cols()) out += delimiter;
      out += std::to_string(m.labels()[static_cast<std::size_t>(i)]);
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace otfs
