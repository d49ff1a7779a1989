#include "qreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qreg {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvError::CsvError(int line_number, const std::string& message)
    : std::runtime_error(message + " (line " + std::to_string(line_number) +
                         ")"),
      line(line_number) {}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& field, int line) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' ||
                         end[-1] == '\r')) --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw CsvError(line, "not a number: '" + field + "'");
  }
  return value;
}

}  // namespace

int CsvTable::find_column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(0, "cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw CsvError(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_fields(line);
  if (table.header.empty()) throw CsvError(1, "empty header");
  const std::size_t width = table.header.size();

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != width) {
      throw CsvError(line_no, "expected " + std::to_string(width) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    std::vector<double> row(width);
    for (std::size_t i = 0; i < width; ++i) {
      row[i] = parse_field(fields[i], line_no);
    }
    rows.push_back(std::move(row));
  }

  table.values.resize(static_cast<int>(rows.size()),
                      static_cast<int>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
  }
  return table;
}

RegressionData split_response(const CsvTable& table,
                              const std::string& response) {
  const int cols = static_cast<int>(table.header.size());
  if (cols < 2) throw CsvError(1, "need at least one predictor and a response");
  int yc = cols - 1;
  if (!response.empty()) {
    yc = table.find_column(response);
    if (yc < 0) throw CsvError(1, "no column named '" + response + "'");
  }

  RegressionData data;
  data.response_name = table.header[yc];
  data.y = table.values.col(yc);
  data.X.resize(table.values.rows(), cols - 1);
  int out = 0;
  for (int c = 0; c < cols; ++c) {
    if (c == yc) continue;
    data.predictor_names.push_back(table.header[c]);
    data.X.col(out++) = table.values.col(c);
  }
  return data;
}

}  // namespace qreg
