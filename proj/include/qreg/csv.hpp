#ifndef QREG_CSV_HPP
#define QREG_CSV_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace qreg {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

struct CsvError : std::runtime_error {
  int line;  // 1-based, 0 when not line-specific
  CsvError(int line_number, const std::string& message);
};

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()

  int find_column(const std::string& name) const;  // -1 when absent
};

// Numeric CSV with one header row. Ragged rows or non-numeric fields raise
// CsvError with the offending line number.
CsvTable read_csv(const std::string& path);

// Split into predictors and response. `response` names the response column;
// empty means the last column.
struct RegressionData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> predictor_names;
  std::string response_name;
};
RegressionData split_response(const CsvTable& table,
                              const std::string& response = "");

}  // namespace qreg

#endif
