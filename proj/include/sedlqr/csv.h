#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Dense>

namespace sedlqr {

/// %.17g, with "inf", "-inf" and "nan" for non-finite values. Round-trips.
std::string FormatDouble(double v);

/// Row-major dense CSV, one matrix row per line, no header.
void WriteMatrixCsv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd ReadMatrixCsv(std::istream& in);

void WriteMatrixCsvFile(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd ReadMatrixCsvFile(const std::string& path);

}  // namespace sedlqr
