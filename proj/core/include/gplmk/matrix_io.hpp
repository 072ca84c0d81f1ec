#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

namespace gplmk {

// Plain CSV, one matrix row per line, full double precision.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

// Binary layout: uint64 rows, uint64 cols (little-endian), then rows*cols
// float64 values in row-major order.
void write_matrix_binary(const Eigen::MatrixXd& m, std::ostream& out);
Eigen::MatrixXd read_matrix_binary(std::istream& in);

void write_matrix_binary(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path);

}  // namespace gplmk
