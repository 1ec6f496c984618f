#pragma once

#include "dssc/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace dssc {

enum class MatrixFormat {
  // Header-free CSV, one line per matrix row; 17 significant digits on write.
  kCsv,
  // "SDM1", rows and cols as little-endian u64, then row-major f64 entries.
  kBinary,
};

// Picks kBinary for a ".bin" or ".sdm" extension, kCsv otherwise.
MatrixFormat format_for_path(const std::filesystem::path& path);

MatrixXd read_matrix(std::istream& in, MatrixFormat format);
void write_matrix(std::ostream& out, const MatrixXd& m, MatrixFormat format);

MatrixXd load_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const std::filesystem::path& path, const MatrixXd& m,
                 MatrixFormat format);

// One base-10 integer per line; blank lines are skipped.
Labels read_labels(std::istream& in);
void write_labels(std::ostream& out, const Labels& labels);

Labels load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const Labels& labels);

}  // namespace dssc
