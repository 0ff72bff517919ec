#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diracbvp/grid_space.hpp"

namespace diracbvp::io {

/// Round-trip decimal representation (17 significant digits).
std::string format_number(double value);

/// Writes to a temporary sibling and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Columns: x coordinates, then re/im per mask in increasing mask order; masks named as bit strings.
std::string field_csv(const Field& f);
void write_field_csv(const std::filesystem::path& path, const Field& f);
Field read_field_csv(const std::filesystem::path& path, const Torus& torus);

std::string scalar_csv(const ScalarField& f);
ScalarField read_scalar_csv(const std::filesystem::path& path, const Torus& torus);

/// Columns: x coordinates, then re/im of the vector block a_ij in row-major order.
std::string coefficient_csv(const CoefficientField& b);
/// Builds I + A + I + ... from the vector blocks in the file.
CoefficientField read_coefficient_csv(const std::filesystem::path& path, const Torus& torus);

/// Row-major, re/im interleaved; binary is little-endian int64 rows, int64 cols, then doubles.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

}  // namespace diracbvp::io
