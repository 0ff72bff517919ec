#include <fmt/format.h>

#include <bitset>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "diracbvp/errors.hpp"
#include "diracbvp/io.hpp"

namespace diracbvp::io {

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string mask_name(int dim_n, int mask) { return std::bitset<8>(mask).to_string().substr(8 - (dim_n + 1)); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path, std::size_t expected_cols) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != expected_cols)
      throw DimensionMismatch(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(expected_cols) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::stod(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string field_csv(const Field& f) {
  const Torus& t = f.torus();
  fmt::memory_buffer buf;
  for (int a = 0; a < t.dim_n(); ++a) fmt::format_to(std::back_inserter(buf), "{}x{}", a ? "," : "", a);
  for (int b = 0; b < t.lambda_dim(); ++b) {
    const std::string name = mask_name(t.dim_n(), b);
    fmt::format_to(std::back_inserter(buf), ",re_{},im_{}", name, name);
  }
  buf.push_back('\n');
  for (int p = 0; p < t.point_count(); ++p) {
    for (int a = 0; a < t.dim_n(); ++a)
      fmt::format_to(std::back_inserter(buf), "{}{:.17g}", a ? "," : "", t.coordinate(p, a));
    for (int b = 0; b < t.lambda_dim(); ++b) {
      const Complex c = f.coeff(p, BasisIndex(b));
      fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g}", c.real(), c.imag());
    }
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

void write_field_csv(const std::filesystem::path& path, const Field& f) { write_file_atomic(path, field_csv(f)); }

Field read_field_csv(const std::filesystem::path& path, const Torus& torus) {
  const auto rows = read_numeric_rows(path, torus.dim_n() + 2 * torus.lambda_dim());
  if (static_cast<int>(rows.size()) != torus.point_count())
    throw DimensionMismatch(path.string() + ": row count does not match the torus");
  Field f(torus);
  for (int p = 0; p < torus.point_count(); ++p)
    for (int b = 0; b < torus.lambda_dim(); ++b)
      f.coeff(p, BasisIndex(b)) = Complex(rows[p][torus.dim_n() + 2 * b], rows[p][torus.dim_n() + 2 * b + 1]);
  return f;
}

std::string scalar_csv(const ScalarField& f) {
  const Torus& t = f.torus();
  fmt::memory_buffer buf;
  for (int a = 0; a < t.dim_n(); ++a) fmt::format_to(std::back_inserter(buf), "{}x{}", a ? "," : "", a);
  fmt::format_to(std::back_inserter(buf), ",re,im\n");
  for (int p = 0; p < t.point_count(); ++p) {
    for (int a = 0; a < t.dim_n(); ++a)
      fmt::format_to(std::back_inserter(buf), "{}{:.17g}", a ? "," : "", t.coordinate(p, a));
    fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g}\n", f.values()[p].real(), f.values()[p].imag());
  }
  return fmt::to_string(buf);
}

ScalarField read_scalar_csv(const std::filesystem::path& path, const Torus& torus) {
  const auto rows = read_numeric_rows(path, torus.dim_n() + 2);
  if (static_cast<int>(rows.size()) != torus.point_count())
    throw DimensionMismatch(path.string() + ": row count does not match the torus");
  ScalarField f(torus);
  for (int p = 0; p < torus.point_count(); ++p)
    f.values()[p] = Complex(rows[p][torus.dim_n()], rows[p][torus.dim_n() + 1]);
  return f;
}

std::string coefficient_csv(const CoefficientField& b) {
  const Torus& t = b.torus();
  const int side = t.dim_n() + 1;
  fmt::memory_buffer buf;
  for (int a = 0; a < t.dim_n(); ++a) fmt::format_to(std::back_inserter(buf), "{}x{}", a ? "," : "", a);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) fmt::format_to(std::back_inserter(buf), ",a{}{}_re,a{}{}_im", i, j, i, j);
  buf.push_back('\n');
  for (int p = 0; p < t.point_count(); ++p) {
    for (int a = 0; a < t.dim_n(); ++a) fmt::format_to(std::back_inserter(buf), "{}{:.17g}", a ? "," : "", t.coordinate(p, a));
    const Matrix a = b.vector_block(p);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g}", a(i, j).real(), a(i, j).imag());
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

CoefficientField read_coefficient_csv(const std::filesystem::path& path, const Torus& torus) {
  const int side = torus.dim_n() + 1;
  const auto rows = read_numeric_rows(path, static_cast<std::size_t>(torus.dim_n() + 2 * side * side));
  if (static_cast<int>(rows.size()) != torus.point_count())
    throw DimensionMismatch(path.string() + ": row count does not match the torus");
  std::vector<Matrix> blocks;
  blocks.reserve(rows.size());
  for (const auto& row : rows) {
    Matrix a(side, side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) {
        const auto c = static_cast<std::size_t>(torus.dim_n() + 2 * (i * side + j));
        a(i, j) = Complex(row[c], row[c + 1]);
      }
    blocks.push_back(std::move(a));
  }
  return CoefficientField::from_vector_block(torus, blocks);
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::string content;
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  content.append(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re_im[2] = {m(i, j).real(), m(i, j).imag()};
      content.append(reinterpret_cast<const char*>(re_im), sizeof(re_im));
    }
  write_file_atomic(path, content);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  fmt::memory_buffer buf;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      fmt::format_to(std::back_inserter(buf), "{}{:.17g},{:.17g}", j ? "," : "", m(i, j).real(), m(i, j).imag());
    buf.push_back('\n');
  }
  write_file_atomic(path, fmt::to_string(buf));
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::int64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  Matrix m(dims[0], dims[1]);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double re_im[2];
      in.read(reinterpret_cast<char*>(re_im), sizeof(re_im));
      m(i, j) = Complex(re_im[0], re_im[1]);
    }
  if (!in) throw Error("truncated matrix dump " + path.string());
  return m;
}

}  // namespace diracbvp::io
