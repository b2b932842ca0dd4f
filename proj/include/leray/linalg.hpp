#pragma once

// Small dense linear algebra on complex matrices, backed by Eigen.

#include <Eigen/Dense>

#include "leray/types.hpp"

namespace leray::linalg {

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

/// Determinant of the square matrix whose columns are `cols`.
inline cplx det_columns(std::span<const Vector> cols) {
  const auto n = static_cast<Eigen::Index>(cols.size());
  if (n == 0) return 1.0;
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (static_cast<Eigen::Index>(cols[j].size()) != n) throw InputError("det_columns: matrix is not square");
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cols[j][i];
  }
  switch (n) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default: return m.partialPivLu().determinant();
  }
}

inline Matrix rows_to_matrix(std::span<const Vector> rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw InputError("rows_to_matrix: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

/// Smallest singular value of the matrix with the given rows (min(rows, cols) values).
inline double smallest_singular_value(std::span<const Vector> rows) {
  Matrix m = rows_to_matrix(rows);
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s.size() ? s(s.size() - 1) : 0.0;
}

/// Orthonormal basis of the kernel of a single nonzero row vector.
inline std::vector<Vector> null_space_of_row(const Vector& row) {
  const auto m = static_cast<Eigen::Index>(row.size());
  Matrix a(1, m);
  for (Eigen::Index j = 0; j < m; ++j) a(0, j) = row[j];
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  if (svd.singularValues()(0) == 0.0) throw PreconditionError("null_space_of_row: zero gradient");
  const Matrix& v = svd.matrixV();
  std::vector<Vector> basis;
  for (Eigen::Index j = 1; j < m; ++j) {
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) b[i] = v(i, j);
    basis.push_back(std::move(b));
  }
  return basis;
}

/// Solves the square system a x = b by LU with partial pivoting.
inline Vector solve(std::span<const Vector> rows, const Vector& b) {
  Matrix a = rows_to_matrix(rows);
  Eigen::Matrix<cplx, Eigen::Dynamic, 1> rhs(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
  Eigen::Matrix<cplx, Eigen::Dynamic, 1> x = a.fullPivLu().solve(rhs);
  return Vector(x.data(), x.data() + x.size());
}

}  // namespace leray::linalg
