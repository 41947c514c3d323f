/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POTP_ML_MATRIX_HPP_
#define POTP_ML_MATRIX_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "potp/error.hpp"

namespace potp::ml {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& v) {
    Matrix m(v.size(), v.empty() ? 0 : v.front().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].size() != m.cols) throw InvalidArgument("dimension mismatch: ragged rows");
      std::copy(v[i].begin(), v[i].end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
    }
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix m(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto r = row(idx[i]);
      std::copy(r.begin(), r.end(), m.row(i).begin());
    }
    return m;
  }

  Matrix select_cols(std::span<const std::size_t> idx) const {
    Matrix m(rows, idx.size());
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
    return m;
  }
};

/// In-place Cholesky factorisation of a symmetric positive definite matrix
/// (lower triangle). Throws if the matrix is not positive definite.
inline void cholesky(Matrix& a) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) throw InvalidArgument("matrix is not positive definite");
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
    for (std::size_t k = j + 1; k < n; ++k) a(j, k) = 0.0;
  }
}

/// Solves L L^T x = b given the factor from cholesky().
inline std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
  const std::size_t n = l.rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

/// Numerically stable softmax, in place.
inline void softmax(std::span<double> z) {
  double m = -INFINITY;
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double& v : z) s += (v = std::exp(v - m));
  for (double& v : z) v /= s;
}

/// Index of the largest value; ties go to the smallest index.
inline int argmax_index(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

}  // namespace potp::ml

#endif  // POTP_ML_MATRIX_HPP_
