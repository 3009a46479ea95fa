// Dense row-major double matrix. Small sizes only (L x h, L x L); no BLAS.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace spanproto {

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }

  size_t size() const { return a.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double v : a) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void fill(double v) {
    for (double& x : a) x = v;
  }
};

// C += A * B
inline void matmul_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.cols == B.rows && C.rows == A.rows && C.cols == B.cols);
  const int n = A.rows, k = A.cols, m = B.cols;
  for (int i = 0; i < n; ++i) {
    const double* arow = &A.a[static_cast<size_t>(i) * k];
    double* crow = &C.a[static_cast<size_t>(i) * m];
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = &B.a[static_cast<size_t>(p) * m];
      for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

// C += A * B^T
inline void matmul_nt_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.cols == B.cols && C.rows == A.rows && C.cols == B.rows);
  const int n = A.rows, k = A.cols, m = B.rows;
  for (int i = 0; i < n; ++i) {
    const double* arow = &A.a[static_cast<size_t>(i) * k];
    double* crow = &C.a[static_cast<size_t>(i) * m];
    for (int j = 0; j < m; ++j) {
      const double* brow = &B.a[static_cast<size_t>(j) * k];
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] += s;
    }
  }
}

// C += A^T * B
inline void matmul_tn_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.rows == B.rows && C.rows == A.cols && C.cols == B.cols);
  const int n = A.cols, k = A.rows, m = B.cols;
  for (int p = 0; p < k; ++p) {
    const double* arow = &A.a[static_cast<size_t>(p) * n];
    const double* brow = &B.a[static_cast<size_t>(p) * m];
    for (int i = 0; i < n; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* crow = &C.a[static_cast<size_t>(i) * m];
      for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace spanproto
