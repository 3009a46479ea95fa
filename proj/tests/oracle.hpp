// Independent naive reference implementations used to check the library's
// vectorized / graph-based paths. Everything here is a direct transcription
// of the defining formulas with plain double loops; none of it calls into
// the implementation under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "spanproto/episode.hpp"
#include "spanproto/mat.hpp"

namespace oracle {

using spanproto::Mat;
using spanproto::Span;

// q_i = W h_i + b, one row at a time.
inline Mat project(const Mat& H, const Mat& W, const Mat& b) {
  Mat out(H.rows, W.cols);
  for (int i = 0; i < H.rows; ++i) {
    for (int j = 0; j < W.cols; ++j) {
      double s = b(0, j);
      for (int k = 0; k < H.cols; ++k) s += W(k, j) * H(i, k);
      out(i, j) = s;
    }
  }
  return out;
}

// f(i, j) = q_i . k_j + wv . (h_i + h_j) for every pair.
inline Mat score_pairs(const Mat& H, const Mat& Q, const Mat& K, const Mat& wv) {
  Mat out(H.rows, H.rows);
  for (int i = 0; i < H.rows; ++i) {
    for (int j = 0; j < H.rows; ++j) {
      double s = 0.0;
      for (int k = 0; k < Q.cols; ++k) s += Q(i, k) * K(j, k);
      for (int k = 0; k < H.cols; ++k) s += wv(k, 0) * (H(i, k) + H(j, k));
      out(i, j) = s;
    }
  }
  return out;
}

// log(1 + sum_{i<=j} exp((-1)^target * f)), direct form.
inline double span_loss(const Mat& f, const Mat& target) {
  double sum = 0.0;
  for (int i = 0; i < f.rows; ++i) {
    for (int j = i; j < f.cols; ++j) {
      const double sign = target(i, j) > 0.5 ? -1.0 : 1.0;
      sum += std::exp(sign * f(i, j));
    }
  }
  return std::log(1.0 + sum);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<Span> decode(const Mat& f, double theta) {
  std::vector<Span> out;
  for (int i = 0; i < f.rows; ++i) {
    for (int j = i; j < f.cols; ++j) {
      if (sigmoid(f(i, j)) >= theta) out.push_back({i, j});
    }
  }
  return out;
}

// Grouped mean of u-vectors by type name.
inline Mat prototypes(const std::vector<std::vector<double>>& us,
                      const std::vector<std::string>& labels,
                      const std::vector<std::string>& types) {
  const int h = static_cast<int>(us.front().size());
  Mat out(static_cast<int>(types.size()), h);
  for (size_t t = 0; t < types.size(); ++t) {
    int count = 0;
    std::vector<double> acc(static_cast<size_t>(h), 0.0);
    for (size_t i = 0; i < us.size(); ++i) {
      if (labels[i] != types[t]) continue;
      ++count;
      for (int k = 0; k < h; ++k) acc[static_cast<size_t>(k)] += us[i][static_cast<size_t>(k)];
    }
    for (int k = 0; k < h; ++k) out(static_cast<int>(t), k) = acc[static_cast<size_t>(k)] / count;
  }
  return out;
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Mean over mentions of -log softmax_t(-d(u, c_t)) at the gold type.
inline double proto_loss(const std::vector<std::vector<double>>& us,
                         const std::vector<int>& gold, const Mat& centroids) {
  if (us.empty()) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < us.size(); ++i) {
    std::vector<double> logits;
    for (int t = 0; t < centroids.rows; ++t) {
      std::vector<double> c(static_cast<size_t>(centroids.cols));
      for (int k = 0; k < centroids.cols; ++k) c[static_cast<size_t>(k)] = centroids(t, k);
      logits.push_back(-euclid(us[i], c));
    }
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z);
    total += -std::log(std::exp(logits[static_cast<size_t>(gold[i])]) / denom);
  }
  return total / static_cast<double>(us.size());
}

// (1/(N*M)) sum_t sum_fp max(0, r - d).
inline double margin_loss(const std::vector<std::vector<double>>& fps, const Mat& centroids,
                          double radius) {
  if (fps.empty()) return 0.0;
  double total = 0.0;
  for (int t = 0; t < centroids.rows; ++t) {
    std::vector<double> c(static_cast<size_t>(centroids.cols));
    for (int k = 0; k < centroids.cols; ++k) c[static_cast<size_t>(k)] = centroids(t, k);
    for (const auto& u : fps) total += std::max(0.0, radius - euclid(u, c));
  }
  return total / (static_cast<double>(centroids.rows) * static_cast<double>(fps.size()));
}

}  // namespace oracle
