#pragma once

// Shared helpers for the test binaries: deterministic random inputs and a
// couple of slow-but-independent reference computations (Jacobi eigenvalues,
// power iteration). Everything here is test support, not library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ngdlab/matrix.hpp"
#include "ngdlab/network.hpp"

namespace testsupport {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline ngdlab::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                    std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  ngdlab::Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(gen);
  return m;
}

// Random symmetric positive definite matrix, built as MᵀM + I so the
// smallest eigenvalue is at least one.
inline ngdlab::Matrix random_spd(std::size_t n, std::mt19937_64& gen) {
  ngdlab::Matrix m = random_matrix(n, n, gen);
  ngdlab::Matrix s = ngdlab::matmul(ngdlab::transpose(m), m);
  return ngdlab::add_diagonal(s, 1.0);
}

inline double max_abs_diff(const ngdlab::Matrix& a, const ngdlab::Matrix& b) {
  return ngdlab::sub(a, b).max_abs();
}

inline double rel_diff(const ngdlab::Matrix& a, const ngdlab::Matrix& b) {
  const double denom = std::max(a.max_abs(), b.max_abs());
  if (denom == 0.0) return 0.0;
  return max_abs_diff(a, b) / denom;
}

// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations. O(n^3) per
// sweep and completely independent of the library's Cholesky machinery,
// which is the point: it cross-checks rank and definiteness claims.
inline std::vector<double> jacobi_eigenvalues(ngdlab::Matrix a,
                                              int max_sweeps = 60) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-26 * (1.0 + a.max_abs() * a.max_abs())) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a(i, i);
  std::sort(evals.begin(), evals.end(), std::greater<double>());
  return evals;
}

// Random small network: up to max_layers hidden layers, widths within
// max_width, tanh hidden activations.
inline ngdlab::NetworkModel random_net(std::mt19937_64& gen, ngdlab::Head head,
                                       std::size_t max_hidden = 2,
                                       std::size_t max_width = 6) {
  const std::size_t d_in = 1 + gen() % max_width;
  const std::size_t d_out = (head == ngdlab::Head::kCategoricalSoftmax)
                                ? 2 + gen() % (max_width - 1)
                                : 1 + gen() % max_width;
  std::vector<std::size_t> hidden;
  const std::size_t n_hidden = gen() % (max_hidden + 1);
  for (std::size_t i = 0; i < n_hidden; ++i) hidden.push_back(1 + gen() % max_width);
  return ngdlab::make_network(d_in, hidden, d_out, ngdlab::Activation::kTanh, head,
                              gen());
}

// Random batch of inputs plus matching targets for the net's head.
inline std::pair<ngdlab::Matrix, ngdlab::Matrix> random_batch(
    const ngdlab::NetworkModel& net, std::size_t m, std::mt19937_64& gen) {
  ngdlab::Matrix x = random_matrix(net.input_dim(), m, gen);
  ngdlab::Matrix y(net.output_dim(), m);
  if (net.head == ngdlab::Head::kGaussianUnitVariance) {
    y = random_matrix(net.output_dim(), m, gen);
  } else {
    for (std::size_t c = 0; c < m; ++c) y(gen() % net.output_dim(), c) = 1.0;
  }
  return {std::move(x), std::move(y)};
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_iteration_lambda_max(const ngdlab::Matrix& a,
                                         std::uint64_t seed = 7,
                                         int iters = 500) {
  auto gen = rng(seed);
  ngdlab::Matrix v = random_matrix(a.rows(), 1, gen);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    ngdlab::Matrix w = ngdlab::matmul(a, v);
    double norm = 0.0;
    for (double x : w.data()) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    v = ngdlab::scaled(w, 1.0 / norm);
  }
  return lambda;
}

}  // namespace testsupport
