#pragma once

#include <cstddef>

#include "ngdlab/matrix.hpp"
#include "ngdlab/network.hpp"

namespace ngdlab {

inline constexpr std::size_t kDefaultDenseCap = 5000;

/// One layer's Fisher information in one of two representations: the
/// explicit p_l x p_l matrix F_l = (1/m)·J_lᵀJ_l, or the pair of m x m
/// Grams (C1 = I_lᵀI_l, C2 = G_lᵀG_l) whose Hadamard product is J_lJ_lᵀ.
/// The Gram form is what the fast update path consumes; explicit blocks
/// exist for the exact and block solvers and for cross-checking.
struct FisherBlock {
  enum class Repr { kExplicit, kGram };

  std::size_t layer_index = 0;
  Repr repr = Repr::kExplicit;
  double damping = 0.0;
  Matrix explicit_fim;  // p_l x p_l, kExplicit only
  Matrix gram_inputs;   // C1, kGram only
  Matrix gram_grads;    // C2, kGram only
};

/// Explicit per-sample Jacobian of one layer: m x p_l, row i equal to the
/// row-major vec of inputs[:,i] · preact_grads[:,i]ᵀ. This is the
/// brute-force reference path; the fast paths must agree with it.
Matrix layer_jacobian_explicit(const Matrix& inputs, const Matrix& preact_grads);

/// J_l·J_lᵀ computed as (I_lᵀI_l) ⊙ (G_lᵀG_l) without forming J_l.
Matrix gram_jacobian(const Matrix& inputs, const Matrix& preact_grads);

/// Full empirical Fisher matrix F = (1/m)·JᵀJ across all layers. Refuses
/// to materialize more than dense_cap x dense_cap entries.
Matrix full_empirical_fim(const BatchCache& cache, std::size_t dense_cap = kDefaultDenseCap);

/// Explicit per-layer block F_l = (1/m)·J_lᵀJ_l wrapped with its metadata.
FisherBlock block_fim(const Matrix& inputs, const Matrix& preact_grads,
                      std::size_t layer_index = 0, double damping = 0.0,
                      std::size_t dense_cap = kDefaultDenseCap);

/// Gram representation of the same block; never larger than m x m.
FisherBlock gram_block(const Matrix& inputs, const Matrix& preact_grads,
                       std::size_t layer_index = 0, double damping = 0.0);

/// Score function for a single sample: the gradient of the log-likelihood
/// at (x, y), flattened in the row-major vec convention. Equal to minus the
/// single-sample loss gradient.
Matrix score(const NetworkModel& net, const Matrix& x, const Matrix& y);

}  // namespace ngdlab
