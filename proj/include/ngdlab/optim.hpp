#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ngdlab/fisher.hpp"
#include "ngdlab/matrix.hpp"
#include "ngdlab/network.hpp"

namespace ngdlab {

enum class Method { kSgd, kExactNgd, kBlockNgd, kTengrad };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Shared optimizer knobs. alpha is the base learning rate; beta the
/// damping ridge added to curvature before inversion; lr_decay a per-epoch
/// geometric factor; weight_decay an L2 pull toward zero applied inside the
/// step. Momentum is deliberately absent.
struct OptimConfig {
  Method method = Method::kSgd;
  double alpha = 1e-2;
  double beta = 1e-2;
  double lr_decay = 1.0;
  double weight_decay = 0.0;
  std::size_t dense_cap = kDefaultDenseCap;
};

/// Checks the invariants a training run relies on: positive alpha,
/// lr_decay in (0,1], nonnegative weight decay, and beta > 0 for the
/// curvature-based methods (the empirical Fisher is rank-deficient whenever
/// m < p, so undamped solves are not meaningful in training).
void validate_config(const OptimConfig& cfg);

/// Per-step working-set accounting: the number of stored real scalars the
/// optimizer touched beyond the model weights and the forward cache
/// (gradient buffers, any explicit F, Grams, Jacobian substitutes).
/// Reported bytes are 8x this count.
struct StepStats {
  std::size_t working_set_scalars = 0;
};

/// Plain gradient step: W_l <- W_l - alpha·(g_l + weight_decay·W_l).
/// Updates in place; the working set is the gradient buffers alone.
StepStats sgd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                   const OptimConfig& cfg);

/// Exact damped natural-gradient step on the flattened parameter vector:
/// delta = (F + beta·I)^{-1} vec(g) with the full empirical Fisher, then
/// W <- W - alpha·(delta + weight_decay·W). Needs p within the dense cap.
StepStats exact_ngd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache& cache, const OptimConfig& cfg);

/// Block-diagonal variant: an independent explicit solve per layer with
/// F_l = (1/m)·J_lᵀJ_l. Identical contract to exact_ngd_step otherwise.
StepStats block_ngd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache& cache, const OptimConfig& cfg);

/// The same block-diagonal update computed through the Gram/Woodbury path:
/// per layer, with batch-mean gradient g_l and per-sample caches I_l, G_l,
///   S = (I_lᵀI_l ⊙ G_lᵀG_l)/m + beta·I          (m x m)
///   b = ((g_lᵀI_l) ⊙ G_l)ᵀ·1                     (J_l·vec(g_l), m x 1)
///   v = S^{-1} b
///   U = I_l·((v·1ᵀ) ⊙ G_lᵀ)                      (J_lᵀv unflattened)
///   W_l <- W_l - (alpha/beta)·(g_l - U/m) - alpha·weight_decay·W_l
/// Never materializes J_l or F_l; must match block_ngd_step to rounding.
StepStats tengrad_step(NetworkModel& net, const std::vector<Matrix>& grads,
                       const BatchCache& cache, const OptimConfig& cfg);

/// Dispatches on cfg.method. cache may be null for SGD only.
StepStats optimizer_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache* cache, const OptimConfig& cfg);

/// Effective learning rate at a given epoch: alpha · lr_decay^epoch.
double lr_schedule(const OptimConfig& cfg, std::size_t epoch);

}  // namespace ngdlab
