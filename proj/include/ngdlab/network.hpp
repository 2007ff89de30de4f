#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ngdlab/matrix.hpp"

namespace ngdlab {

enum class Activation { kTanh, kRelu, kIdentity };
enum class Head { kGaussianUnitVariance, kCategoricalSoftmax };

std::string to_string(Activation a);
std::string to_string(Head h);
Activation activation_from_string(const std::string& name);
Head head_from_string(const std::string& name);

/// One dense layer. The weight matrix is (in_dim + 1) x out_dim; the last
/// input row is the bias feature, fed by a constant-one row appended to the
/// layer input. Preactivations are O = Wᵀ I.
struct DenseLayer {
  Matrix weight;
  Activation activation = Activation::kTanh;

  std::size_t in_dim() const { return weight.rows() - 1; }
  std::size_t out_dim() const { return weight.cols(); }
};

/// A dense multi-layer network plus the probabilistic head that turns the
/// final preactivations into a predictive distribution. The output layer
/// always uses the identity activation; the head applies its own link.
struct NetworkModel {
  std::vector<DenseLayer> layers;
  Head head = Head::kGaussianUnitVariance;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }
};

/// Per-layer quantities retained by forward/backward. inputs is the
/// bias-augmented layer input ((d_i+1) x m, last row all ones), preacts the
/// preactivation Wᵀ·inputs (d_o x m), and preact_grads the PER-SAMPLE loss
/// derivatives with respect to the preactivations (d_o x m, no 1/m factor;
/// all batch averaging happens downstream).
struct LayerCache {
  Matrix inputs;
  Matrix preacts;
  Matrix preact_grads;
};

struct BatchCache {
  std::vector<LayerCache> layers;
  Matrix predictions;
  std::size_t batch_size = 0;
  bool has_preact_grads = false;
};

/// Builds a network with the given hidden widths. Hidden layers use the
/// requested activation, the output layer identity. Weights are drawn from
/// uniform(-r, r) with r = sqrt(6 / (d_i + d_o)), seeded.
NetworkModel make_network(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                          std::size_t output_dim, Activation activation, Head head,
                          std::uint64_t seed);

/// Runs the network on a column-per-sample batch. Returns predictions
/// (softmax probabilities for the categorical head, raw means for the
/// gaussian head) and, when cache is non-null, fills it with every layer's
/// inputs and preactivations.
Matrix forward(const NetworkModel& net, const Matrix& x, BatchCache* cache = nullptr);

/// Mean per-sample loss: gaussian head (1/m)·Σ ½‖o−y‖², categorical head
/// mean cross-entropy against one-hot targets with probabilities clamped at
/// 1e-12 before the log. Equal to the mean negative log-likelihood up to an
/// additive constant that does not depend on the parameters.
double loss_eval(const Matrix& predictions, const Matrix& targets, Head head);

/// Backpropagates from the head. Fills preact_grads in the cache (per
/// sample, no 1/m) and returns the batch-mean weight gradients
/// g_l = (1/m)·I_l·G_lᵀ, one per layer.
std::vector<Matrix> backward(const NetworkModel& net, BatchCache& cache,
                             const Matrix& targets);

/// Backpropagates from caller-chosen output preactivation derivatives
/// instead of a head. Used by curvature probes that need gradients of
/// individual outputs; backward() delegates here after applying its head
/// link. output_grads must be d_out x m.
std::vector<Matrix> backward_from_output_grads(const NetworkModel& net, BatchCache& cache,
                                               const Matrix& output_grads);

/// Draws labels from the model's own predictive distribution; deterministic
/// for a fixed seed. Gaussian head: predictions plus unit-variance noise.
/// Categorical head: one-hot samples from the softmax probabilities.
Matrix sample_labels(const NetworkModel& net, const Matrix& x, std::uint64_t seed);

std::size_t param_count(const NetworkModel& net);

/// Row-major vec of each per-layer matrix, concatenated in layer order.
Matrix flatten_grads(const std::vector<Matrix>& grads);
Matrix flatten_params(const NetworkModel& net);
std::vector<Matrix> unflatten_like(const NetworkModel& net, const Matrix& flat);
void set_params(NetworkModel& net, const Matrix& flat);

/// Subtracts one delta matrix per layer, in place. Refuses non-finite
/// deltas before touching any weight.
void apply_update(NetworkModel& net, const std::vector<Matrix>& deltas);

/// Column-wise softmax with the usual max-shift for stability.
Matrix softmax_columns(const Matrix& logits);

}  // namespace ngdlab
