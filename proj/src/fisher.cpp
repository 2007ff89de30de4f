#include "ngdlab/fisher.hpp"

#include <sstream>

namespace ngdlab {

namespace {

void require_matching_batch(const Matrix& inputs, const Matrix& preact_grads) {
  if (inputs.cols() != preact_grads.cols()) {
    std::ostringstream os;
    os << "layer cache is inconsistent: inputs have " << inputs.cols()
       << " samples, preactivation gradients " << preact_grads.cols();
    throw ShapeError(os.str());
  }
  if (inputs.cols() == 0) throw ShapeError("empty batch");
}

void require_cap(std::size_t p, std::size_t cap, const char* what) {
  if (p > cap) {
    std::ostringstream os;
    os << what << ": " << p << " parameters exceed the dense cap of " << cap;
    throw CapacityError(os.str());
  }
}

void require_backward_cache(const BatchCache& cache) {
  if (cache.layers.empty() || cache.batch_size == 0) {
    throw StateError("batch cache is empty; run forward first");
  }
  if (!cache.has_preact_grads) {
    throw StateError("batch cache has no preactivation gradients; run backward first");
  }
}

}  // namespace

Matrix layer_jacobian_explicit(const Matrix& inputs, const Matrix& preact_grads) {
  require_matching_batch(inputs, preact_grads);
  // Column c of the Khatri-Rao product is vec(inputs[:,c]·grads[:,c]ᵀ)
  // under the row-major convention, so the Jacobian is its transpose.
  return transpose(khatri_rao_cols(inputs, preact_grads));
}

Matrix gram_jacobian(const Matrix& inputs, const Matrix& preact_grads) {
  require_matching_batch(inputs, preact_grads);
  const Matrix c1 = matmul(transpose(inputs), inputs);
  const Matrix c2 = matmul(transpose(preact_grads), preact_grads);
  return hadamard(c1, c2);
}

Matrix full_empirical_fim(const BatchCache& cache, std::size_t dense_cap) {
  require_backward_cache(cache);
  std::size_t p = 0;
  for (const LayerCache& layer : cache.layers) {
    p += layer.inputs.rows() * layer.preact_grads.rows();
  }
  require_cap(p, dense_cap, "full_empirical_fim");

  const std::size_t m = cache.batch_size;
  Matrix jacobian(m, p);
  std::size_t col = 0;
  for (const LayerCache& layer : cache.layers) {
    const Matrix j_l = layer_jacobian_explicit(layer.inputs, layer.preact_grads);
    for (std::size_t i = 0; i < m; ++i) {
      const double* src = j_l.row_ptr(i);
      double* dst = jacobian.row_ptr(i) + col;
      for (std::size_t k = 0; k < j_l.cols(); ++k) dst[k] = src[k];
    }
    col += j_l.cols();
  }
  return scaled(matmul(transpose(jacobian), jacobian), 1.0 / static_cast<double>(m));
}

FisherBlock block_fim(const Matrix& inputs, const Matrix& preact_grads,
                      std::size_t layer_index, double damping, std::size_t dense_cap) {
  require_matching_batch(inputs, preact_grads);
  const std::size_t p_l = inputs.rows() * preact_grads.rows();
  require_cap(p_l, dense_cap, "block_fim");

  const Matrix j_l = layer_jacobian_explicit(inputs, preact_grads);
  FisherBlock block;
  block.layer_index = layer_index;
  block.repr = FisherBlock::Repr::kExplicit;
  block.damping = damping;
  block.explicit_fim =
      scaled(matmul(transpose(j_l), j_l), 1.0 / static_cast<double>(inputs.cols()));
  return block;
}

FisherBlock gram_block(const Matrix& inputs, const Matrix& preact_grads,
                       std::size_t layer_index, double damping) {
  require_matching_batch(inputs, preact_grads);
  FisherBlock block;
  block.layer_index = layer_index;
  block.repr = FisherBlock::Repr::kGram;
  block.damping = damping;
  block.gram_inputs = matmul(transpose(inputs), inputs);
  block.gram_grads = matmul(transpose(preact_grads), preact_grads);
  return block;
}

Matrix score(const NetworkModel& net, const Matrix& x, const Matrix& y) {
  if (x.cols() != 1 || y.cols() != 1) {
    throw ShapeError("score: expects a single sample (one column)");
  }
  BatchCache cache;
  forward(net, x, &cache);
  const std::vector<Matrix> grads = backward(net, cache, y);
  // With m = 1 the batch-mean gradient IS the per-sample loss gradient;
  // the log-likelihood gradient is its negation.
  return scaled(flatten_grads(grads), -1.0);
}

}  // namespace ngdlab
