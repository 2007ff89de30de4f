#include "ngdlab/optim.hpp"

#include <cmath>
#include <sstream>

namespace ngdlab {

namespace {

void require_cache_for(const char* what, const BatchCache& cache,
                       const NetworkModel& net) {
  if (cache.layers.size() != net.layers.size() || cache.batch_size == 0) {
    throw StateError(std::string(what) + ": cache does not match the network");
  }
  if (!cache.has_preact_grads) {
    throw StateError(std::string(what) +
                     ": cache has no per-sample gradients; run backward first");
  }
}

void require_grads_for(const char* what, const std::vector<Matrix>& grads,
                       const NetworkModel& net) {
  if (grads.size() != net.layers.size()) {
    throw ShapeError(std::string(what) + ": one gradient matrix per layer required");
  }
  for (std::size_t l = 0; l < grads.size(); ++l) {
    const Matrix& w = net.layers[l].weight;
    if (grads[l].rows() != w.rows() || grads[l].cols() != w.cols()) {
      std::ostringstream os;
      os << what << ": gradient shape mismatch at layer " << l;
      throw ShapeError(os.str());
    }
  }
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kSgd: return "sgd";
    case Method::kExactNgd: return "exact-ngd";
    case Method::kBlockNgd: return "block-ngd";
    case Method::kTengrad: return "tengrad";
  }
  return "sgd";
}

Method method_from_string(const std::string& name) {
  if (name == "sgd") return Method::kSgd;
  if (name == "exact-ngd" || name == "exact_ngd") return Method::kExactNgd;
  if (name == "block-ngd" || name == "block_ngd") return Method::kBlockNgd;
  if (name == "tengrad") return Method::kTengrad;
  throw ConfigError("unknown method: " + name);
}

void validate_config(const OptimConfig& cfg) {
  // alpha = 0 is allowed as a deliberate freeze (constant-loss baseline).
  if (cfg.alpha < 0.0 || !std::isfinite(cfg.alpha)) {
    throw ConfigError("alpha must be a nonnegative finite number");
  }
  if (!(cfg.lr_decay > 0.0) || cfg.lr_decay > 1.0) {
    throw ConfigError("lr_decay must lie in (0, 1]");
  }
  if (cfg.weight_decay < 0.0 || !std::isfinite(cfg.weight_decay)) {
    throw ConfigError("weight_decay must be nonnegative and finite");
  }
  if (cfg.method != Method::kSgd && !(cfg.beta > 0.0)) {
    throw ConfigError(
        "beta must be positive for curvature-based methods: the empirical "
        "Fisher is rank-deficient whenever the batch is smaller than the "
        "parameter count");
  }
}

double lr_schedule(const OptimConfig& cfg, std::size_t epoch) {
  return cfg.alpha * std::pow(cfg.lr_decay, static_cast<double>(epoch));
}

StepStats sgd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                   const OptimConfig& cfg) {
  require_grads_for("sgd_step", grads, net);
  // Two passes so a non-finite update aborts before any weight changes;
  // the update itself is in place and allocates nothing, which keeps the
  // working set at exactly the p gradient scalars.
  for (std::size_t l = 0; l < grads.size(); ++l) {
    const Matrix& g = grads[l];
    const Matrix& w = net.layers[l].weight;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double step = cfg.alpha * (g.data()[i] + cfg.weight_decay * w.data()[i]);
      if (!std::isfinite(step)) {
        std::ostringstream os;
        os << "sgd_step: non-finite update at layer " << l << "; step aborted";
        throw NumericError(os.str());
      }
    }
  }
  for (std::size_t l = 0; l < grads.size(); ++l) {
    const Matrix& g = grads[l];
    Matrix& w = net.layers[l].weight;
    for (std::size_t i = 0; i < g.size(); ++i) {
      w.data()[i] -= cfg.alpha * (g.data()[i] + cfg.weight_decay * w.data()[i]);
    }
  }
  return StepStats{param_count(net)};
}

StepStats exact_ngd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache& cache, const OptimConfig& cfg) {
  require_grads_for("exact_ngd_step", grads, net);
  require_cache_for("exact_ngd_step", cache, net);
  const std::size_t p = param_count(net);
  const std::size_t m = cache.batch_size;

  const Matrix fim = full_empirical_fim(cache, cfg.dense_cap);
  const Matrix damped = add_diagonal(fim, cfg.beta);
  const Matrix inverse = spd_inverse(damped);
  const Matrix delta = matmul(inverse, flatten_grads(grads));

  std::vector<Matrix> layer_deltas = unflatten_like(net, delta);
  for (std::size_t l = 0; l < layer_deltas.size(); ++l) {
    Matrix& d = layer_deltas[l];
    const Matrix& w = net.layers[l].weight;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d.data()[i] = cfg.alpha * (d.data()[i] + cfg.weight_decay * w.data()[i]);
    }
  }
  apply_update(net, layer_deltas);

  // Working set: gradient buffers (p), the flattened gradient and solution
  // (2p), the batch Jacobian (m*p), and three p x p matrices (F, the damped
  // copy, the inverse).
  StepStats stats;
  stats.working_set_scalars = 3 * p * p + m * p + 3 * p;
  return stats;
}

StepStats block_ngd_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache& cache, const OptimConfig& cfg) {
  require_grads_for("block_ngd_step", grads, net);
  require_cache_for("block_ngd_step", cache, net);
  const std::size_t m = cache.batch_size;

  std::vector<Matrix> layer_deltas;
  layer_deltas.reserve(net.layers.size());
  std::size_t scalars = param_count(net);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const FisherBlock block = block_fim(cache.layers[l].inputs,
                                        cache.layers[l].preact_grads, l,
                                        cfg.beta, cfg.dense_cap);
    const std::size_t p_l = net.layers[l].weight.size();
    Matrix inverse;
    try {
      inverse = spd_inverse(add_diagonal(block.explicit_fim, cfg.beta));
    } catch (const SingularError& err) {
      std::ostringstream os;
      os << "block_ngd_step: layer " << l << ": " << err.what();
      throw SingularError(os.str());
    }
    Matrix flat(p_l, 1);
    for (std::size_t i = 0; i < p_l; ++i) flat(i, 0) = grads[l].data()[i];
    const Matrix solved = matmul(inverse, flat);

    Matrix delta(grads[l].rows(), grads[l].cols());
    const Matrix& w = net.layers[l].weight;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      delta.data()[i] = cfg.alpha * (solved.data()[i] + cfg.weight_decay * w.data()[i]);
    }
    layer_deltas.push_back(std::move(delta));
    scalars += 3 * p_l * p_l + m * p_l + 2 * p_l;
  }
  apply_update(net, layer_deltas);
  return StepStats{scalars};
}

StepStats tengrad_step(NetworkModel& net, const std::vector<Matrix>& grads,
                       const BatchCache& cache, const OptimConfig& cfg) {
  require_grads_for("tengrad_step", grads, net);
  require_cache_for("tengrad_step", cache, net);
  if (!(cfg.beta > 0.0)) {
    throw ConfigError("tengrad_step: beta must be positive (the update divides by it)");
  }
  const std::size_t m = cache.batch_size;
  const double inv_m = 1.0 / static_cast<double>(m);

  std::vector<Matrix> layer_deltas;
  layer_deltas.reserve(net.layers.size());
  std::size_t scalars = param_count(net);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Matrix& inputs = cache.layers[l].inputs;        // (d_i+1) x m
    const Matrix& gmat = cache.layers[l].preact_grads;    // d_o x m
    const Matrix& gbar = grads[l];                        // (d_i+1) x d_o
    const std::size_t q = gmat.rows();
    const std::size_t p_l = gbar.size();

    // S = (IᵀI ⊙ GᵀG)/m + beta·I, the damped Gram of the layer Jacobian.
    const Matrix c1 = matmul(transpose(inputs), inputs);
    const Matrix c2 = matmul(transpose(gmat), gmat);
    const Matrix s = add_diagonal(scaled(hadamard(c1, c2), inv_m), cfg.beta);

    // b = J·vec(gbar) assembled without J: entry i sums (gbarᵀI ⊙ G)
    // down column i.
    const Matrix gti = matmul(transpose(gbar), inputs);   // d_o x m
    const Matrix prod = hadamard(gti, gmat);
    Matrix b(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < q; ++j) sum += prod(j, i);
      b(i, 0) = sum;
    }

    Matrix v;
    try {
      v = cholesky_solve(s, b);
    } catch (const SingularError& err) {
      std::ostringstream os;
      os << "tengrad_step: layer " << l << ": " << err.what();
      throw SingularError(os.str());
    }

    // U = I·((v·1ᵀ) ⊙ Gᵀ) = Jᵀv unflattened to the weight shape.
    Matrix gt_scaled = transpose(gmat);                   // m x d_o
    for (std::size_t i = 0; i < m; ++i) {
      double* row = gt_scaled.row_ptr(i);
      const double vi = v(i, 0);
      for (std::size_t j = 0; j < q; ++j) row[j] *= vi;
    }
    const Matrix u = matmul(inputs, gt_scaled);           // (d_i+1) x d_o

    Matrix delta(gbar.rows(), gbar.cols());
    const Matrix& w = net.layers[l].weight;
    const double scale = cfg.alpha / cfg.beta;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      delta.data()[i] = scale * (gbar.data()[i] - inv_m * u.data()[i]) +
                        cfg.alpha * cfg.weight_decay * w.data()[i];
    }
    layer_deltas.push_back(std::move(delta));

    // Working set per layer: four m x m matrices (C1, C2, S, its factor),
    // b and v (2m), three d_o x m intermediates, and the U/delta buffers.
    scalars += 4 * m * m + 2 * m + 3 * q * m + 2 * p_l;
  }
  apply_update(net, layer_deltas);
  return StepStats{scalars};
}

StepStats optimizer_step(NetworkModel& net, const std::vector<Matrix>& grads,
                         const BatchCache* cache, const OptimConfig& cfg) {
  switch (cfg.method) {
    case Method::kSgd:
      return sgd_step(net, grads, cfg);
    case Method::kExactNgd:
      if (!cache) throw StateError("exact_ngd_step needs a batch cache");
      return exact_ngd_step(net, grads, *cache, cfg);
    case Method::kBlockNgd:
      if (!cache) throw StateError("block_ngd_step needs a batch cache");
      return block_ngd_step(net, grads, *cache, cfg);
    case Method::kTengrad:
      if (!cache) throw StateError("tengrad_step needs a batch cache");
      return tengrad_step(net, grads, *cache, cfg);
  }
  throw ConfigError("optimizer_step: unknown method");
}

}  // namespace ngdlab
