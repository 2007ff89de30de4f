#include "ngdlab/network.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ngdlab {

namespace {

void validate_network(const NetworkModel& net) {
  if (net.layers.empty()) throw ShapeError("network has no layers");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    if (layer.weight.rows() < 2 || layer.weight.cols() < 1) {
      throw ShapeError("layer weights must be at least (1+1) x 1");
    }
    if (l + 1 < net.layers.size() &&
        layer.out_dim() != net.layers[l + 1].in_dim()) {
      std::ostringstream os;
      os << "layer " << l << " outputs " << layer.out_dim()
         << " features but layer " << l + 1 << " expects "
         << net.layers[l + 1].in_dim();
      throw ShapeError(os.str());
    }
  }
  if (net.layers.back().activation != Activation::kIdentity) {
    throw ConfigError("output layer must use the identity activation; the head applies the link");
  }
}

double activation_derivative(Activation act, double preact, double activated) {
  switch (act) {
    case Activation::kTanh:
      return 1.0 - activated * activated;
    case Activation::kRelu:
      return preact > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

Matrix augment_with_bias_row(const Matrix& x) {
  Matrix out(x.rows() + 1, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* src = x.row_ptr(i);
    double* dst = out.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
  }
  double* bias = out.row_ptr(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) bias[j] = 1.0;
  return out;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "tanh";
}

std::string to_string(Head h) {
  return h == Head::kGaussianUnitVariance ? "gaussian_unit_variance"
                                          : "categorical_softmax";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation: " + name);
}

Head head_from_string(const std::string& name) {
  if (name == "gaussian_unit_variance" || name == "gaussian") {
    return Head::kGaussianUnitVariance;
  }
  if (name == "categorical_softmax" || name == "categorical") {
    return Head::kCategoricalSoftmax;
  }
  throw ConfigError("unknown head: " + name);
}

NetworkModel make_network(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                          std::size_t output_dim, Activation activation, Head head,
                          std::uint64_t seed) {
  if (input_dim == 0 || output_dim == 0) {
    throw ShapeError("make_network: input and output dims must be positive");
  }
  std::vector<std::size_t> dims;
  dims.push_back(input_dim);
  for (std::size_t h : hidden) {
    if (h == 0) throw ShapeError("make_network: hidden widths must be positive");
    dims.push_back(h);
  }
  dims.push_back(output_dim);

  std::mt19937_64 gen(seed);
  NetworkModel net;
  net.head = head;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t din = dims[l];
    const std::size_t dout = dims[l + 1];
    DenseLayer layer;
    layer.activation = (l + 2 == dims.size()) ? Activation::kIdentity : activation;
    layer.weight = Matrix(din + 1, dout);
    const double r = std::sqrt(6.0 / static_cast<double>(din + dout));
    std::uniform_real_distribution<double> dist(-r, r);
    for (double& w : layer.weight.data()) w = dist(gen);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t c = 0; c < logits.cols(); ++c) {
    double mx = logits(0, c);
    for (std::size_t r = 1; r < logits.rows(); ++r) mx = std::max(mx, logits(r, c));
    double sum = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
      const double e = std::exp(logits(r, c) - mx);
      probs(r, c) = e;
      sum += e;
    }
    for (std::size_t r = 0; r < logits.rows(); ++r) probs(r, c) /= sum;
  }
  return probs;
}

Matrix forward(const NetworkModel& net, const Matrix& x, BatchCache* cache) {
  validate_network(net);
  if (x.rows() != net.input_dim()) {
    std::ostringstream os;
    os << "forward: input has " << x.rows() << " features, network expects "
       << net.input_dim();
    throw ShapeError(os.str());
  }
  if (x.cols() == 0) throw ShapeError("forward: empty batch");

  if (cache) {
    cache->layers.assign(net.layers.size(), LayerCache{});
    cache->batch_size = x.cols();
    cache->has_preact_grads = false;
  }

  Matrix activations = x;
  Matrix preacts;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    Matrix inputs = augment_with_bias_row(activations);
    preacts = matmul(transpose(layer.weight), inputs);
    if (!preacts.all_finite()) {
      std::ostringstream os;
      os << "forward: non-finite preactivations at layer " << l;
      throw NumericError(os.str());
    }
    activations = preacts;
    if (layer.activation == Activation::kTanh) {
      for (double& v : activations.data()) v = std::tanh(v);
    } else if (layer.activation == Activation::kRelu) {
      for (double& v : activations.data()) v = v > 0.0 ? v : 0.0;
    }
    if (cache) {
      cache->layers[l].inputs = std::move(inputs);
      cache->layers[l].preacts = preacts;
    }
  }

  Matrix predictions = (net.head == Head::kCategoricalSoftmax)
                           ? softmax_columns(preacts)
                           : std::move(preacts);
  if (cache) cache->predictions = predictions;
  return predictions;
}

double loss_eval(const Matrix& predictions, const Matrix& targets, Head head) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw ShapeError("loss_eval: prediction and target shapes differ");
  }
  if (predictions.cols() == 0) throw ShapeError("loss_eval: empty batch");
  const double m = static_cast<double>(predictions.cols());
  double total = 0.0;
  if (head == Head::kGaussianUnitVariance) {
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const double d = predictions.data()[i] - targets.data()[i];
      total += 0.5 * d * d;
    }
  } else {
    for (std::size_t c = 0; c < predictions.cols(); ++c) {
      double p_true = 0.0;
      for (std::size_t r = 0; r < predictions.rows(); ++r) {
        p_true += targets(r, c) * predictions(r, c);
      }
      total += -std::log(std::max(p_true, 1e-12));
    }
  }
  return total / m;
}

std::vector<Matrix> backward_from_output_grads(const NetworkModel& net, BatchCache& cache,
                                               const Matrix& output_grads) {
  if (cache.layers.size() != net.layers.size() || cache.batch_size == 0) {
    throw StateError("backward: cache does not match the network; run forward first");
  }
  if (output_grads.rows() != net.output_dim() || output_grads.cols() != cache.batch_size) {
    throw ShapeError("backward: output gradient shape does not match the cache");
  }

  const std::size_t depth = net.layers.size();
  cache.layers[depth - 1].preact_grads = output_grads;
  for (std::size_t l = depth - 1; l-- > 0;) {
    const DenseLayer& next = net.layers[l + 1];
    const Matrix& g_next = cache.layers[l + 1].preact_grads;
    const std::size_t width = net.layers[l].out_dim();
    const std::size_t m = cache.batch_size;

    // Gradient w.r.t. this layer's activations: the next layer's weight
    // rows without the bias row, times the next preactivation gradients.
    Matrix act_grad(width, m);
    for (std::size_t i = 0; i < width; ++i) {
      double* row = act_grad.row_ptr(i);
      const double* wrow = next.weight.row_ptr(i);
      for (std::size_t k = 0; k < next.out_dim(); ++k) {
        const double w = wrow[k];
        if (w == 0.0) continue;
        const double* grow = g_next.row_ptr(k);
        for (std::size_t c = 0; c < m; ++c) row[c] += w * grow[c];
      }
    }

    const Activation act = net.layers[l].activation;
    const Matrix& preacts = cache.layers[l].preacts;
    const Matrix& next_inputs = cache.layers[l + 1].inputs;  // activations + bias row
    for (std::size_t i = 0; i < width; ++i) {
      double* row = act_grad.row_ptr(i);
      const double* orow = preacts.row_ptr(i);
      const double* arow = next_inputs.row_ptr(i);
      for (std::size_t c = 0; c < m; ++c) {
        row[c] *= activation_derivative(act, orow[c], arow[c]);
      }
    }
    cache.layers[l].preact_grads = std::move(act_grad);
  }
  cache.has_preact_grads = true;

  std::vector<Matrix> grads;
  grads.reserve(depth);
  const double inv_m = 1.0 / static_cast<double>(cache.batch_size);
  for (std::size_t l = 0; l < depth; ++l) {
    grads.push_back(scaled(
        matmul(cache.layers[l].inputs, transpose(cache.layers[l].preact_grads)), inv_m));
  }
  return grads;
}

std::vector<Matrix> backward(const NetworkModel& net, BatchCache& cache,
                             const Matrix& targets) {
  if (cache.layers.size() != net.layers.size() || cache.batch_size == 0) {
    throw StateError("backward: cache does not match the network; run forward first");
  }
  if (targets.rows() != net.output_dim() || targets.cols() != cache.batch_size) {
    throw ShapeError("backward: target shape does not match the cached batch");
  }
  // Both heads share the same convenient link derivative: prediction minus
  // target (softmax minus one-hot for the categorical head).
  Matrix link = sub(cache.predictions, targets);
  return backward_from_output_grads(net, cache, link);
}

Matrix sample_labels(const NetworkModel& net, const Matrix& x, std::uint64_t seed) {
  const Matrix predictions = forward(net, x);
  std::mt19937_64 gen(seed);
  if (net.head == Head::kGaussianUnitVariance) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix y = predictions;
    for (double& v : y.data()) v += noise(gen);
    return y;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix y(predictions.rows(), predictions.cols());
  for (std::size_t c = 0; c < predictions.cols(); ++c) {
    const double u = uniform(gen);
    double cum = 0.0;
    std::size_t chosen = predictions.rows() - 1;
    for (std::size_t r = 0; r < predictions.rows(); ++r) {
      cum += predictions(r, c);
      if (u < cum) {
        chosen = r;
        break;
      }
    }
    y(chosen, c) = 1.0;
  }
  return y;
}

std::size_t param_count(const NetworkModel& net) {
  std::size_t p = 0;
  for (const DenseLayer& layer : net.layers) p += layer.weight.size();
  return p;
}

Matrix flatten_grads(const std::vector<Matrix>& grads) {
  std::size_t p = 0;
  for (const Matrix& g : grads) p += g.size();
  Matrix flat(p, 1);
  std::size_t at = 0;
  for (const Matrix& g : grads) {
    for (double v : g.data()) flat(at++, 0) = v;  // row-major vec per layer
  }
  return flat;
}

Matrix flatten_params(const NetworkModel& net) {
  std::vector<Matrix> weights;
  weights.reserve(net.layers.size());
  for (const DenseLayer& layer : net.layers) weights.push_back(layer.weight);
  return flatten_grads(weights);
}

std::vector<Matrix> unflatten_like(const NetworkModel& net, const Matrix& flat) {
  if (flat.cols() != 1 || flat.rows() != param_count(net)) {
    throw ShapeError("unflatten_like: vector length does not match parameter count");
  }
  std::vector<Matrix> out;
  out.reserve(net.layers.size());
  std::size_t at = 0;
  for (const DenseLayer& layer : net.layers) {
    Matrix block(layer.weight.rows(), layer.weight.cols());
    for (double& v : block.data()) v = flat(at++, 0);
    out.push_back(std::move(block));
  }
  return out;
}

void set_params(NetworkModel& net, const Matrix& flat) {
  if (flat.cols() != 1 || flat.rows() != param_count(net)) {
    throw ShapeError("set_params: vector length does not match parameter count");
  }
  // Writes in place: curvature probes call this once per function
  // evaluation, so it should not allocate.
  std::size_t at = 0;
  for (DenseLayer& layer : net.layers) {
    for (double& w : layer.weight.data()) w = flat(at++, 0);
  }
}

void apply_update(NetworkModel& net, const std::vector<Matrix>& deltas) {
  if (deltas.size() != net.layers.size()) {
    throw ShapeError("apply_update: one delta per layer required");
  }
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    const Matrix& d = deltas[l];
    const Matrix& w = net.layers[l].weight;
    if (d.rows() != w.rows() || d.cols() != w.cols()) {
      throw ShapeError("apply_update: delta shape does not match layer weights");
    }
    if (!d.all_finite()) {
      std::ostringstream os;
      os << "apply_update: non-finite delta at layer " << l << "; step aborted";
      throw NumericError(os.str());
    }
  }
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    Matrix& w = net.layers[l].weight;
    const Matrix& d = deltas[l];
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] -= d.data()[i];
  }
}

}  // namespace ngdlab
