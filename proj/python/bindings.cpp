#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ngdlab/dataset.hpp"
#include "ngdlab/errors.hpp"
#include "ngdlab/fisher.hpp"
#include "ngdlab/matrix.hpp"
#include "ngdlab/network.hpp"
#include "ngdlab/optim.hpp"
#include "ngdlab/oracle.hpp"
#include "ngdlab/train.hpp"

namespace py = pybind11;
using namespace ngdlab;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays follow the core convention everywhere: one column per sample.
Matrix to_matrix(const DoubleArray& a) {
  const py::buffer_info info = a.request();
  if (info.ndim == 1) {
    Matrix m(static_cast<std::size_t>(info.shape[0]), 1);
    const double* src = static_cast<const double*>(info.ptr);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, 0) = src[r];
    return m;
  }
  if (info.ndim != 2) {
    throw ShapeError("expected a 1-d or 2-d float array");
  }
  Matrix m(static_cast<std::size_t>(info.shape[0]),
           static_cast<std::size_t>(info.shape[1]));
  const double* src = static_cast<const double*>(info.ptr);
  for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = src[i];
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  double* dst = static_cast<double*>(out.request().ptr);
  for (std::size_t i = 0; i < m.data().size(); ++i) dst[i] = m.data()[i];
  return out;
}

OptimConfig make_optim(const std::string& method, double alpha, double beta,
                       double lr_decay, double weight_decay,
                       std::size_t dense_cap) {
  OptimConfig cfg;
  cfg.method = method_from_string(method);
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.lr_decay = lr_decay;
  cfg.weight_decay = weight_decay;
  cfg.dense_cap = dense_cap;
  return cfg;
}

Dataset dataset_from_arrays(const DoubleArray& features, const DoubleArray& targets,
                            const std::string& task) {
  Dataset ds;
  ds.features = to_matrix(features);
  ds.targets = to_matrix(targets);
  ds.task = task_from_string(task);
  if (ds.features.cols() != ds.targets.cols()) {
    throw ShapeError("features and targets must have one column per sample");
  }
  return ds;
}

py::dict record_to_dict(const TrainRecord& rec) {
  py::dict d;
  d["run_id"] = rec.run_id;
  d["method"] = rec.method;
  d["epoch"] = rec.epoch;
  d["step"] = rec.step;
  d["lr"] = rec.lr;
  d["batch_size"] = rec.batch_size;
  d["loss"] = rec.loss;
  d["step_time_ns"] = rec.step_time_ns;
  d["optimizer_bytes"] = rec.optimizer_bytes;
  d["status"] = rec.status;
  return d;
}

py::dict result_to_dict(const TrainResult& res) {
  py::dict d;
  d["epoch_mean_losses"] = res.epoch_mean_losses;
  d["final_loss"] = res.final_loss();
  d["diverged"] = res.diverged;
  d["errored"] = res.errored;
  py::list records;
  for (const TrainRecord& rec : res.records) records.append(record_to_dict(rec));
  d["records"] = records;
  return d;
}

RunConfig make_run_config(const std::vector<std::size_t>& hidden,
                          const std::string& activation, const std::string& method,
                          double alpha, double beta, double lr_decay,
                          double weight_decay, std::size_t dense_cap,
                          std::size_t batch_size, std::size_t epochs,
                          std::uint64_t seed, const std::string& run_id) {
  RunConfig cfg;
  cfg.run_id = run_id;
  cfg.hidden = hidden;
  cfg.activation = activation_from_string(activation);
  cfg.optim = make_optim(method, alpha, beta, lr_decay, weight_decay, dense_cap);
  cfg.batch_size = batch_size;
  cfg.epochs = epochs;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dense natural-gradient optimization lab (C++ core bindings)";

  py::register_exception<Error>(m, "NgdlabError");

  py::class_<NetworkModel>(m, "Network")
      .def(py::init([](std::size_t input_dim, const std::vector<std::size_t>& hidden,
                       std::size_t output_dim, const std::string& activation,
                       const std::string& head, std::uint64_t seed) {
             return make_network(input_dim, hidden, output_dim,
                                 activation_from_string(activation),
                                 head_from_string(head), seed);
           }),
           py::arg("input_dim"), py::arg("hidden") = std::vector<std::size_t>{},
           py::arg("output_dim") = 1, py::arg("activation") = "tanh",
           py::arg("head") = "gaussian_unit_variance", py::arg("seed") = 0)
      .def_property_readonly("input_dim", &NetworkModel::input_dim)
      .def_property_readonly("output_dim", &NetworkModel::output_dim)
      .def_property_readonly("param_count",
                             [](const NetworkModel& net) { return param_count(net); })
      .def_property(
          "params",
          [](const NetworkModel& net) { return to_array(flatten_params(net)); },
          [](NetworkModel& net, const DoubleArray& flat) {
            set_params(net, to_matrix(flat));
          },
          "Flattened parameter vector (row-major per layer, bias row last).")
      .def("forward",
           [](const NetworkModel& net, const DoubleArray& x) {
             return to_array(forward(net, to_matrix(x)));
           },
           py::arg("x"), "Predictions for a column-per-sample batch.")
      .def("loss",
           [](const NetworkModel& net, const DoubleArray& x, const DoubleArray& y) {
             return loss_eval(forward(net, to_matrix(x)), to_matrix(y), net.head);
           },
           py::arg("x"), py::arg("y"), "Mean per-sample loss on the batch.")
      .def("gradients",
           [](const NetworkModel& net, const DoubleArray& x, const DoubleArray& y) {
             BatchCache cache;
             NetworkModel copy = net;
             forward(copy, to_matrix(x), &cache);
             const std::vector<Matrix> grads = backward(copy, cache, to_matrix(y));
             py::list out;
             for (const Matrix& g : grads) out.append(to_array(g));
             return out;
           },
           py::arg("x"), py::arg("y"),
           "Batch-mean weight gradients, one (d_in+1) x d_out array per layer.")
      .def("step",
           [](NetworkModel& net, const DoubleArray& x, const DoubleArray& y,
              const std::string& method, double alpha, double beta,
              double weight_decay, std::size_t dense_cap) {
             const OptimConfig cfg =
                 make_optim(method, alpha, beta, 1.0, weight_decay, dense_cap);
             BatchCache cache;
             const Matrix pred = forward(net, to_matrix(x), &cache);
             const Matrix targets = to_matrix(y);
             const double loss = loss_eval(pred, targets, net.head);
             const std::vector<Matrix> grads = backward(net, cache, targets);
             const StepStats stats = optimizer_step(net, grads, &cache, cfg);
             py::dict out;
             out["loss"] = loss;
             out["optimizer_bytes"] = 8 * stats.working_set_scalars;
             return out;
           },
           py::arg("x"), py::arg("y"), py::arg("method") = "sgd",
           py::arg("alpha") = 1e-2, py::arg("beta") = 1e-2,
           py::arg("weight_decay") = 0.0, py::arg("dense_cap") = kDefaultDenseCap,
           "One optimizer step on the batch; returns the pre-step loss.");

  m.def("empirical_fim",
        [](const NetworkModel& net, const DoubleArray& x, const DoubleArray& y,
           std::size_t dense_cap) {
          BatchCache cache;
          NetworkModel copy = net;
          forward(copy, to_matrix(x), &cache);
          backward(copy, cache, to_matrix(y));
          return to_array(full_empirical_fim(cache, dense_cap));
        },
        py::arg("net"), py::arg("x"), py::arg("y"),
        py::arg("dense_cap") = kDefaultDenseCap,
        "Full empirical Fisher (1/m) J'J for the batch.");

  m.def("layer_gram",
        [](const NetworkModel& net, const DoubleArray& x, const DoubleArray& y,
           std::size_t layer) {
          BatchCache cache;
          NetworkModel copy = net;
          forward(copy, to_matrix(x), &cache);
          backward(copy, cache, to_matrix(y));
          if (layer >= cache.layers.size()) {
            throw ShapeError("layer index out of range");
          }
          return to_array(gram_jacobian(cache.layers[layer].inputs,
                                        cache.layers[layer].preact_grads));
        },
        py::arg("net"), py::arg("x"), py::arg("y"), py::arg("layer") = 0,
        "Per-layer Gram J_l J_l' computed without forming J_l.");

  m.def("score",
        [](const NetworkModel& net, const DoubleArray& x, const DoubleArray& y) {
          return to_array(score(net, to_matrix(x), to_matrix(y)));
        },
        py::arg("net"), py::arg("x"), py::arg("y"),
        "Log-likelihood gradient for a single sample, flattened.");

  m.def("kl_divergence",
        [](const NetworkModel& a, const NetworkModel& b, const DoubleArray& x) {
          return kl_divergence(a, b, to_matrix(x));
        },
        py::arg("net_a"), py::arg("net_b"), py::arg("x"),
        "Mean predictive KL divergence over the batch columns.");

  m.def("make_synthetic",
        [](const std::string& kind, std::size_t n, std::size_t d,
           std::uint64_t seed, double noise_scale) {
          const Dataset ds =
              make_synthetic(synthetic_from_string(kind), n, d, seed, noise_scale);
          return py::make_tuple(to_array(ds.features), to_array(ds.targets));
        },
        py::arg("kind") = "linreg_gaussian", py::arg("n") = 1024, py::arg("d") = 8,
        py::arg("seed") = 0, py::arg("noise_scale") = 0.1,
        "Generated (features, targets) pair, one column per sample.");

  m.def("least_squares_loss",
        [](const DoubleArray& features, const DoubleArray& targets) {
          return least_squares_loss(
              dataset_from_arrays(features, targets, "regression"));
        },
        py::arg("features"), py::arg("targets"),
        "Loss of the exact least-squares solution on bias-augmented features.");

  m.def("train",
        [](const DoubleArray& features, const DoubleArray& targets,
           const std::string& task, const std::vector<std::size_t>& hidden,
           const std::string& activation, const std::string& method, double alpha,
           double beta, double lr_decay, double weight_decay, std::size_t dense_cap,
           std::size_t batch_size, std::size_t epochs, std::uint64_t seed,
           const std::string& run_id) {
          const Dataset ds = dataset_from_arrays(features, targets, task);
          const RunConfig cfg =
              make_run_config(hidden, activation, method, alpha, beta, lr_decay,
                              weight_decay, dense_cap, batch_size, epochs, seed,
                              run_id);
          return result_to_dict(train_run(cfg, ds));
        },
        py::arg("features"), py::arg("targets"), py::arg("task") = "regression",
        py::arg("hidden") = std::vector<std::size_t>{},
        py::arg("activation") = "tanh", py::arg("method") = "sgd",
        py::arg("alpha") = 1e-2, py::arg("beta") = 1e-2, py::arg("lr_decay") = 1.0,
        py::arg("weight_decay") = 0.0, py::arg("dense_cap") = kDefaultDenseCap,
        py::arg("batch_size") = 128, py::arg("epochs") = 10, py::arg("seed") = 0,
        py::arg("run_id") = std::string("run"),
        "Mini-batch training run; returns records and epoch mean losses.");

  m.def("grid_search",
        [](const DoubleArray& features, const DoubleArray& targets,
           const std::vector<double>& alphas, const std::string& task,
           const std::vector<std::size_t>& hidden, const std::string& activation,
           const std::string& method, double beta, double lr_decay,
           double weight_decay, std::size_t dense_cap, std::size_t batch_size,
           std::size_t epochs, std::uint64_t seed, const std::string& run_id) {
          const Dataset ds = dataset_from_arrays(features, targets, task);
          RunConfig cfg =
              make_run_config(hidden, activation, method, 1e-2, beta, lr_decay,
                              weight_decay, dense_cap, batch_size, epochs, seed,
                              run_id);
          const std::vector<double> grid =
              alphas.empty() ? default_alpha_grid() : alphas;
          const GridSearchResult gs = grid_search_lr(cfg, ds, grid);
          py::dict out;
          out["best_alpha"] = gs.best_alpha;
          out["alphas"] = gs.alphas;
          out["final_losses"] = gs.final_losses;
          return out;
        },
        py::arg("features"), py::arg("targets"),
        py::arg("alphas") = std::vector<double>{}, py::arg("task") = "regression",
        py::arg("hidden") = std::vector<std::size_t>{},
        py::arg("activation") = "tanh", py::arg("method") = "sgd",
        py::arg("beta") = 1e-2, py::arg("lr_decay") = 1.0,
        py::arg("weight_decay") = 0.0, py::arg("dense_cap") = kDefaultDenseCap,
        py::arg("batch_size") = 128, py::arg("epochs") = 10, py::arg("seed") = 0,
        py::arg("run_id") = std::string("grid"),
        "Trains once per learning rate; lowest final loss wins, ties to the "
        "smaller rate.");

  m.def("default_alpha_grid", &default_alpha_grid,
        "The built-in learning-rate grid.");

  m.def("woodbury_check",
        [](double beta, std::size_t trials, std::uint64_t seed) {
          const WoodburyReport rep = woodbury_identity_check(beta, trials, seed);
          py::dict out;
          out["max_rel_error"] = rep.max_rel_error;
          out["tolerance"] = rep.tolerance;
          out["trials"] = rep.trials;
          out["passed"] = rep.pass;
          return out;
        },
        py::arg("beta") = 1e-2, py::arg("trials") = 50, py::arg("seed") = 0,
        "Random-instance check of the low-rank inverse identity.");

  m.def("verify",
        []() {
          py::list out;
          for (const CheckResult& r : run_verify_battery()) {
            py::dict d;
            d["check_name"] = r.check_name;
            d["metric"] = r.metric;
            d["value"] = r.value;
            d["tolerance"] = r.tolerance;
            d["passed"] = r.pass;
            out.append(d);
          }
          return out;
        },
        "Runs the full deterministic self-check battery.");

  m.attr("__version__") = "0.1.0";
}
