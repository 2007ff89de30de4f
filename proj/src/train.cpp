#include "ngdlab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ngdlab/errors.hpp"
#include "ngdlab/format.hpp"

namespace ngdlab {

namespace {

Head head_for(Task task) {
  return task == Task::kRegression ? Head::kGaussianUnitVariance
                                   : Head::kCategoricalSoftmax;
}

// The shuffle decides batch membership; inside a batch the samples are laid
// out in index order so that sums over the batch do not depend on the
// permutation (a full-size batch then reproduces the dataset exactly).
void gather_batch(const Dataset& data, const std::vector<std::size_t>& order,
                  std::size_t start, std::size_t count, Matrix* x, Matrix* y) {
  std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(start + count));
  std::sort(members.begin(), members.end());
  *x = Matrix(data.feature_dim(), count);
  *y = Matrix(data.target_dim(), count);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t src = members[c];
    for (std::size_t r = 0; r < data.feature_dim(); ++r) {
      (*x)(r, c) = data.features(r, src);
    }
    for (std::size_t r = 0; r < data.target_dim(); ++r) {
      (*y)(r, c) = data.targets(r, src);
    }
  }
}

// In-place Fisher-Yates so the batch order is reproducible from the seed
// alone, independent of the standard library's shuffle implementation.
void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& gen) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = gen() % i;
    std::swap(order[i - 1], order[j]);
  }
}

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point t0,
                        std::chrono::steady_clock::time_point t1) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
}

std::string sanitize_field(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

}  // namespace

double TrainResult::final_loss() const {
  if (epoch_mean_losses.empty()) return std::numeric_limits<double>::quiet_NaN();
  return epoch_mean_losses.back();
}

TrainResult train_run(const RunConfig& cfg, const Dataset& data) {
  const std::size_t n = data.num_samples();
  if (cfg.batch_size < 1 || cfg.batch_size > n) {
    throw ConfigError("batch size must lie in [1, n]");
  }
  if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");
  validate_config(cfg.optim);

  const Head head = head_for(data.task);
  TrainResult result;
  result.final_model = make_network(data.feature_dim(), cfg.hidden,
                                    data.target_dim(), cfg.activation, head,
                                    cfg.seed);
  NetworkModel& net = result.final_model;
  const std::string method_name = to_string(cfg.optim.method);

  std::mt19937_64 shuffle_gen(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double first_loss = 0.0;
  bool first_loss_set = false;
  bool stop = false;

  for (std::size_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    shuffle_indices(order, shuffle_gen);
    OptimConfig step_cfg = cfg.optim;
    step_cfg.alpha = lr_schedule(cfg.optim, epoch);

    double epoch_loss_sum = 0.0;
    std::size_t epoch_samples = 0;

    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - start);
      Matrix xb, yb;
      gather_batch(data, order, start, count, &xb, &yb);

      TrainRecord rec;
      rec.run_id = cfg.run_id;
      rec.method = method_name;
      rec.epoch = epoch;
      rec.step = start / cfg.batch_size;
      rec.lr = step_cfg.alpha;
      rec.batch_size = count;
      rec.loss = std::numeric_limits<double>::quiet_NaN();

      try {
        const auto t0 = std::chrono::steady_clock::now();
        BatchCache cache;
        const Matrix pred = forward(net, xb, &cache);
        rec.loss = loss_eval(pred, yb, head);
        if (!first_loss_set) {
          first_loss = rec.loss;
          first_loss_set = true;
        }
        if (!std::isfinite(rec.loss) || rec.loss > 1e6 * first_loss) {
          rec.status = "diverged";
          result.diverged = true;
          stop = true;
        } else {
          const std::vector<Matrix> grads = backward(net, cache, yb);
          const StepStats stats = optimizer_step(net, grads, &cache, step_cfg);
          const auto t1 = std::chrono::steady_clock::now();
          if (cfg.record_wall_time) rec.step_time_ns = elapsed_ns(t0, t1);
          rec.optimizer_bytes = 8 * stats.working_set_scalars;
          epoch_loss_sum += rec.loss * static_cast<double>(count);
          epoch_samples += count;
        }
      } catch (const Error& err) {
        rec.status = std::string("error:") + err.what();
        result.errored = true;
        stop = true;
      }
      result.records.push_back(rec);
      if (stop) break;
    }

    if (epoch_samples > 0) {
      result.epoch_mean_losses.push_back(epoch_loss_sum /
                                         static_cast<double>(epoch_samples));
    }
  }
  return result;
}

const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3,
                                           1e-2, 3e-2, 1e-1};
  return grid;
}

GridSearchResult grid_search_lr(const RunConfig& cfg, const Dataset& data,
                                const std::vector<double>& alphas) {
  if (alphas.empty()) throw ConfigError("grid search needs at least one alpha");

  GridSearchResult out;
  out.alphas = alphas;
  bool any_ok = false;
  std::size_t best = 0;

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    RunConfig run_cfg = cfg;
    run_cfg.optim.alpha = alphas[i];
    out.results.push_back(train_run(run_cfg, data));
    const TrainResult& res = out.results.back();
    const double final = res.failed()
                             ? std::numeric_limits<double>::infinity()
                             : res.final_loss();
    out.final_losses.push_back(final);
    if (!res.failed()) {
      const bool better =
          !any_ok || final < out.final_losses[best] ||
          (final == out.final_losses[best] && alphas[i] < alphas[best]);
      if (better) best = i;
      any_ok = true;
    }
  }

  if (!any_ok) {
    std::ostringstream msg;
    msg << "every learning rate failed:";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      msg << " alpha=" << alphas[i] << " -> "
          << (out.results[i].diverged ? "diverged" : "error") << ";";
    }
    throw DataError(msg.str());
  }
  out.best_alpha = alphas[best];
  return out;
}

std::vector<SweepEntry> batch_sweep(const RunConfig& cfg, const Dataset& data,
                                    const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw ConfigError("batch sweep needs at least one size");
  std::vector<SweepEntry> entries;
  for (std::size_t size : sizes) {
    RunConfig run_cfg = cfg;
    run_cfg.batch_size = size;
    entries.push_back({size, train_run(run_cfg, data)});
  }
  return entries;
}

void print_sweep_table(const std::vector<SweepEntry>& entries, std::ostream& out) {
  const std::ios::fmtflags saved = out.flags();
  out << std::left << std::setw(12) << "batch_size" << std::setw(24)
      << "final_loss" << "status" << '\n';
  for (const SweepEntry& e : entries) {
    std::string status = "ok";
    if (e.result.diverged) status = "diverged";
    if (e.result.errored) status = "error";
    out << std::left << std::setw(12) << e.batch_size << std::setw(24)
        << std::setprecision(10) << e.result.final_loss() << status << '\n';
  }
  out.flags(saved);
}

std::vector<BenchRecord> scaling_bench(const BenchConfig& cfg) {
  if (cfg.depths.empty() || cfg.methods.empty()) {
    throw ConfigError("scaling bench needs depths and methods");
  }
  if (cfg.timed_steps < 1) throw ConfigError("scaling bench needs timed steps");

  std::mt19937_64 gen(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(cfg.input_dim, cfg.batch_size);
  Matrix y(1, cfg.batch_size);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = normal(gen);
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = normal(gen);

  std::vector<BenchRecord> records;
  for (std::size_t depth : cfg.depths) {
    const std::vector<std::size_t> hidden(depth, cfg.width);
    for (Method method : cfg.methods) {
      NetworkModel net = make_network(cfg.input_dim, hidden, 1,
                                      Activation::kTanh,
                                      Head::kGaussianUnitVariance,
                                      cfg.seed + depth);
      OptimConfig oc = cfg.optim;
      oc.method = method;

      BenchRecord rec;
      rec.method = to_string(method);
      rec.depth = depth;
      rec.width = cfg.width;
      rec.params = param_count(net);
      rec.batch_size = cfg.batch_size;

      std::vector<std::int64_t> samples;
      samples.reserve(cfg.timed_steps);
      try {
        for (std::size_t s = 0; s < cfg.warmup_steps + cfg.timed_steps; ++s) {
          const auto t0 = std::chrono::steady_clock::now();
          BatchCache cache;
          forward(net, x, &cache);
          const std::vector<Matrix> grads = backward(net, cache, y);
          const StepStats stats = optimizer_step(net, grads, &cache, oc);
          const auto t1 = std::chrono::steady_clock::now();
          if (s >= cfg.warmup_steps) {
            samples.push_back(cfg.record_wall_time ? elapsed_ns(t0, t1) : 0);
            rec.optimizer_bytes = 8 * stats.working_set_scalars;
          }
        }
        std::sort(samples.begin(), samples.end());
        rec.median_step_ns = samples[samples.size() / 2];
      } catch (const CapacityError&) {
        rec.status = "infeasible";
        rec.median_step_ns = 0;
        rec.optimizer_bytes = 0;
      }
      records.push_back(rec);
    }
  }
  return records;
}

void emit_logs(const std::vector<TrainRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out.good()) throw IoError("cannot open log file for writing: " + path);
  out << "run_id,method,epoch,step,lr,batch_size,loss,log_loss,step_time_ns,"
         "optimizer_bytes,status\n";
  for (const TrainRecord& r : records) {
    const std::string log_loss =
        r.loss > 0.0 ? format_g17(std::log(r.loss)) : std::string("-inf");
    out << sanitize_field(r.run_id) << ',' << r.method << ',' << r.epoch << ','
        << r.step << ',' << format_g17(r.lr) << ',' << r.batch_size << ','
        << format_g17(r.loss) << ',' << log_loss << ',' << r.step_time_ns << ','
        << r.optimizer_bytes << ',' << sanitize_field(r.status) << '\n';
  }
  if (!out.good()) throw IoError("failed while writing log file: " + path);
}

void emit_bench_csv(const std::vector<BenchRecord>& records,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out.good()) throw IoError("cannot open bench file for writing: " + path);
  out << "method,depth,width,params,batch_size,median_step_ns,optimizer_bytes,"
         "status\n";
  for (const BenchRecord& r : records) {
    out << r.method << ',' << r.depth << ',' << r.width << ',' << r.params
        << ',' << r.batch_size << ',' << r.median_step_ns << ','
        << r.optimizer_bytes << ',' << r.status << '\n';
  }
  if (!out.good()) throw IoError("failed while writing bench file: " + path);
}

double least_squares_loss(const Dataset& data) {
  if (data.task != Task::kRegression) {
    throw DataError("least squares baseline needs a regression dataset");
  }
  const std::size_t d = data.feature_dim();
  const std::size_t n = data.num_samples();
  Matrix xa(d + 1, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < d; ++r) xa(r, c) = data.features(r, c);
    xa(d, c) = 1.0;
  }
  const Matrix w = cholesky_solve(matmul(xa, transpose(xa)),
                                  matmul(xa, transpose(data.targets)));
  const Matrix pred = matmul(transpose(w), xa);
  double loss = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < data.target_dim(); ++r) {
      const double diff = pred(r, c) - data.targets(r, c);
      loss += 0.5 * diff * diff;
    }
  }
  return loss / static_cast<double>(n);
}

}  // namespace ngdlab
