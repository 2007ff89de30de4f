#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ngdlab/dataset.hpp"
#include "ngdlab/network.hpp"
#include "ngdlab/optim.hpp"

namespace ngdlab {

struct RunConfig {
  std::string run_id = "run";
  std::vector<std::size_t> hidden;
  Activation activation = Activation::kTanh;
  OptimConfig optim;
  std::size_t batch_size = 128;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  // Wall-clock timing makes logs nondeterministic, so it is opt-in.
  bool record_wall_time = false;
};

/// One optimizer step as logged. `loss` is the mean loss of the batch
/// before the update. status is "ok", "diverged", or "error:<reason>".
struct TrainRecord {
  std::string run_id;
  std::string method;
  std::size_t epoch = 0;
  std::size_t step = 0;  // within the epoch
  double lr = 0.0;
  std::size_t batch_size = 0;
  double loss = 0.0;
  std::int64_t step_time_ns = 0;
  std::size_t optimizer_bytes = 0;
  std::string status = "ok";
};

struct TrainResult {
  std::vector<TrainRecord> records;
  std::vector<double> epoch_mean_losses;  // sample-weighted batch means
  bool diverged = false;
  bool errored = false;
  NetworkModel final_model;

  bool failed() const { return diverged || errored; }
  double final_loss() const;
};

/// Mini-batch training: a seeded in-place shuffle each epoch, batches taken
/// in order with the short remainder kept, loss logged before each update.
/// A non-finite loss or one exceeding 1e6 times the first batch loss stops
/// the run with a "diverged" record; optimizer failures stop it with an
/// "error:" record. Neither is thrown.
TrainResult train_run(const RunConfig& cfg, const Dataset& data);

struct GridSearchResult {
  double best_alpha = 0.0;
  std::vector<double> alphas;
  std::vector<double> final_losses;  // +inf for diverged or errored runs
  std::vector<TrainResult> results;
};

/// Trains once per candidate with identical seeds and picks the lowest
/// final-epoch mean loss, breaking exact ties toward the smaller alpha.
/// Throws DataError listing the outcomes if every candidate fails.
GridSearchResult grid_search_lr(const RunConfig& cfg, const Dataset& data,
                                const std::vector<double>& alphas);

const std::vector<double>& default_alpha_grid();

struct SweepEntry {
  std::size_t batch_size = 0;
  TrainResult result;
};

/// One train_run per batch size with the same seed and step-size settings.
std::vector<SweepEntry> batch_sweep(const RunConfig& cfg, const Dataset& data,
                                    const std::vector<std::size_t>& sizes);

void print_sweep_table(const std::vector<SweepEntry>& entries, std::ostream& out);

/// One measured point of the scaling benchmark. status is "ok" or
/// "infeasible" (the dense-Fisher path refusing p above its cap).
struct BenchRecord {
  std::string method;
  std::size_t depth = 0;
  std::size_t width = 0;
  std::size_t params = 0;
  std::size_t batch_size = 0;
  std::int64_t median_step_ns = 0;
  std::size_t optimizer_bytes = 0;
  std::string status = "ok";
};

struct BenchConfig {
  std::size_t input_dim = 10;
  std::size_t width = 20;
  std::vector<std::size_t> depths = {1, 2, 3, 4};
  std::vector<Method> methods = {Method::kSgd, Method::kExactNgd,
                                 Method::kBlockNgd, Method::kTengrad};
  std::size_t batch_size = 64;
  std::size_t warmup_steps = 5;
  std::size_t timed_steps = 21;
  OptimConfig optim;
  std::uint64_t seed = 0;
  bool record_wall_time = true;
};

/// Times full optimizer steps (forward, backward, update) on synthetic
/// batches for width-`width` nets of each depth, reporting the median of
/// `timed_steps` measurements after `warmup_steps` discarded ones, plus the
/// optimizer working-set size in bytes.
std::vector<BenchRecord> scaling_bench(const BenchConfig& cfg);

/// Writes records with the pinned header
/// run_id,method,epoch,step,lr,batch_size,loss,log_loss,step_time_ns,optimizer_bytes,status
/// where log_loss is ln(loss) for positive losses and "-inf" otherwise.
void emit_logs(const std::vector<TrainRecord>& records, const std::string& path);

void emit_bench_csv(const std::vector<BenchRecord>& records, const std::string& path);

/// Mean per-sample loss of the best linear predictor on a regression
/// dataset, from the normal equations on bias-augmented features.
double least_squares_loss(const Dataset& data);

}  // namespace ngdlab
