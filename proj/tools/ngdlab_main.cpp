#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ngdlab/dataset.hpp"
#include "ngdlab/errors.hpp"
#include "ngdlab/fisher.hpp"
#include "ngdlab/oracle.hpp"
#include "ngdlab/train.hpp"

namespace {

using namespace ngdlab;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(text)) {
    const long long v = std::stoll(item);
    if (v < 0) throw ConfigError("negative size in list: " + text);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(std::stod(item));
  return out;
}

struct DataOpts {
  std::string dataset_path;
  std::string target_column;
  std::string task = "regression";
  std::string synthetic;
  std::size_t n = 1024;
  std::size_t d = 8;
  double noise_scale = 0.1;
  bool standardize_features = false;
};

struct TrainOpts {
  std::string hidden;
  std::string activation = "tanh";
  std::string method = "sgd";
  double alpha = 1e-2;
  double beta = 1e-2;
  double lr_decay = 1.0;
  double weight_decay = 0.0;
  std::size_t dense_cap = kDefaultDenseCap;
  std::size_t batch_size = 128;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string run_id = "run";
  std::string timing = "off";
};

void add_data_flags(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--dataset", o.dataset_path,
                  "CSV file with a header row (use with --target and --task)");
  cmd->add_option("--target", o.target_column, "target column name");
  cmd->add_option("--task", o.task, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  cmd->add_option("--synthetic", o.synthetic, "built-in generated dataset")
      ->check(CLI::IsMember({"linreg_gaussian", "blobs_classification"}));
  cmd->add_option("--n", o.n, "synthetic sample count");
  cmd->add_option("--d", o.d, "synthetic feature dimension");
  cmd->add_option("--noise-scale", o.noise_scale, "synthetic target noise");
  cmd->add_flag("--standardize", o.standardize_features,
                "z-score features (and regression targets) before training");
}

void add_train_flags(CLI::App* cmd, TrainOpts& o, bool with_alpha = true) {
  cmd->add_option("--hidden", o.hidden, "comma-separated hidden layer sizes");
  cmd->add_option("--activation", o.activation, "tanh, relu, or identity")
      ->check(CLI::IsMember({"tanh", "relu", "identity"}));
  cmd->add_option("--method", o.method, "optimizer")
      ->check(CLI::IsMember({"sgd", "exact-ngd", "block-ngd", "tengrad"}));
  if (with_alpha) cmd->add_option("--alpha", o.alpha, "learning rate");
  cmd->add_option("--beta", o.beta, "damping added to the Fisher block");
  cmd->add_option("--lr-decay", o.lr_decay, "per-epoch learning rate multiplier");
  cmd->add_option("--weight-decay", o.weight_decay, "L2 coefficient");
  cmd->add_option("--dense-cap", o.dense_cap,
                  "largest parameter count the dense Fisher path accepts");
  cmd->add_option("--batch-size", o.batch_size, "mini-batch size");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--seed", o.seed, "RNG seed (weights, shuffling, synthetic data)");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--run-id", o.run_id, "identifier written to the log rows");
  cmd->add_option("--timing", o.timing,
                  "wall enables per-step timing; off keeps logs deterministic")
      ->check(CLI::IsMember({"wall", "off"}));
}

Dataset resolve_dataset(const DataOpts& o, std::uint64_t seed) {
  const bool have_file = !o.dataset_path.empty();
  const bool have_synth = !o.synthetic.empty();
  if (have_file == have_synth) {
    throw ConfigError("provide exactly one of --dataset or --synthetic");
  }
  Dataset ds;
  if (have_file) {
    if (o.target_column.empty()) {
      throw ConfigError("--dataset requires --target");
    }
    ds = load_csv_dataset(o.dataset_path, o.target_column,
                          task_from_string(o.task));
    if (ds.dropped_rows > 0) {
      std::cout << "dropped " << ds.dropped_rows << " unparseable rows\n";
    }
  } else {
    ds = make_synthetic(synthetic_from_string(o.synthetic), o.n, o.d, seed,
                        o.noise_scale);
  }
  if (o.standardize_features) ds = standardize(ds);
  return ds;
}

RunConfig make_run_config(const TrainOpts& o) {
  RunConfig cfg;
  cfg.run_id = o.run_id;
  cfg.hidden = parse_sizes(o.hidden);
  cfg.activation = activation_from_string(o.activation);
  cfg.optim.method = method_from_string(o.method);
  cfg.optim.alpha = o.alpha;
  cfg.optim.beta = o.beta;
  cfg.optim.lr_decay = o.lr_decay;
  cfg.optim.weight_decay = o.weight_decay;
  cfg.optim.dense_cap = o.dense_cap;
  cfg.batch_size = o.batch_size;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.record_wall_time = o.timing == "wall";
  return cfg;
}

int run_train(const DataOpts& data_opts, const TrainOpts& opts) {
  const Dataset ds = resolve_dataset(data_opts, opts.seed);
  const RunConfig cfg = make_run_config(opts);
  const TrainResult res = train_run(cfg, ds);
  if (!opts.out.empty()) emit_logs(res.records, opts.out);

  std::cout << "method " << to_string(cfg.optim.method) << ", " << res.records.size()
            << " steps";
  if (res.diverged) {
    std::cout << ", diverged\n";
  } else if (res.errored) {
    std::cout << ", stopped: " << res.records.back().status << "\n";
  } else {
    std::cout << ", final epoch mean loss " << res.final_loss() << "\n";
  }
  if (ds.task == Task::kRegression && !res.failed()) {
    std::cout << "least squares baseline " << least_squares_loss(ds) << "\n";
  }
  return 0;
}

int run_grid_search(const DataOpts& data_opts, const TrainOpts& opts,
                    const std::string& alphas_text) {
  const Dataset ds = resolve_dataset(data_opts, opts.seed);
  const RunConfig cfg = make_run_config(opts);
  const std::vector<double> alphas = alphas_text.empty()
                                         ? default_alpha_grid()
                                         : parse_doubles(alphas_text);
  const GridSearchResult grid = grid_search_lr(cfg, ds, alphas);

  std::vector<TrainRecord> all_records;
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    std::cout << "alpha " << grid.alphas[i] << " -> ";
    if (grid.results[i].failed()) {
      std::cout << (grid.results[i].diverged ? "diverged" : "error") << "\n";
    } else {
      std::cout << "final loss " << grid.final_losses[i] << "\n";
    }
    for (TrainRecord rec : grid.results[i].records) {
      rec.run_id = cfg.run_id + "-g" + std::to_string(i);
      all_records.push_back(std::move(rec));
    }
  }
  std::cout << "best alpha " << grid.best_alpha << "\n";
  if (!opts.out.empty()) emit_logs(all_records, opts.out);
  return 0;
}

int run_batch_sweep(const DataOpts& data_opts, const TrainOpts& opts,
                    const std::string& sizes_text) {
  const Dataset ds = resolve_dataset(data_opts, opts.seed);
  const RunConfig cfg = make_run_config(opts);
  if (sizes_text.empty()) throw ConfigError("--sizes is required");
  const std::vector<SweepEntry> entries =
      batch_sweep(cfg, ds, parse_sizes(sizes_text));
  print_sweep_table(entries, std::cout);

  std::vector<TrainRecord> all_records;
  for (const SweepEntry& entry : entries) {
    for (TrainRecord rec : entry.result.records) {
      rec.run_id = cfg.run_id + "-m" + std::to_string(entry.batch_size);
      all_records.push_back(std::move(rec));
    }
  }
  if (!opts.out.empty()) emit_logs(all_records, opts.out);
  return 0;
}

int run_bench(const TrainOpts& opts, const std::string& depths_text,
              std::size_t width, std::size_t input_dim,
              const std::string& methods_text) {
  BenchConfig cfg;
  cfg.input_dim = input_dim;
  cfg.width = width;
  if (!depths_text.empty()) cfg.depths = parse_sizes(depths_text);
  if (!methods_text.empty()) {
    cfg.methods.clear();
    for (const std::string& name : split_list(methods_text)) {
      cfg.methods.push_back(method_from_string(name));
    }
  }
  cfg.batch_size = opts.batch_size;
  cfg.optim.alpha = opts.alpha;
  cfg.optim.beta = opts.beta;
  cfg.optim.dense_cap = opts.dense_cap;
  cfg.seed = opts.seed;
  cfg.record_wall_time = opts.timing == "wall";

  const std::vector<BenchRecord> records = scaling_bench(cfg);
  for (const BenchRecord& r : records) {
    std::cout << r.method << " depth " << r.depth << " params " << r.params;
    if (r.status == "ok") {
      std::cout << ": median " << r.median_step_ns << " ns, " << r.optimizer_bytes
                << " bytes\n";
    } else {
      std::cout << ": " << r.status << "\n";
    }
  }
  if (!opts.out.empty()) emit_bench_csv(records, opts.out);
  return 0;
}

int run_verify(const std::string& out) {
  const std::vector<CheckResult> results = run_verify_battery();
  print_check_table(results, std::cout);
  if (!out.empty()) emit_check_csv(results, out);
  return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-gradient optimization lab"};
  app.require_subcommand(1);

  DataOpts data_opts;
  TrainOpts opts;
  std::string alphas_text;
  std::string sizes_text;
  std::string depths_text = "1,2,3,4";
  std::string methods_text;
  std::string verify_out;
  std::size_t width = 20;
  std::size_t input_dim = 10;

  CLI::App* train_cmd = app.add_subcommand("train", "run one training job");
  add_data_flags(train_cmd, data_opts);
  add_train_flags(train_cmd, opts);

  CLI::App* grid_cmd =
      app.add_subcommand("grid-search", "train once per learning rate");
  add_data_flags(grid_cmd, data_opts);
  add_train_flags(grid_cmd, opts, false);
  grid_cmd->add_option("--alphas", alphas_text,
                       "comma-separated candidates (default: built-in grid)");

  CLI::App* sweep_cmd =
      app.add_subcommand("batch-sweep", "train once per batch size");
  add_data_flags(sweep_cmd, data_opts);
  add_train_flags(sweep_cmd, opts);
  sweep_cmd->add_option("--sizes", sizes_text, "comma-separated batch sizes")
      ->required();

  CLI::App* bench_cmd = app.add_subcommand(
      "bench-scaling", "time optimizer steps across model depths");
  add_train_flags(bench_cmd, opts);
  bench_cmd->add_option("--depths", depths_text, "hidden layer counts to sweep");
  bench_cmd->add_option("--width", width, "hidden layer width");
  bench_cmd->add_option("--input-dim", input_dim, "input feature dimension");
  bench_cmd->add_option("--methods", methods_text,
                        "comma-separated optimizers (default: all four)");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run the self-check battery; exit 0 only if all pass");
  verify_cmd->add_option("--out", verify_out, "also write the checks as CSV");

  // Benchmarks time by default; training logs stay deterministic by default.
  bench_cmd->parse_complete_callback([&]() {
    if (bench_cmd->count("--timing") == 0) opts.timing = "wall";
  });

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return run_train(data_opts, opts);
    if (grid_cmd->parsed()) return run_grid_search(data_opts, opts, alphas_text);
    if (sweep_cmd->parsed()) return run_batch_sweep(data_opts, opts, sizes_text);
    if (bench_cmd->parsed()) {
      return run_bench(opts, depths_text, width, input_dim, methods_text);
    }
    if (verify_cmd->parsed()) return run_verify(verify_out);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
