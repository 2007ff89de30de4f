// Acceptance battery: one self-contained check per shipping requirement,
// each printed as a single PASS/FAIL line. Exits nonzero if any fail.
//
// Usage: ngdlab_acceptance --cli /path/to/ngdlab --workdir /tmp/scratch
// The CLI path and scratch directory are needed only by the determinism
// check; the other checks are in-process.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
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

namespace {

using namespace ngdlab;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (double x : m.data()) v = std::max(v, std::abs(x));
  return v;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    v = std::max(v, std::abs(a.data()[i] - b.data()[i]));
  }
  return v;
}

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return std::string(buf);
}

// Random small instance shared by the algebraic checks: a 1-3 layer tanh
// network with either head, plus a batch with matching one-hot or real
// targets, already forward/backward propagated.
struct Instance {
  NetworkModel net;
  BatchCache cache;
  std::vector<Matrix> grads;
  Matrix x;
  Matrix y;
};

Instance random_instance(std::mt19937_64& gen, bool force_gaussian = false) {
  std::uniform_int_distribution<std::size_t> depth_dist(0, 2);
  std::uniform_int_distribution<std::size_t> width_dist(1, 8);
  std::uniform_int_distribution<std::size_t> m_dist(1, 16);
  std::normal_distribution<double> normal(0.0, 1.0);

  Instance inst;
  const std::size_t input_dim = width_dist(gen);
  const std::size_t output_dim = force_gaussian ? width_dist(gen)
                                                : std::max<std::size_t>(2, width_dist(gen));
  std::vector<std::size_t> hidden;
  const std::size_t depth = depth_dist(gen);
  for (std::size_t i = 0; i < depth; ++i) hidden.push_back(width_dist(gen));
  const Head head = force_gaussian || (gen() % 2 == 0)
                        ? Head::kGaussianUnitVariance
                        : Head::kCategoricalSoftmax;
  inst.net = make_network(input_dim, hidden, output_dim, Activation::kTanh,
                          head, gen());

  const std::size_t m = m_dist(gen);
  inst.x = Matrix(input_dim, m);
  for (double& v : inst.x.data()) v = normal(gen);
  inst.y = Matrix(output_dim, m);
  if (head == Head::kGaussianUnitVariance) {
    for (double& v : inst.y.data()) v = normal(gen);
  } else {
    for (std::size_t c = 0; c < m; ++c) {
      inst.y(gen() % output_dim, c) = 1.0;
    }
  }
  forward(inst.net, inst.x, &inst.cache);
  inst.grads = backward(inst.net, inst.cache, inst.y);
  return inst;
}

// 1. The Gram/Woodbury update path must reproduce the explicit per-layer
// damped solve elementwise across random instances and dampings.
Outcome criterion_woodbury_equivalence() {
  std::mt19937_64 gen(9101);
  const double betas[] = {1e-3, 1e-1, 1.0};
  double worst = 0.0;
  const std::size_t trials = 201;
  for (std::size_t t = 0; t < trials; ++t) {
    const Instance inst = random_instance(gen);
    OptimConfig cfg;
    cfg.alpha = 0.5;
    cfg.beta = betas[t % 3];

    NetworkModel via_gram = inst.net;
    NetworkModel via_block = inst.net;
    cfg.method = Method::kTengrad;
    tengrad_step(via_gram, inst.grads, inst.cache, cfg);
    cfg.method = Method::kBlockNgd;
    block_ngd_step(via_block, inst.grads, inst.cache, cfg);

    const Matrix before = flatten_params(inst.net);
    const Matrix after_gram = flatten_params(via_gram);
    const Matrix after_block = flatten_params(via_block);
    double step_scale = 0.0;
    for (std::size_t i = 0; i < before.data().size(); ++i) {
      step_scale = std::max(step_scale,
                            std::abs(after_block.data()[i] - before.data()[i]));
    }
    const double rel =
        max_abs_diff(after_gram, after_block) / std::max(step_scale, 1e-300);
    worst = std::max(worst, rel);
  }
  Outcome out;
  out.pass = worst <= 1e-8;
  out.detail = "max rel step difference " + fmt("%.3g", worst) + " over 201 instances";
  return out;
}

// 2. (I'I) hadamard (G'G) must equal the explicitly formed J·J'.
Outcome criterion_gram_identity() {
  std::mt19937_64 gen(9202);
  std::uniform_int_distribution<std::size_t> dim_dist(1, 8);
  std::uniform_int_distribution<std::size_t> m_dist(1, 16);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    Matrix inputs(dim_dist(gen), m_dist(gen));
    Matrix grads(dim_dist(gen), inputs.cols());
    for (double& v : inputs.data()) v = normal(gen);
    for (double& v : grads.data()) v = normal(gen);
    const Matrix j = layer_jacobian_explicit(inputs, grads);
    Matrix jjt(j.rows(), j.rows());
    for (std::size_t r = 0; r < j.rows(); ++r) {
      for (std::size_t c = 0; c < j.rows(); ++c) {
        double dot = 0.0;
        for (std::size_t k = 0; k < j.cols(); ++k) dot += j(r, k) * j(c, k);
        jjt(r, c) = dot;
      }
    }
    const Matrix fast = gram_jacobian(inputs, grads);
    const double rel = max_abs_diff(fast, jjt) / std::max(max_abs(jjt), 1e-300);
    worst = std::max(worst, rel);
  }
  Outcome out;
  out.pass = worst <= 1e-12;
  out.detail = "max rel error " + fmt("%.3g", worst) + " over 100 instances";
  return out;
}

// 3. Backprop gradients must match central finite differences of the loss.
Outcome criterion_gradient_check() {
  std::mt19937_64 gen(9303);
  double worst = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    const Instance inst = random_instance(gen);
    Matrix flat_grad(param_count(inst.net), 1);
    std::size_t at = 0;
    for (const Matrix& g : inst.grads) {
      for (double v : g.data()) flat_grad.data()[at++] = v;
    }
    NetworkModel probe = inst.net;
    const auto loss_at = [&probe, &inst](const Matrix& theta) {
      set_params(probe, theta);
      return loss_eval(forward(probe, inst.x), inst.y, probe.head);
    };
    const Matrix fd = finite_diff_gradient(loss_at, flatten_params(inst.net));
    const double rel = max_abs_diff(fd, flat_grad) / std::max(max_abs(fd), 1e-300);
    worst = std::max(worst, rel);
  }
  Outcome out;
  out.pass = worst <= 1e-6;
  out.detail = "max rel error " + fmt("%.3g", worst) + " over 50 instances";
  return out;
}

// 4. Information identities: zero score mean, F = -E[Hessian], KL Hessian
// equals the FIM, and the quadratic KL model, at the stated sample sizes.
Outcome criterion_identity_battery() {
  const Matrix x_pair = Matrix::from_rows({{0.3}, {-0.2}});
  const Matrix x_one = Matrix::from_rows({{1.0}});
  const Matrix x_two = Matrix::from_rows({{0.7, -0.5}, {-0.4, 0.9}});

  const NetworkModel mlp = make_network(2, {4}, 2, Activation::kTanh,
                                        Head::kGaussianUnitVariance, 101);
  const NetworkModel coin = make_network(1, {}, 2, Activation::kIdentity,
                                         Head::kCategoricalSoftmax, 0);
  const NetworkModel lin = make_network(2, {}, 1, Activation::kIdentity,
                                        Head::kGaussianUnitVariance, 207);
  const NetworkModel soft = make_network(2, {}, 3, Activation::kIdentity,
                                         Head::kCategoricalSoftmax, 211);

  std::vector<std::string> failures;

  // Score mean within 4 standard errors of zero, 100k label draws.
  for (const NetworkModel* net : {&mlp, &coin}) {
    const Matrix& x = net == &mlp ? x_pair : x_one;
    const McMoments mom = mc_score_expectation(*net, x, 100000, 9404);
    for (std::size_t i = 0; i < mom.mean.data().size(); ++i) {
      const double allowance = 4.0 * mom.standard_error.data()[i];
      if (std::abs(mom.mean.data()[i]) > allowance) {
        failures.push_back("score mean component " + std::to_string(i) +
                           " outside 4 SE");
      }
    }
  }

  // Fisher vs negative expected Hessian on the p=22 network, 50k draws.
  const FimHessianReport fh = mc_fim_vs_hessian(mlp, x_pair, 50000, 9405);
  if (!fh.pass) {
    failures.push_back("fisher/hessian discrepancy " +
                       fmt("%.3g", fh.normalized_discrepancy) + "x allowance");
  }

  // KL Hessian equals the FIM within 1e-4 relative on all three heads.
  for (const NetworkModel* net : {&coin, &lin, &soft}) {
    const Matrix& x = net == &coin ? x_one : (net == &lin ? x_pair : x_two);
    const KlHessianReport kh = kl_hessian_check(*net, x, 1e-3, 1e-4);
    if (!kh.pass) {
      failures.push_back("kl hessian rel error " + fmt("%.3g", kh.max_rel_error));
    }
  }

  // KL matches its quadratic model within 1e-3 at step scale 1e-3.
  std::mt19937_64 gen(9406);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const NetworkModel* net : {&coin, &mlp}) {
    const Matrix& x = net == &coin ? x_one : x_pair;
    Matrix dir(param_count(*net), 1);
    for (double& v : dir.data()) v = normal(gen);
    const KlQuadraticReport kq =
        kl_quadratic_check(*net, x, dir, {1e-1, 1e-2, 1e-3}, 1e-3);
    if (!kq.pass || kq.degenerate) {
      failures.push_back("kl quadratic ratio off by " +
                         fmt("%.3g", kq.final_abs_error));
    }
  }

  Outcome out;
  out.pass = failures.empty();
  if (failures.empty()) {
    out.detail = "score mean, fisher/hessian, kl hessian, kl quadratic all hold";
  } else {
    out.detail = failures.front() +
                 (failures.size() > 1
                      ? " (+" + std::to_string(failures.size() - 1) + " more)"
                      : "");
  }
  return out;
}

// 5. On linear-gaussian data with unit-magnitude residuals the empirical
// Fisher equals the Hessian, so one undamped full-batch natural step lands
// on the normal-equations solution.
Outcome criterion_one_step() {
  std::mt19937_64 gen(9505);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = 5, m = 64;
  Matrix x(d, m);
  Matrix y(1, m);
  for (double& v : x.data()) v = normal(gen);
  for (double& v : y.data()) v = gen() % 2 == 0 ? 1.0 : -1.0;

  NetworkModel net = make_network(d, {}, 1, Activation::kIdentity,
                                  Head::kGaussianUnitVariance, 1);
  for (double& v : net.layers[0].weight.data()) v = 0.0;

  BatchCache cache;
  forward(net, x, &cache);
  const std::vector<Matrix> grads = backward(net, cache, y);
  OptimConfig cfg;
  cfg.method = Method::kExactNgd;
  cfg.alpha = 1.0;
  cfg.beta = 1e-8;
  exact_ngd_step(net, grads, cache, cfg);

  // Normal equations on the bias-augmented inputs.
  const Matrix& xt = cache.layers[0].inputs;  // (d+1) x m
  Matrix gram(d + 1, d + 1);
  Matrix rhs(d + 1, 1);
  for (std::size_t r = 0; r < d + 1; ++r) {
    for (std::size_t c = 0; c < d + 1; ++c) {
      double dot = 0.0;
      for (std::size_t k = 0; k < m; ++k) dot += xt(r, k) * xt(c, k);
      gram(r, c) = dot;
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < m; ++k) dot += xt(r, k) * y(0, k);
    rhs(r, 0) = dot;
  }
  const Matrix w_star = cholesky_solve(gram, rhs);
  const Matrix w_step = flatten_params(net);
  const double rel =
      max_abs_diff(w_step, w_star) / std::max(max_abs(w_star), 1e-300);
  Outcome out;
  out.pass = rel <= 1e-6;
  out.detail = "distance to normal-equations solution " + fmt("%.3g rel", rel);
  return out;
}

int epochs_to_threshold(const TrainResult& res, double threshold) {
  for (std::size_t e = 0; e < res.epoch_mean_losses.size(); ++e) {
    if (res.epoch_mean_losses[e] <= threshold) return static_cast<int>(e) + 1;
  }
  return -1;
}

// 6. On the ill-conditioned synthetic regression, the curvature-aware
// method must reach 1.1x the least-squares floor in at most a third of the
// epochs plain SGD needs, each at its best grid learning rate.
Outcome criterion_convergence_ordering() {
  const Dataset ds = make_synthetic(SyntheticKind::kLinregGaussian, 2048, 8, 46);
  const double threshold = 1.1 * least_squares_loss(ds);

  const auto best_reach = [&ds, threshold](Method method, std::size_t epochs) {
    int best = -1;
    for (double alpha : default_alpha_grid()) {
      RunConfig cfg;
      cfg.hidden = {4};
      cfg.activation = Activation::kIdentity;
      cfg.optim.method = method;
      cfg.optim.alpha = alpha;
      cfg.optim.beta = 1e-6;
      cfg.batch_size = 128;
      cfg.epochs = epochs;
      cfg.seed = 47;
      const int reach = epochs_to_threshold(train_run(cfg, ds), threshold);
      if (reach > 0 && (best < 0 || reach < best)) best = reach;
    }
    return best;
  };

  const std::size_t sgd_budget = 200;
  const int tengrad_reach = best_reach(Method::kTengrad, 60);
  const int sgd_reach = best_reach(Method::kSgd, sgd_budget);

  Outcome out;
  const bool sgd_slow_enough =
      sgd_reach < 0 || sgd_reach >= 3 * tengrad_reach;
  out.pass = tengrad_reach > 0 &&
             3 * tengrad_reach <= static_cast<int>(sgd_budget) && sgd_slow_enough;
  std::ostringstream ss;
  ss << "epochs to 1.1x floor: tengrad " << tengrad_reach << ", sgd ";
  if (sgd_reach < 0) {
    ss << "not reached in " << sgd_budget;
  } else {
    ss << sgd_reach;
  }
  out.detail = ss.str();
  return out;
}

// 7. Eight-sample batches must degrade the curvature-aware method's final
// loss strictly, and more than they degrade SGD's.
Outcome criterion_batch_sensitivity() {
  const Dataset ds = make_synthetic(SyntheticKind::kLinregGaussian, 2048, 8, 46);
  const std::vector<double> grid = {1e-2, 3e-2, 1e-1};

  const auto best_final = [&ds, &grid](Method method, std::size_t batch) {
    double best = std::numeric_limits<double>::infinity();
    for (double alpha : grid) {
      RunConfig cfg;
      cfg.hidden = {4};
      cfg.activation = Activation::kIdentity;
      cfg.optim.method = method;
      cfg.optim.alpha = alpha;
      cfg.optim.beta = 1e-6;
      cfg.batch_size = batch;
      cfg.epochs = 50;
      cfg.seed = 47;
      const TrainResult res = train_run(cfg, ds);
      if (!res.failed()) best = std::min(best, res.final_loss());
    }
    return best;
  };

  const double t8 = best_final(Method::kTengrad, 8);
  const double t1024 = best_final(Method::kTengrad, 1024);
  const double s8 = best_final(Method::kSgd, 8);
  const double s1024 = best_final(Method::kSgd, 1024);

  Outcome out;
  out.pass = t8 > t1024 && (s8 / s1024) < (t8 / t1024);
  out.detail = "loss ratio m=8 vs m=1024: tengrad " + fmt("%.3g", t8 / t1024) +
               ", sgd " + fmt("%.3g", s8 / s1024);
  return out;
}

double loglog_slope(const std::vector<double>& px, const std::vector<double>& ty) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double lx = std::log(px[i]);
    const double ly = std::log(ty[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 8. Step time must scale at least quadratically in p for the dense solver
// and at most mildly superlinearly for the Gram path and SGD, and the dense
// solver must report infeasibility above its cap instead of crashing.
Outcome criterion_scaling() {
  BenchConfig cfg;
  cfg.input_dim = 10;
  cfg.width = 20;
  cfg.depths = {1, 2, 3, 4, 13};
  cfg.batch_size = 64;
  cfg.warmup_steps = 5;
  cfg.timed_steps = 21;
  cfg.optim.alpha = 1e-3;
  cfg.optim.beta = 1e-2;
  cfg.seed = 77;
  cfg.record_wall_time = true;
  const std::vector<BenchRecord> recs = scaling_bench(cfg);

  std::vector<double> p_sgd, t_sgd, p_exact, t_exact, p_ten, t_ten;
  bool over_cap_infeasible = false;
  bool others_ok = true;
  for (const BenchRecord& r : recs) {
    if (r.depth == 13 && r.method == "exact-ngd") {
      over_cap_infeasible = r.status == "infeasible";
      continue;
    }
    if (r.status != "ok") others_ok = false;
    if (r.depth > 4) continue;
    const double p = static_cast<double>(r.params);
    const double t = static_cast<double>(r.median_step_ns);
    if (r.method == "sgd") {
      p_sgd.push_back(p);
      t_sgd.push_back(t);
    } else if (r.method == "exact-ngd") {
      p_exact.push_back(p);
      t_exact.push_back(t);
    } else if (r.method == "tengrad") {
      p_ten.push_back(p);
      t_ten.push_back(t);
    }
  }
  const double slope_exact = loglog_slope(p_exact, t_exact);
  const double slope_ten = loglog_slope(p_ten, t_ten);
  const double slope_sgd = loglog_slope(p_sgd, t_sgd);

  Outcome out;
  out.pass = slope_exact >= 2.0 && slope_ten <= 1.3 && slope_sgd <= 1.3 &&
             over_cap_infeasible && others_ok;
  out.detail = "log-log slopes: exact " + fmt("%.2f", slope_exact) + ", tengrad " +
               fmt("%.2f", slope_ten) + ", sgd " + fmt("%.2f", slope_sgd) +
               (over_cap_infeasible ? ", over-cap row infeasible"
                                    : ", over-cap row NOT infeasible");
  return out;
}

// 9. With overwhelming damping the Gram-path step must collapse to a scaled
// plain gradient step.
Outcome criterion_large_damping() {
  std::mt19937_64 gen(9909);
  double worst = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const Instance inst = random_instance(gen);
    OptimConfig cfg;
    cfg.method = Method::kTengrad;
    cfg.alpha = 1e-3;
    cfg.beta = 1e6;
    NetworkModel stepped = inst.net;
    tengrad_step(stepped, inst.grads, inst.cache, cfg);

    const Matrix before = flatten_params(inst.net);
    const Matrix after = flatten_params(stepped);
    Matrix ghat(param_count(inst.net), 1);
    std::size_t at = 0;
    for (const Matrix& g : inst.grads) {
      for (double v : g.data()) ghat.data()[at++] = v;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < ghat.data().size(); ++i) {
      const double step = after.data()[i] - before.data()[i];
      const double ref = -ghat.data()[i];
      dot += step * ref;
      na += step * step;
      nb += ref * ref;
    }
    const double cosine =
        std::clamp(dot / std::max(std::sqrt(na * nb), 1e-300), -1.0, 1.0);
    worst = std::max(worst, std::acos(cosine));
  }
  Outcome out;
  out.pass = worst <= 1e-3;
  out.detail = "max angle to the negative mean gradient " +
               fmt("%.3g rad", worst) + " over 20 instances";
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Every CLI subcommand run twice with identical flags must emit
// byte-identical CSVs.
Outcome criterion_determinism(const std::string& cli,
                              const std::filesystem::path& workdir) {
  Outcome out;
  if (cli.empty()) {
    out.detail = "no --cli path given, cannot run the subcommands";
    return out;
  }
  std::filesystem::create_directories(workdir);

  struct Job {
    const char* name;
    std::string args;
  };
  const std::vector<Job> jobs = {
      {"train",
       "train --synthetic linreg_gaussian --n 64 --d 4 --hidden 4 "
       "--method tengrad --alpha 3e-3 --beta 1e-2 --epochs 2 --batch-size 16 "
       "--seed 3 --run-id det"},
      {"grid-search",
       "grid-search --synthetic linreg_gaussian --n 48 --d 3 --method sgd "
       "--alphas 1e-2,3e-2 --epochs 2 --batch-size 16 --seed 4"},
      {"batch-sweep",
       "batch-sweep --synthetic linreg_gaussian --n 32 --d 3 --method sgd "
       "--alpha 1e-2 --sizes 4,16 --epochs 2 --seed 5"},
      {"bench-scaling",
       "bench-scaling --depths 1,2 --width 4 --input-dim 3 "
       "--methods sgd,tengrad --batch-size 8 --timing off --seed 6"},
      {"verify", "verify"},
  };

  std::vector<std::string> mismatches;
  for (const Job& job : jobs) {
    const std::filesystem::path csv = workdir / (std::string(job.name) + ".csv");
    const std::string cmd = "\"" + cli + "\" " + job.args + " --out \"" +
                            csv.string() + "\" > /dev/null 2>&1";
    std::string first;
    bool ok = true;
    for (int round = 0; round < 2; ++round) {
      if (std::system(cmd.c_str()) != 0) {
        mismatches.push_back(std::string(job.name) + " exited nonzero");
        ok = false;
        break;
      }
      if (round == 0) {
        first = read_file(csv);
        std::filesystem::remove(csv);
      } else if (read_file(csv) != first) {
        mismatches.push_back(std::string(job.name) + " output differs");
        ok = false;
      }
    }
    if (ok && first.empty()) {
      mismatches.push_back(std::string(job.name) + " wrote an empty CSV");
    }
  }

  out.pass = mismatches.empty();
  out.detail = mismatches.empty()
                   ? "all five subcommands byte-identical across reruns"
                   : mismatches.front();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::filesystem::path workdir = std::filesystem::temp_directory_path() /
                                  "ngdlab_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    if (flag == "--workdir") workdir = argv[i + 1];
  }

  struct Entry {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {"woodbury path equals the block solve", 10.0,
       criterion_woodbury_equivalence},
      {"gram identity matches the explicit jacobian", 1.0,
       criterion_gram_identity},
      {"backprop matches finite differences", 30.0, criterion_gradient_check},
      {"information identities hold", 300.0, criterion_identity_battery},
      {"one natural step solves linear-gaussian regression", 1.0,
       criterion_one_step},
      {"curvature-aware training converges 3x faster", 120.0,
       criterion_convergence_ordering},
      {"tiny batches hurt the curvature estimate more than sgd", 180.0,
       criterion_batch_sensitivity},
      {"step cost scales as promised", 300.0, criterion_scaling},
      {"large damping collapses to scaled sgd", 60.0, criterion_large_damping},
      {"cli reruns are byte-identical", 120.0,
       [&cli, &workdir]() { return criterion_determinism(cli, workdir); }},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& err) {
      out.pass = false;
      out.detail = std::string("exception: ") + err.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (seconds > entries[i].budget_seconds) {
      out.pass = false;
      out.detail += " [over the " + fmt("%.0f", entries[i].budget_seconds) +
                    "s budget]";
    }
    all_pass = all_pass && out.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n",
                out.pass ? "PASS" : "FAIL", i + 1, entries[i].name,
                out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
