#include "ngdlab/oracle.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "ngdlab/format.hpp"

namespace ngdlab {

namespace {

void require_theta(const Matrix& theta, double eps) {
  if (theta.cols() != 1 || theta.rows() == 0) {
    throw ShapeError("finite differences: theta must be a nonempty column vector");
  }
  if (!(eps > 0.0)) throw ShapeError("finite differences: eps must be positive");
}

double eval_checked(const std::function<double(const Matrix&)>& f, const Matrix& theta) {
  const double v = f(theta);
  if (!std::isfinite(v)) {
    throw NumericError("finite differences: function value is not finite");
  }
  return v;
}

Matrix column(const Matrix& x, std::size_t c) {
  Matrix out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) out(r, 0) = x(r, c);
  return out;
}

// f += weight * v vᵀ for a column vector v.
void add_outer(Matrix& f, const Matrix& v, double weight) {
  const std::size_t p = v.rows();
  for (std::size_t i = 0; i < p; ++i) {
    const double vi = weight * v(i, 0);
    if (vi == 0.0) continue;
    double* row = f.row_ptr(i);
    for (std::size_t j = 0; j < p; ++j) row[j] += vi * v(j, 0);
  }
}

// Per-sample log-likelihood gradient for one (x, y) column pair, flattened.
Matrix single_sample_score(const NetworkModel& net, BatchCache& cache,
                           const Matrix& y) {
  const std::vector<Matrix> grads = backward(net, cache, y);
  return scaled(flatten_grads(grads), -1.0);
}

}  // namespace

ToleranceSpec ToleranceSpec::relative(double v) {
  if (!(v > 0.0)) throw ConfigError("ToleranceSpec: value must be positive");
  return ToleranceSpec{Kind::kRelative, v, 0, 0.0};
}

ToleranceSpec ToleranceSpec::absolute(double v) {
  if (!(v > 0.0)) throw ConfigError("ToleranceSpec: value must be positive");
  return ToleranceSpec{Kind::kAbsolute, v, 0, 0.0};
}

ToleranceSpec ToleranceSpec::statistical(std::size_t samples, double z) {
  if (samples == 0 || !(z > 0.0)) {
    throw ConfigError("ToleranceSpec: statistical bound needs samples and z > 0");
  }
  return ToleranceSpec{Kind::kStatistical, z, samples, z};
}

Matrix finite_diff_gradient(const std::function<double(const Matrix&)>& f,
                            const Matrix& theta, double eps) {
  require_theta(theta, eps);
  const std::size_t p = theta.rows();
  Matrix grad(p, 1);
  Matrix probe = theta;
  for (std::size_t i = 0; i < p; ++i) {
    const double base = theta(i, 0);
    probe(i, 0) = base + eps;
    const double fp = eval_checked(f, probe);
    probe(i, 0) = base - eps;
    const double fm = eval_checked(f, probe);
    probe(i, 0) = base;
    grad(i, 0) = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

Matrix finite_diff_hessian(const std::function<double(const Matrix&)>& f,
                           const Matrix& theta, double eps) {
  require_theta(theta, eps);
  const std::size_t p = theta.rows();
  Matrix hess(p, p);
  Matrix probe = theta;
  const double f0 = eval_checked(f, probe);
  for (std::size_t i = 0; i < p; ++i) {
    const double bi = theta(i, 0);
    probe(i, 0) = bi + eps;
    const double fp = eval_checked(f, probe);
    probe(i, 0) = bi - eps;
    const double fm = eval_checked(f, probe);
    probe(i, 0) = bi;
    hess(i, i) = (fp - 2.0 * f0 + fm) / (eps * eps);
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const double bi = theta(i, 0);
      const double bj = theta(j, 0);
      probe(i, 0) = bi + eps;
      probe(j, 0) = bj + eps;
      const double fpp = eval_checked(f, probe);
      probe(j, 0) = bj - eps;
      const double fpm = eval_checked(f, probe);
      probe(i, 0) = bi - eps;
      const double fmm = eval_checked(f, probe);
      probe(j, 0) = bj + eps;
      const double fmp = eval_checked(f, probe);
      probe(i, 0) = bi;
      probe(j, 0) = bj;
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * eps * eps);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

McMoments mc_score_expectation(const NetworkModel& net, const Matrix& x,
                               std::size_t num_samples, std::uint64_t seed) {
  if (num_samples < 2) throw ConfigError("mc_score_expectation: need at least 2 samples");
  BatchCache cache;
  forward(net, x, &cache);
  const std::size_t p = param_count(net);

  Matrix sum(p, 1);
  Matrix sumsq(p, 1);
  std::mt19937_64 master(seed);
  for (std::size_t draw = 0; draw < num_samples; ++draw) {
    const Matrix labels = sample_labels(net, x, master());
    // The batch-mean loss gradient negated is the column-average score.
    const std::vector<Matrix> grads = backward(net, cache, labels);
    const Matrix s = scaled(flatten_grads(grads), -1.0);
    for (std::size_t i = 0; i < p; ++i) {
      sum(i, 0) += s(i, 0);
      sumsq(i, 0) += s(i, 0) * s(i, 0);
    }
  }

  McMoments mom;
  mom.num_samples = num_samples;
  const double n = static_cast<double>(num_samples);
  mom.mean = scaled(sum, 1.0 / n);
  mom.standard_error = Matrix(p, 1);
  for (std::size_t i = 0; i < p; ++i) {
    const double var = std::max(0.0, (sumsq(i, 0) / n - mom.mean(i, 0) * mom.mean(i, 0)) *
                                         n / (n - 1.0));
    mom.standard_error(i, 0) = std::sqrt(var / n);
  }
  return mom;
}

Matrix model_fim(const NetworkModel& net, const Matrix& x) {
  const std::size_t p = param_count(net);
  Matrix fim(p, p);
  const double inv_cols = 1.0 / static_cast<double>(x.cols());

  for (std::size_t c = 0; c < x.cols(); ++c) {
    const Matrix xc = column(x, c);
    BatchCache cache;
    const Matrix pred = forward(net, xc, &cache);
    const std::size_t d_out = net.output_dim();

    if (net.head == Head::kGaussianUnitVariance) {
      // Unit-variance gaussian: F = Jᵀ J with J the output Jacobian, one
      // row per output, obtained by seeding the backward pass with e_k.
      for (std::size_t k = 0; k < d_out; ++k) {
        Matrix seed_grad(d_out, 1);
        seed_grad(k, 0) = 1.0;
        const std::vector<Matrix> grads = backward_from_output_grads(net, cache, seed_grad);
        add_outer(fim, flatten_grads(grads), inv_cols);
      }
    } else {
      // Categorical: exact class sum of score outer products weighted by
      // the predicted probabilities.
      for (std::size_t k = 0; k < d_out; ++k) {
        Matrix link(d_out, 1);
        for (std::size_t r = 0; r < d_out; ++r) link(r, 0) = pred(r, 0);
        link(k, 0) -= 1.0;
        const std::vector<Matrix> grads = backward_from_output_grads(net, cache, link);
        add_outer(fim, scaled(flatten_grads(grads), -1.0), inv_cols * pred(k, 0));
      }
    }
  }
  return fim;
}

FimHessianReport mc_fim_vs_hessian(const NetworkModel& net, const Matrix& x,
                                   std::size_t num_samples, std::uint64_t seed,
                                   double hessian_eps, double z_multiplier,
                                   double rel_floor) {
  const std::size_t p = param_count(net);
  const Matrix theta0 = flatten_params(net);

  FimHessianReport report;
  report.rel_floor = rel_floor;
  report.z_multiplier = z_multiplier;

  NetworkModel probe_net = net;
  const Head head = net.head;

  if (head == Head::kCategoricalSoftmax) {
    // Analytic expectation over labels for both sides; the only error left
    // is the finite-difference truncation, judged against the floor.
    Matrix fim(p, p);
    Matrix hess(p, p);
    const double inv_cols = 1.0 / static_cast<double>(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const Matrix xc = column(x, c);
      BatchCache cache;
      const Matrix pred = forward(net, xc, &cache);
      for (std::size_t k = 0; k < net.output_dim(); ++k) {
        Matrix link = pred;
        link(k, 0) -= 1.0;
        const std::vector<Matrix> grads = backward_from_output_grads(net, cache, link);
        add_outer(fim, scaled(flatten_grads(grads), -1.0), inv_cols * pred(k, 0));

        Matrix label(net.output_dim(), 1);
        label(k, 0) = 1.0;
        const auto loglik = [&](const Matrix& theta) {
          set_params(probe_net, theta);
          return -loss_eval(forward(probe_net, xc), label, head);
        };
        const Matrix h_k = finite_diff_hessian(loglik, theta0, hessian_eps);
        for (std::size_t i = 0; i < p * p; ++i) {
          hess.data()[i] += inv_cols * pred(k, 0) * h_k.data()[i];
        }
      }
    }
    set_params(probe_net, theta0);
    report.fim_estimate = fim;
    report.hessian_estimate = hess;
    report.standard_error = Matrix(p, p);
    report.num_samples = 0;

    const double floor_abs = rel_floor * fim.max_abs();
    double worst_abs = 0.0;
    for (std::size_t i = 0; i < p * p; ++i) {
      worst_abs = std::max(worst_abs, std::abs(fim.data()[i] + hess.data()[i]));
    }
    report.max_abs_sum = worst_abs;
    report.normalized_discrepancy = floor_abs > 0.0 ? worst_abs / floor_abs : worst_abs;
    report.pass = report.normalized_discrepancy <= 1.0;
    return report;
  }

  if (x.cols() != 1) {
    throw ShapeError(
        "mc_fim_vs_hessian: the sampled-label path works on a single fixed "
        "input column");
  }
  if (num_samples < 2) throw ConfigError("mc_fim_vs_hessian: need at least 2 samples");

  // Paired estimator: every draw contributes both its score outer product
  // and its log-likelihood Hessian, so the componentwise sum carries a
  // plain Monte-Carlo standard error.
  Matrix sum_fim(p, p);
  Matrix sum_d(p, p);
  Matrix sumsq_d(p, p);
  BatchCache cache;
  forward(net, x, &cache);

  std::mt19937_64 master(seed);
  for (std::size_t draw = 0; draw < num_samples; ++draw) {
    const Matrix label = sample_labels(net, x, master());
    const Matrix s = single_sample_score(net, cache, label);

    const auto loglik = [&](const Matrix& theta) {
      set_params(probe_net, theta);
      return -loss_eval(forward(probe_net, x), label, head);
    };
    const Matrix h = finite_diff_hessian(loglik, theta0, hessian_eps);

    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        const double outer = s(i, 0) * s(j, 0);
        const double d = outer + h(i, j);
        sum_fim(i, j) += outer;
        sum_d(i, j) += d;
        sumsq_d(i, j) += d * d;
      }
    }
  }
  set_params(probe_net, theta0);

  const double n = static_cast<double>(num_samples);
  report.fim_estimate = scaled(sum_fim, 1.0 / n);
  Matrix mean_d = scaled(sum_d, 1.0 / n);
  report.hessian_estimate = sub(mean_d, report.fim_estimate);
  report.standard_error = Matrix(p, p);
  for (std::size_t i = 0; i < p * p; ++i) {
    const double mean = mean_d.data()[i];
    const double var =
        std::max(0.0, (sumsq_d.data()[i] / n - mean * mean) * n / (n - 1.0));
    report.standard_error.data()[i] = std::sqrt(var / n);
  }
  report.num_samples = num_samples;

  const double floor_abs = rel_floor * report.fim_estimate.max_abs();
  double worst_norm = 0.0;
  double worst_abs = 0.0;
  for (std::size_t i = 0; i < p * p; ++i) {
    const double discrepancy = std::abs(mean_d.data()[i]);
    const double allowance =
        std::max(z_multiplier * report.standard_error.data()[i], floor_abs);
    worst_abs = std::max(worst_abs, discrepancy);
    if (allowance > 0.0) {
      worst_norm = std::max(worst_norm, discrepancy / allowance);
    } else if (discrepancy > 0.0) {
      worst_norm = std::numeric_limits<double>::infinity();
    }
  }
  report.max_abs_sum = worst_abs;
  report.normalized_discrepancy = worst_norm;
  report.pass = worst_norm <= 1.0;
  return report;
}

double kl_divergence(const NetworkModel& net_a, const NetworkModel& net_b,
                     const Matrix& x) {
  if (net_a.head != net_b.head) {
    throw ShapeError("kl_divergence: heads differ");
  }
  if (net_a.input_dim() != net_b.input_dim() ||
      net_a.output_dim() != net_b.output_dim()) {
    throw ShapeError("kl_divergence: predictive dimensions differ");
  }
  const Matrix pa = forward(net_a, x);
  const Matrix pb = forward(net_b, x);
  const double m = static_cast<double>(x.cols());

  if (net_a.head == Head::kGaussianUnitVariance) {
    // Unit-variance gaussians: KL = ½‖μa − μb‖² per sample.
    double total = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const double d = pa.data()[i] - pb.data()[i];
      total += 0.5 * d * d;
    }
    return total / m;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < pa.cols(); ++c) {
    for (std::size_t r = 0; r < pa.rows(); ++r) {
      const double a = pa(r, c);
      if (a <= 0.0) continue;
      const double b = std::max(pb(r, c), 1e-12);
      total += a * std::log(a / b);
    }
  }
  return total / m;
}

KlHessianReport kl_hessian_check(const NetworkModel& net, const Matrix& x,
                                 double eps, double tolerance) {
  KlHessianReport report;
  report.tolerance = tolerance;
  report.fim = model_fim(net, x);

  NetworkModel moved = net;
  const auto kl_of = [&](const Matrix& theta) {
    set_params(moved, theta);
    return kl_divergence(net, moved, x);
  };
  report.kl_hessian = finite_diff_hessian(kl_of, flatten_params(net), eps);

  const double scale = std::max(report.fim.max_abs(), 1e-30);
  report.max_rel_error = sub(report.kl_hessian, report.fim).max_abs() / scale;
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

KlQuadraticReport kl_quadratic_check(const NetworkModel& net, const Matrix& x,
                                     const Matrix& direction,
                                     const std::vector<double>& scales,
                                     double tolerance) {
  if (direction.cols() != 1 || direction.rows() != param_count(net)) {
    throw ShapeError("kl_quadratic_check: direction must be a p x 1 vector");
  }
  if (scales.empty()) throw ConfigError("kl_quadratic_check: empty scale list");

  KlQuadraticReport report;
  report.scales = scales;
  report.tolerance = tolerance;

  const Matrix fim = model_fim(net, x);
  const double quad = 0.5 * matmul(transpose(direction), matmul(fim, direction))(0, 0);
  double norm_t = 0.0;
  for (double v : direction.data()) norm_t += v * v;
  if (quad <= 1e-14 * std::max(1.0, fim.max_abs() * norm_t)) {
    report.degenerate = true;
    report.pass = false;
    return report;
  }

  const Matrix theta0 = flatten_params(net);
  NetworkModel moved = net;
  for (double s : scales) {
    Matrix theta = theta0;
    for (std::size_t i = 0; i < theta.rows(); ++i) theta(i, 0) += s * direction(i, 0);
    set_params(moved, theta);
    const double kl = kl_divergence(net, moved, x);
    report.ratios.push_back(kl / (s * s * quad));
  }
  report.final_abs_error = std::abs(report.ratios.back() - 1.0);
  report.pass = report.final_abs_error <= tolerance;
  return report;
}

WoodburyReport woodbury_identity_check(double beta, std::size_t trials,
                                       std::uint64_t seed, std::size_t max_p,
                                       std::size_t max_m, double tolerance) {
  if (!(beta > 0.0)) throw ConfigError("woodbury_identity_check: beta must be positive");
  WoodburyReport report;
  report.trials = trials;
  report.tolerance = tolerance;

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t p = 2 + gen() % (max_p - 1);
    const std::size_t m = 1 + gen() % max_m;
    Matrix j(m, p);
    for (double& v : j.data()) v = normal(gen);
    const double inv_m = 1.0 / static_cast<double>(m);

    const Matrix direct =
        spd_inverse(add_diagonal(scaled(matmul(transpose(j), j), inv_m), beta));

    const Matrix gram = add_diagonal(scaled(matmul(j, transpose(j)), inv_m), beta);
    const Matrix solved = cholesky_solve(gram, j);  // m x p
    Matrix woodbury = scaled(matmul(transpose(j), solved), -inv_m);
    for (std::size_t i = 0; i < p; ++i) woodbury(i, i) += 1.0;
    woodbury = scaled(woodbury, 1.0 / beta);

    const double rel = sub(direct, woodbury).max_abs() / direct.max_abs();
    report.max_rel_error = std::max(report.max_rel_error, rel);
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

namespace {

NetworkModel bernoulli_net(double logit_class1) {
  // One input pinned at 1, two softmax classes: a Bernoulli distribution
  // whose log-odds equal the sum of the two class-1 weights.
  DenseLayer layer;
  layer.activation = Activation::kIdentity;
  layer.weight = Matrix(2, 2);
  layer.weight(0, 1) = logit_class1;
  NetworkModel net;
  net.layers.push_back(layer);
  net.head = Head::kCategoricalSoftmax;
  return net;
}

NetworkModel linear_gaussian_net(std::uint64_t seed) {
  return make_network(2, {}, 1, Activation::kIdentity, Head::kGaussianUnitVariance, seed);
}

NetworkModel softmax3_net(std::uint64_t seed) {
  return make_network(2, {}, 3, Activation::kIdentity, Head::kCategoricalSoftmax, seed);
}

NetworkModel tanh_mlp_net(std::uint64_t seed) {
  // p = (2+1)*4 + (4+1)*2 = 22 parameters.
  return make_network(2, {4}, 2, Activation::kTanh, Head::kGaussianUnitVariance, seed);
}

Matrix unit_direction(std::size_t p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix t(p, 1);
  double norm = 0.0;
  for (double& v : t.data()) {
    v = normal(gen);
    norm += v * v;
  }
  return scaled(t, 1.0 / std::sqrt(norm));
}

CheckResult score_mean_check(const std::string& name, const NetworkModel& net,
                             const Matrix& x, std::size_t draws, std::uint64_t seed) {
  const McMoments mom = mc_score_expectation(net, x, draws, seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < mom.mean.rows(); ++i) {
    const double se = mom.standard_error(i, 0);
    const double m = std::abs(mom.mean(i, 0));
    if (se > 0.0) {
      worst = std::max(worst, m / se);
    } else if (m > 0.0) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  return CheckResult{name, "max_abs_mean_over_se", worst, 4.0, worst <= 4.0};
}

CheckResult fim_hessian_check(const std::string& name, const NetworkModel& net,
                              const Matrix& x, std::size_t draws, std::uint64_t seed) {
  const FimHessianReport rep = mc_fim_vs_hessian(net, x, draws, seed);
  return CheckResult{name, "normalized_discrepancy", rep.normalized_discrepancy, 1.0,
                     rep.pass};
}

CheckResult kl_hessian_entry(const std::string& name, const NetworkModel& net,
                             const Matrix& x) {
  const KlHessianReport rep = kl_hessian_check(net, x);
  return CheckResult{name, "max_rel_error", rep.max_rel_error, rep.tolerance, rep.pass};
}

CheckResult kl_quadratic_entry(const std::string& name, const NetworkModel& net,
                               const Matrix& x, std::uint64_t seed) {
  const std::size_t p = param_count(net);
  // Resample the probe direction if it happens to be FIM-degenerate.
  for (int attempt = 0; attempt < 5; ++attempt) {
    const KlQuadraticReport rep =
        kl_quadratic_check(net, x, unit_direction(p, seed + attempt));
    if (!rep.degenerate) {
      return CheckResult{name, "abs_ratio_error_at_1e-3", rep.final_abs_error,
                         rep.tolerance, rep.pass};
    }
  }
  return CheckResult{name, "abs_ratio_error_at_1e-3",
                     std::numeric_limits<double>::infinity(), 1e-3, false};
}

CheckResult woodbury_entry(const std::string& name, double beta, std::uint64_t seed) {
  const WoodburyReport rep = woodbury_identity_check(beta, 100, seed);
  return CheckResult{name, "max_rel_error", rep.max_rel_error, rep.tolerance, rep.pass};
}

}  // namespace

std::vector<CheckResult> run_verify_battery() {
  std::vector<CheckResult> results;

  const Matrix x_pair = Matrix::from_rows({{0.3}, {-0.2}});
  const Matrix x_one = Matrix::from_rows({{1.0}});
  const Matrix x_two = Matrix::from_rows({{0.7, -0.5}, {-0.4, 0.9}});

  results.push_back(score_mean_check("score_mean_tanh_mlp", tanh_mlp_net(101),
                                     x_pair, 100000, 2024));
  results.push_back(score_mean_check("score_mean_bernoulli", bernoulli_net(0.0),
                                     x_one, 100000, 2025));

  results.push_back(fim_hessian_check("fim_hessian_gaussian_linear",
                                      linear_gaussian_net(207), x_pair, 20000, 3031));
  results.push_back(fim_hessian_check("fim_hessian_tanh_mlp", tanh_mlp_net(101),
                                      x_pair, 50000, 3033));
  results.push_back(fim_hessian_check("fim_hessian_bernoulli", bernoulli_net(0.0),
                                      x_one, 0, 3035));
  results.push_back(fim_hessian_check("fim_hessian_softmax3", softmax3_net(211),
                                      x_two, 0, 3037));

  results.push_back(kl_hessian_entry("kl_hessian_bernoulli", bernoulli_net(0.0), x_one));
  results.push_back(
      kl_hessian_entry("kl_hessian_gaussian_linear", linear_gaussian_net(207), x_pair));
  results.push_back(kl_hessian_entry("kl_hessian_softmax3", softmax3_net(211), x_two));

  results.push_back(
      kl_quadratic_entry("kl_quadratic_bernoulli", bernoulli_net(0.0), x_one, 4041));
  results.push_back(
      kl_quadratic_entry("kl_quadratic_tanh_mlp", tanh_mlp_net(101), x_pair, 4043));

  results.push_back(woodbury_entry("woodbury_beta_1e-3", 1e-3, 5051));
  results.push_back(woodbury_entry("woodbury_beta_1e-1", 1e-1, 5053));
  results.push_back(woodbury_entry("woodbury_beta_1", 1.0, 5055));

  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

void emit_check_csv(const std::vector<CheckResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_check_csv: cannot open " + path + " for writing");
  out << "check_name,metric,value,tolerance,status\n";
  for (const CheckResult& r : results) {
    out << r.check_name << ',' << r.metric << ',' << format_g17(r.value) << ','
        << format_g17(r.tolerance) << ',' << (r.pass ? "pass" : "fail") << '\n';
  }
  if (!out.good()) throw IoError("emit_check_csv: write to " + path + " failed");
}

void print_check_table(const std::vector<CheckResult>& results, std::ostream& out) {
  const std::ios::fmtflags saved = out.flags();
  std::size_t width = 10;
  for (const CheckResult& r : results) width = std::max(width, r.check_name.size());
  for (const CheckResult& r : results) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.check_name
        << std::setw(28) << r.metric << std::right << std::setw(14)
        << std::setprecision(4) << std::scientific << r.value << "  tol "
        << std::setw(10) << r.tolerance << "  " << (r.pass ? "pass" : "FAIL")
        << '\n';
  }
  out.flags(saved);
  std::size_t passed = 0;
  for (const CheckResult& r : results) passed += r.pass ? 1 : 0;
  out << passed << "/" << results.size() << " checks passed\n";
}

}  // namespace ngdlab
