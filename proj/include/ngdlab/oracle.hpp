#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ngdlab/matrix.hpp"
#include "ngdlab/network.hpp"

namespace ngdlab {

/// How a check's discrepancy is judged: against a relative or absolute
/// bound, or statistically against z_multiplier standard errors.
struct ToleranceSpec {
  enum class Kind { kRelative, kAbsolute, kStatistical };

  Kind kind = Kind::kAbsolute;
  double value = 0.0;
  std::size_t num_samples = 0;
  double z_multiplier = 0.0;

  static ToleranceSpec relative(double v);
  static ToleranceSpec absolute(double v);
  static ToleranceSpec statistical(std::size_t samples, double z);
};

/// Central-difference gradient of a scalar function at theta (p x 1).
Matrix finite_diff_gradient(const std::function<double(const Matrix&)>& f,
                            const Matrix& theta, double eps = 1e-5);

/// Central-difference Hessian, symmetric by construction.
Matrix finite_diff_hessian(const std::function<double(const Matrix&)>& f,
                           const Matrix& theta, double eps = 1e-3);

/// Monte-Carlo estimate of the expected score under the model's own label
/// distribution. Labels are drawn with sample_labels; the score of each
/// draw is averaged over the columns of x. Componentwise mean and standard
/// error are returned; the expected mean is zero.
struct McMoments {
  Matrix mean;
  Matrix standard_error;
  std::size_t num_samples = 0;
};
McMoments mc_score_expectation(const NetworkModel& net, const Matrix& x,
                               std::size_t num_samples, std::uint64_t seed);

/// Label-marginalized Fisher information of the model at its current
/// parameters, averaged over the columns of x. Categorical heads sum the
/// score outer products over classes exactly; the gaussian unit-variance
/// head reduces to the output Jacobian Gram. This is the "true FIM"
/// reference the KL-based checks compare against.
Matrix model_fim(const NetworkModel& net, const Matrix& x);

/// Checks F = -E[Hessian of the log-likelihood] by estimating both sides
/// under model-sampled labels. The gaussian head pairs each sampled label's
/// score outer product with a finite-difference Hessian so the difference
/// carries a per-component standard error; categorical heads compute both
/// expectations analytically (class sums), leaving only discretization
/// error. Components must satisfy |F̂+Ĥ| <= max(z·SE, rel_floor·max|F̂|).
struct FimHessianReport {
  Matrix fim_estimate;
  Matrix hessian_estimate;
  Matrix standard_error;
  double max_abs_sum = 0.0;        // max |F̂ + Ĥ| over components
  double normalized_discrepancy = 0.0;  // max over components of |F̂+Ĥ|/allowance
  double rel_floor = 0.0;
  double z_multiplier = 0.0;
  std::size_t num_samples = 0;
  bool pass = false;
};
FimHessianReport mc_fim_vs_hessian(const NetworkModel& net, const Matrix& x,
                                   std::size_t num_samples, std::uint64_t seed,
                                   double hessian_eps = 1e-3,
                                   double z_multiplier = 3.0,
                                   double rel_floor = 0.02);

/// Mean KL divergence between the two networks' predictive distributions
/// over the columns of x. Closed form per head: ½‖μa−μb‖² for gaussian
/// unit-variance, exact categorical sum for softmax.
double kl_divergence(const NetworkModel& net_a, const NetworkModel& net_b,
                     const Matrix& x);

/// Checks that the Hessian of θ' -> KL(p_θ ‖ p_θ') at θ' = θ equals the
/// model FIM, via central differences on the KL map.
struct KlHessianReport {
  Matrix kl_hessian;
  Matrix fim;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
KlHessianReport kl_hessian_check(const NetworkModel& net, const Matrix& x,
                                 double eps = 1e-3, double tolerance = 1e-4);

/// Checks the quadratic model KL(θ, θ+s·t) ≈ ½s²·tᵀF t across a decreasing
/// sequence of scales; the ratio at the smallest scale must sit within
/// tolerance of 1. A direction with tᵀFt = 0 is reported as degenerate so
/// the caller can resample it.
struct KlQuadraticReport {
  std::vector<double> scales;
  std::vector<double> ratios;
  double final_abs_error = 0.0;
  double tolerance = 0.0;
  bool degenerate = false;
  bool pass = false;
};
KlQuadraticReport kl_quadratic_check(const NetworkModel& net, const Matrix& x,
                                     const Matrix& direction,
                                     const std::vector<double>& scales = {1e-1, 1e-2, 1e-3},
                                     double tolerance = 1e-3);

/// Random-instance check of the low-rank inverse identity
/// (JᵀJ/m + βI)⁻¹ = (1/β)(I − Jᵀ(JJᵀ/m + βI)⁻¹ J / m):
/// the left side via direct dense inversion, the right side via an m x m
/// solve. Reports the worst relative discrepancy across trials.
struct WoodburyReport {
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  bool pass = false;
};
WoodburyReport woodbury_identity_check(double beta, std::size_t trials,
                                       std::uint64_t seed, std::size_t max_p = 30,
                                       std::size_t max_m = 10,
                                       double tolerance = 1e-9);

/// One row of the verification battery.
struct CheckResult {
  std::string check_name;
  std::string metric;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The fixed, seeded battery behind the `verify` subcommand: score-mean,
/// Fisher/Hessian, KL-Hessian, KL-quadratic, and Woodbury checks on small
/// reference models. Deterministic output.
std::vector<CheckResult> run_verify_battery();

bool all_passed(const std::vector<CheckResult>& results);
void emit_check_csv(const std::vector<CheckResult>& results, const std::string& path);
void print_check_table(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace ngdlab
