#include "ngdlab/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "ngdlab/errors.hpp"
#include "ngdlab/train.hpp"
#include "support.hpp"

using namespace ngdlab;
using namespace testsupport;

namespace {

struct TempCsv {
  std::string path;
  explicit TempCsv(const std::string& name, const std::string& content)
      : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempCsv() { std::remove(path.c_str()); }
};

double sample_std(const Matrix& m, std::size_t row) {
  double mean = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) mean += m(row, c);
  mean /= static_cast<double>(m.cols());
  double var = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double d = m(row, c) - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(m.cols()));
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("classification labels map to indices lexicographically") {
  TempCsv file("ds_labels.csv",
               "a,b,label\n"
               "1.0,2.0,yes\n"
               "3.5,-1.0,no\n"
               "0.25,4.0,yes\n");
  const Dataset ds = load_csv_dataset(file.path, "label", Task::kClassification);
  CHECK(ds.num_samples() == 3);
  CHECK(ds.feature_dim() == 2);
  CHECK(ds.dropped_rows == 0);
  REQUIRE(ds.class_names.size() == 2);
  CHECK(ds.class_names[0] == "no");
  CHECK(ds.class_names[1] == "yes");
  REQUIRE(ds.feature_names.size() == 2);
  CHECK(ds.feature_names[0] == "a");
  CHECK(ds.feature_names[1] == "b");

  CHECK(ds.targets(1, 0) == 1.0);  // yes
  CHECK(ds.targets(0, 1) == 1.0);  // no
  CHECK(ds.targets(1, 2) == 1.0);  // yes
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < 2; ++r) sum += ds.targets(r, c);
    CHECK(sum == 1.0);
  }
  CHECK(ds.features(0, 1) == 3.5);
  CHECK(ds.features(1, 2) == 4.0);
}

TEST_CASE("malformed rows are dropped and counted") {
  std::string content = "x0,x1,y\n";
  for (int i = 0; i < 9; ++i) {
    content += std::to_string(i) + ".0,1.0," + std::to_string(i) + ".5\n";
  }
  content += "oops,1.0,2.0\n";       // non-numeric feature
  content += "1.0,2.0\n";            // wrong arity
  content += "1.0,2.0,not_a_number\n";  // non-numeric regression target
  TempCsv file("ds_malformed.csv", content);
  const Dataset ds = load_csv_dataset(file.path, "y", Task::kRegression);
  CHECK(ds.num_samples() == 9);
  CHECK(ds.dropped_rows == 3);
  CHECK(ds.task == Task::kRegression);
  CHECK(ds.target_dim() == 1);
  CHECK(ds.targets(0, 4) == 4.5);
}

TEST_CASE("regression targets pass through raw") {
  TempCsv file("ds_price.csv",
               "sqft,rooms,price\r\n"
               "100.0,2,250.5\r\n"
               "80.0,1,199.0\r\n");
  const Dataset ds = load_csv_dataset(file.path, "price", Task::kRegression);
  CHECK(ds.num_samples() == 2);
  CHECK(ds.targets(0, 0) == 250.5);
  CHECK(ds.targets(0, 1) == 199.0);
  CHECK(ds.class_names.empty());
}

TEST_CASE("loader errors") {
  CHECK_THROWS_AS(load_csv_dataset("no_such_file.csv", "y", Task::kRegression),
                  IoError);
  TempCsv file("ds_errors.csv", "a,b\n1.0,2.0\n");
  CHECK_THROWS_AS(load_csv_dataset(file.path, "missing", Task::kRegression),
                  IoError);
  TempCsv junk("ds_junk.csv", "a,y\nbad,1.0\nworse,2.0\n");
  CHECK_THROWS_AS(load_csv_dataset(junk.path, "y", Task::kRegression), DataError);
  TempCsv empty("ds_empty.csv", "");
  CHECK_THROWS_AS(load_csv_dataset(empty.path, "y", Task::kRegression), IoError);
}

TEST_CASE("standardize z-scores features against the population std") {
  Dataset ds;
  ds.task = Task::kRegression;
  ds.features = Matrix::from_rows({{0.0, 10.0}, {7.0, 7.0}});
  ds.targets = Matrix::from_rows({{4.0, 8.0}});
  const Dataset out = standardize(ds);

  CHECK(out.features(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out.features(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // Constant feature rows collapse to zero.
  CHECK(out.features(1, 0) == 0.0);
  CHECK(out.features(1, 1) == 0.0);

  // Regression targets are z-scored with the transform stored.
  CHECK(out.targets(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out.targets(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(out.target_mean.size() == 1);
  CHECK(out.target_mean[0] == 6.0);
  CHECK(out.target_std[0] == 2.0);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(out.targets(0, c) * out.target_std[0] + out.target_mean[0] ==
          doctest::Approx(ds.targets(0, c)).epsilon(1e-15));
  }
}

TEST_CASE("standardize is idempotent and leaves one-hot targets alone") {
  auto gen = rng(91);
  Dataset ds;
  ds.task = Task::kClassification;
  ds.features = random_matrix(3, 40, gen, 5.0);
  ds.targets = Matrix(2, 40);
  for (std::size_t c = 0; c < 40; ++c) ds.targets(gen() % 2, c) = 1.0;

  const Dataset once = standardize(ds);
  CHECK(max_abs_diff(once.targets, ds.targets) == 0.0);
  for (std::size_t r = 0; r < once.feature_dim(); ++r) {
    double mean = 0.0, var = 0.0;
    for (std::size_t c = 0; c < 40; ++c) mean += once.features(r, c);
    mean /= 40.0;
    for (std::size_t c = 0; c < 40; ++c) {
      var += (once.features(r, c) - mean) * (once.features(r, c) - mean);
    }
    var /= 40.0;
    CHECK(std::abs(mean) <= 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Dataset twice = standardize(once);
  CHECK(max_abs_diff(twice.features, once.features) <= 1e-12);

  Dataset tiny;
  tiny.features = Matrix(2, 1);
  tiny.targets = Matrix(1, 1);
  CHECK_THROWS_AS(standardize(tiny), DataError);
}

TEST_CASE("synthetic linear regression is deterministic and realizable") {
  const Dataset a = make_synthetic(SyntheticKind::kLinregGaussian, 256, 8, 92);
  const Dataset b = make_synthetic(SyntheticKind::kLinregGaussian, 256, 8, 92);
  CHECK(max_abs_diff(a.features, b.features) == 0.0);
  CHECK(max_abs_diff(a.targets, b.targets) == 0.0);
  const Dataset c = make_synthetic(SyntheticKind::kLinregGaussian, 256, 8, 93);
  CHECK(max_abs_diff(a.features, c.features) > 0.0);

  CHECK(a.task == Task::kRegression);
  CHECK(a.feature_dim() == 8);
  CHECK(a.num_samples() == 256);
  CHECK(a.target_dim() == 1);

  // Noiseless targets are exactly linear in the features.
  const Dataset clean =
      make_synthetic(SyntheticKind::kLinregGaussian, 256, 8, 94, 0.0);
  CHECK(least_squares_loss(clean) <= 1e-12);

  // With noise 0.1 the optimum loss is near the noise floor 0.005.
  const Dataset noisy =
      make_synthetic(SyntheticKind::kLinregGaussian, 2048, 8, 95);
  const double floor = least_squares_loss(noisy);
  CHECK(floor > 0.003);
  CHECK(floor < 0.007);
}

TEST_CASE("synthetic linreg features span three decades of scale") {
  const Dataset ds = make_synthetic(SyntheticKind::kLinregGaussian, 4000, 8, 96);
  // Approx keeps its default scale of 1, which would let tiny values pass
  // against any small target, so compare ratios instead.
  const double top = sample_std(ds.features, 0);
  const double bottom = sample_std(ds.features, 7);
  CHECK(std::abs(top - 1.0) < 0.1);
  CHECK(std::abs(bottom / 1e-3 - 1.0) < 0.1);
  const double mid = sample_std(ds.features, 4);
  const double expected_mid = std::pow(10.0, -3.0 * 4.0 / 7.0);
  CHECK(std::abs(mid / expected_mid - 1.0) < 0.1);
}

TEST_CASE("synthetic blobs are separable one-hot clusters") {
  const Dataset ds =
      make_synthetic(SyntheticKind::kBlobsClassification, 500, 3, 97);
  CHECK(ds.task == Task::kClassification);
  CHECK(ds.target_dim() == 2);
  REQUIRE(ds.class_names.size() == 2);

  std::size_t count0 = 0;
  for (std::size_t c = 0; c < ds.num_samples(); ++c) {
    double sum = 0.0;
    std::size_t ones = 0;
    for (std::size_t r = 0; r < 2; ++r) {
      sum += ds.targets(r, c);
      if (ds.targets(r, c) == 1.0) ++ones;
    }
    CHECK(sum == 1.0);
    CHECK(ones == 1);
    const bool cls0 = ds.targets(0, c) == 1.0;
    if (cls0) ++count0;
    const double center = cls0 ? -10.0 : 10.0;
    CHECK(std::abs(ds.features(0, c) - center) < 6.0);
  }
  CHECK(count0 > 100);
  CHECK(count0 < 400);

  const Dataset again =
      make_synthetic(SyntheticKind::kBlobsClassification, 500, 3, 97);
  CHECK(max_abs_diff(ds.features, again.features) == 0.0);
  CHECK(max_abs_diff(ds.targets, again.targets) == 0.0);
}

TEST_CASE("synthetic config validation") {
  CHECK_THROWS_AS(make_synthetic(SyntheticKind::kLinregGaussian, 0, 3, 1),
                  ConfigError);
  CHECK_THROWS_AS(make_synthetic(SyntheticKind::kLinregGaussian, 3, 0, 1),
                  ConfigError);
  CHECK_THROWS_AS(make_synthetic(SyntheticKind::kLinregGaussian, 3, 3, 1, -1.0),
                  ConfigError);
}

TEST_CASE("enum strings round trip") {
  CHECK(task_from_string(to_string(Task::kRegression)) == Task::kRegression);
  CHECK(task_from_string(to_string(Task::kClassification)) ==
        Task::kClassification);
  CHECK_THROWS_AS(task_from_string("ranking"), ConfigError);
  CHECK(synthetic_from_string(to_string(SyntheticKind::kLinregGaussian)) ==
        SyntheticKind::kLinregGaussian);
  CHECK(synthetic_from_string(to_string(SyntheticKind::kBlobsClassification)) ==
        SyntheticKind::kBlobsClassification);
  CHECK_THROWS_AS(synthetic_from_string("moons"), ConfigError);
}

}  // TEST_SUITE
