#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ngdlab/matrix.hpp"

namespace ngdlab {

enum class Task { kRegression, kClassification };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

/// A column-major sample store: one column of `features` and `targets` per
/// sample. Classification targets are one-hot columns; regression targets
/// hold raw values, one row per output.
struct Dataset {
  Matrix features;  // feature_dim x n
  Matrix targets;   // target_dim x n
  Task task = Task::kRegression;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;  // classification only, index = row
  std::size_t dropped_rows = 0;

  // Filled by standardize for regression targets so predictions can be
  // mapped back to the original units.
  std::vector<double> target_mean;
  std::vector<double> target_std;

  std::size_t num_samples() const { return features.cols(); }
  std::size_t feature_dim() const { return features.rows(); }
  std::size_t target_dim() const { return targets.rows(); }
};

/// Parses a comma-separated file with a header row. Feature cells must be
/// numeric; rows that fail to parse (wrong arity, non-numeric feature, or
/// for regression a non-numeric target) are dropped and counted. For
/// classification the target cell is a label; labels map to class indices
/// in lexicographic order.
Dataset load_csv_dataset(const std::string& path, const std::string& target_column,
                         Task task);

/// Returns a copy with each feature row z-scored against its population
/// mean and standard deviation; zero-variance features become all zeros.
/// Regression target rows are z-scored the same way with the (mean, std)
/// pair stored on the result; classification targets pass through.
Dataset standardize(const Dataset& ds);

enum class SyntheticKind { kLinregGaussian, kBlobsClassification };

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_from_string(const std::string& name);

/// Deterministic synthetic problems.
///
/// linreg_gaussian: features are independent gaussians with per-row scales
/// spaced geometrically from 1 down to 0.1 (a mildly ill-conditioned
/// design), targets are w·x plus noise_scale times unit gaussian noise with
/// w drawn once from the seed.
///
/// blobs_classification: two unit-variance gaussian clusters centered at
/// ±10 along the first feature axis, labels one-hot.
Dataset make_synthetic(SyntheticKind kind, std::size_t n, std::size_t dim,
                       std::uint64_t seed, double noise_scale = 0.1);

}  // namespace ngdlab
