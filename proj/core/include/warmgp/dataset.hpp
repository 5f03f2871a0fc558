#pragma once

#include <cstdint>
#include <string>

#include "warmgp/types.hpp"

namespace warmgp {

/// A regression dataset: N x D feature matrix plus N targets.
struct Dataset {
  Matrix X;
  Vector y;
  std::string name;

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

/// Per-column affine parameters recorded by standardize() so the transform
/// can be inverted. A zero stored std marks a constant column.
struct StandardizationParams {
  Vector feature_mean;
  Vector feature_std;
  double target_mean = 0.0;
  double target_std = 1.0;
};

/// Disjoint row subsets of a source dataset: the initial n1 points and the
/// n2 points added afterwards.
struct SequentialSplit {
  Matrix X1;
  Vector y1;
  Matrix X2;
  Vector y2;
  std::uint64_t seed = 0;
};

/// Reads a comma-delimited numeric CSV. The column at `target_column`
/// (zero-based) becomes y; the remaining columns become X in file order.
/// Throws ParseError naming the offending line on malformed input.
Dataset load_csv(const std::string& path, Index target_column, bool has_header = false);

/// Maps every feature column and the target to zero mean and unit population
/// std. Constant columns map to all zeros. Requires at least two rows.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& d);

/// Inverse of standardize().
Dataset unstandardize(const Dataset& d, const StandardizationParams& params);

/// Draws n1 + n2 rows uniformly without replacement and splits them into two
/// disjoint subsets. Deterministic for a fixed seed.
SequentialSplit sample_split(const Dataset& d, Index n1, Index n2, std::uint64_t seed);

}  // namespace warmgp
