#pragma once

#include <cstdint>
#include <string>

#include "warmgp/dataset.hpp"

namespace warmgp::bench {

/// Generates a synthetic regression dataset with correlated, unevenly scaled
/// features and a smooth nonlinear target. The `pol` and `elevators` presets
/// match the dimensionality of the UCI datasets of the same name for use as
/// offline stand-ins; `generic` takes an explicit dimension.
Dataset make_synthetic_dataset(const std::string& preset, Index rows, Index dim,
                               std::uint64_t seed);

/// Writes a dataset as a plain comma-delimited CSV, target last, no header.
void write_csv(const Dataset& d, const std::string& path);

}  // namespace warmgp::bench
