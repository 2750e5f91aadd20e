#pragma once

#include <cstdint>

#include "dpbyz/dataset.hpp"

namespace dpbyz {

// Deterministic synthetic binary-classification dataset shaped like the
// phishing corpus (same sample/feature counts, labels in {0, 1}). Samples sit
// at controlled angular margins from a fixed separating hyperplane with 5%
// label noise, so the task is learnable, converges fast, and is not perfectly
// separable. Intended as a stand-in when the real file is not available
// locally.
Dataset synthesize_dataset(std::size_t samples = 11055,
                           std::size_t features = 68,
                           std::uint64_t seed = 42);

void write_sparse_file(const Dataset& data, const std::string& path);

}  // namespace dpbyz
