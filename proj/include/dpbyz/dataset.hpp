#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpbyz/numerics.hpp"

namespace dpbyz {

struct Sample {
  Vec features;  // dense, length = feature_count, absent sparse indices are 0
  double label;  // 0 or 1 after normalization
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t feature_count = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

using Batch = std::vector<Sample>;

// Parses the sparse SVM-light style format: "<label> <idx>:<val> ...",
// 1-based strictly increasing indices, "#" starts a comment. Labels in
// {-1, 0, +1}; -1 maps to 0. feature_count defaults to the maximum index
// seen; the override pads shorter samples (phishing is fixed at 68).
Dataset parse_sparse(std::istream& in,
                     std::optional<std::size_t> feature_count = std::nullopt);
Dataset parse_sparse_file(const std::string& path,
                          std::optional<std::size_t> feature_count = std::nullopt);

// Inverse of parse_sparse (zero features omitted), for round-trip checks.
std::string serialize_sparse(const Dataset& data);

// Seeded random permutation, first train_count samples to train.
std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t train_count,
                                  RandomStream& stream);

// b draws uniformly i.i.d. with replacement, batch order = draw order.
Batch sample_batch(const Dataset& train, std::size_t b, RandomStream& stream);

}  // namespace dpbyz
