#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpbyz/numerics.hpp"

namespace dpbyz {

enum class GarKind {
  Average,
  Mda,
  Krum,
  Bulyan,
  Median,
  Meamed,
  Phocas,
  TrimmedMean,
};

std::string to_string(GarKind kind);
GarKind gar_kind_from_string(const std::string& name);

struct GarSpec {
  GarKind kind;
  std::size_t n;  // total workers
  std::size_t f;  // Byzantine bound
};

// Applicability preconditions:
//   Average:      always
//   MDA:          n >= 2f + 1
//   Krum:         n >= 2f + 3   (n - 2f - 2 > 0)
//   Bulyan:       n >= 4f + 3
//   Median/Meamed: 2f <= n - 1
//   TrimmedMean/Phocas: n > 2f
bool applicable(const GarSpec& spec);
// Throws std::invalid_argument naming the violated inequality.
void check_applicable(const GarSpec& spec);

// The VN-ratio constant k_F(n, f). For MDA with f = 0 the constant is
// unbounded and +infinity is returned. Average has no constant (error).
double kf(const GarSpec& spec);

// Aggregates exactly n reports of equal dimension into one vector.
// All tie-breaking is deterministic: selections prefer the
// lexicographically smallest index set; per-coordinate "closest to"
// selections break distance ties by smaller value, then smaller index.
Vec aggregate(const GarSpec& spec, std::span<const Vec> reports);

}  // namespace dpbyz
