#pragma once

#include <span>
#include <string>

#include "dpbyz/numerics.hpp"

namespace dpbyz {

enum class AttackKind { None, Alie, Foe };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  double nu = 0.0;

  static AttackSpec none() { return {AttackKind::None, 0.0}; }
  static AttackSpec alie(double nu = 1.5) { return {AttackKind::Alie, nu}; }
  static AttackSpec foe(double nu = 1.1) { return {AttackKind::Foe, nu}; }
};

// The single gradient all colluding Byzantine workers submit this step.
// With (mean, sigma) the coordinate-wise mean and population standard
// deviation of the observed honest reports:
//   ALIE ("a little is enough"): mean - nu * sigma
//   FoE  ("fall of empires"):    (1 - nu) * mean
Vec forge(const AttackSpec& spec, std::span<const Vec> honest_reports);

}  // namespace dpbyz
