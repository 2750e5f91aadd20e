#include "dpbyz/attack.hpp"

#include <stdexcept>

namespace dpbyz {

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::Alie: return "alie";
    case AttackKind::Foe: return "foe";
  }
  throw std::logic_error("unknown AttackKind");
}

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "alie") return AttackKind::Alie;
  if (name == "foe") return AttackKind::Foe;
  throw std::invalid_argument("unknown attack name: " + name);
}

Vec forge(const AttackSpec& spec, std::span<const Vec> honest_reports) {
  if (honest_reports.empty()) {
    throw std::invalid_argument("forge: no honest reports to observe");
  }
  if (spec.kind == AttackKind::None) {
    throw std::invalid_argument("forge: attack kind is none");
  }
  auto [mean, sigma] = coordinate_stats(honest_reports);
  switch (spec.kind) {
    case AttackKind::Alie:
      for (std::size_t j = 0; j < mean.size(); ++j) {
        mean[j] -= spec.nu * sigma[j];
      }
      return mean;
    case AttackKind::Foe:
      for (double& x : mean) x *= 1.0 - spec.nu;
      return mean;
    case AttackKind::None: break;
  }
  throw std::logic_error("unknown AttackKind");
}

}  // namespace dpbyz
