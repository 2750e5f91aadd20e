#include "dpbyz/gar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace dpbyz {

std::string to_string(GarKind kind) {
  switch (kind) {
    case GarKind::Average: return "average";
    case GarKind::Mda: return "mda";
    case GarKind::Krum: return "krum";
    case GarKind::Bulyan: return "bulyan";
    case GarKind::Median: return "median";
    case GarKind::Meamed: return "meamed";
    case GarKind::Phocas: return "phocas";
    case GarKind::TrimmedMean: return "trimmed_mean";
  }
  throw std::logic_error("unknown GarKind");
}

GarKind gar_kind_from_string(const std::string& name) {
  if (name == "average") return GarKind::Average;
  if (name == "mda") return GarKind::Mda;
  if (name == "krum") return GarKind::Krum;
  if (name == "bulyan") return GarKind::Bulyan;
  if (name == "median") return GarKind::Median;
  if (name == "meamed") return GarKind::Meamed;
  if (name == "phocas") return GarKind::Phocas;
  if (name == "trimmed_mean" || name == "trimmedmean") return GarKind::TrimmedMean;
  throw std::invalid_argument("unknown GAR name: " + name);
}

bool applicable(const GarSpec& spec) {
  const auto n = spec.n;
  const auto f = spec.f;
  if (n == 0 || f > n) return false;
  switch (spec.kind) {
    case GarKind::Average: return true;
    case GarKind::Mda: return n >= 2 * f + 1;
    case GarKind::Krum: return n >= 2 * f + 3;
    case GarKind::Bulyan: return n >= 4 * f + 3;
    case GarKind::Median:
    case GarKind::Meamed: return 2 * f <= n - 1;
    case GarKind::TrimmedMean:
    case GarKind::Phocas: return n > 2 * f;
  }
  return false;
}

void check_applicable(const GarSpec& spec) {
  if (applicable(spec)) return;
  std::string inequality;
  switch (spec.kind) {
    case GarKind::Average: inequality = "n >= 1"; break;
    case GarKind::Mda: inequality = "n >= 2f + 1"; break;
    case GarKind::Krum: inequality = "n >= 2f + 3"; break;
    case GarKind::Bulyan: inequality = "n >= 4f + 3"; break;
    case GarKind::Median:
    case GarKind::Meamed: inequality = "2f <= n - 1"; break;
    case GarKind::TrimmedMean:
    case GarKind::Phocas: inequality = "n > 2f"; break;
  }
  throw std::invalid_argument(to_string(spec.kind) + " requires " + inequality +
                              " (got n=" + std::to_string(spec.n) +
                              ", f=" + std::to_string(spec.f) + ")");
}

double kf(const GarSpec& spec) {
  check_applicable(spec);
  const double n = static_cast<double>(spec.n);
  const double f = static_cast<double>(spec.f);
  switch (spec.kind) {
    case GarKind::Average:
      throw std::invalid_argument("kf: Average has no VN-ratio constant");
    case GarKind::Mda:
      if (spec.f == 0) return std::numeric_limits<double>::infinity();
      return (n - f) / (std::sqrt(8.0) * f);
    case GarKind::Krum:
    case GarKind::Bulyan: {
      const double eta =
          n - f + (f * (n - f - 2.0) + f * f * (n - f - 1.0)) / (n - 2.0 * f - 2.0);
      return 1.0 / std::sqrt(2.0 * eta);
    }
    case GarKind::Median:
      return 1.0 / std::sqrt(n - f);
    case GarKind::Meamed:
      return 1.0 / std::sqrt(10.0 * (n - f));
    case GarKind::TrimmedMean:
      return std::sqrt((n - 2.0 * f) * (n - 2.0 * f) /
                       (2.0 * (f + 1.0) * (n - f)));
    case GarKind::Phocas:
      return std::sqrt(4.0 + (n - 2.0 * f) * (n - 2.0 * f) /
                                 (12.0 * (f + 1.0) * (n - f)));
  }
  throw std::logic_error("unknown GarKind");
}

namespace {

double sq_dist(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

std::vector<std::vector<double>> pairwise_sq_dists(std::span<const Vec> reports) {
  const std::size_t n = reports.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i][j] = d[j][i] = sq_dist(reports[i], reports[j]);
    }
  }
  return d;
}

Vec mean_of(std::span<const Vec> reports, std::span<const std::size_t> indices) {
  Vec out(reports.front().size(), 0.0);
  for (std::size_t i : indices) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += reports[i][j];
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (double& x : out) x *= inv;
  return out;
}

// Minimum-diameter subset of size m, enumerated in lexicographic order so
// strict improvement keeps the lexicographically smallest tie.
Vec mda(std::span<const Vec> reports, std::size_t f) {
  const std::size_t n = reports.size();
  const std::size_t m = n - f;
  const auto dist = pairwise_sq_dists(reports);

  std::vector<std::size_t> subset(m);
  for (std::size_t i = 0; i < m; ++i) subset[i] = i;

  double best_diameter = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best = subset;
  while (true) {
    double diameter = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        diameter = std::max(diameter, dist[subset[a]][subset[b]]);
      }
    }
    if (diameter < best_diameter) {
      best_diameter = diameter;
      best = subset;
    }
    // next combination
    std::size_t k = m;
    while (k > 0 && subset[k - 1] == n - m + k - 1) --k;
    if (k == 0) break;
    ++subset[k - 1];
    for (std::size_t i = k; i < m; ++i) subset[i] = subset[i - 1] + 1;
  }
  return mean_of(reports, best);
}

// Krum selection over a pool of candidate indices: score each candidate by
// the sum of its q smallest squared distances to the other candidates,
// q = pool_size - f - 2 (zero when the pool shrinks below that, as happens
// in Bulyan's later rounds). Smallest score wins, ties by smaller index.
std::size_t krum_select(const std::vector<std::vector<double>>& dist,
                        const std::vector<std::size_t>& pool, std::size_t f) {
  const std::size_t m = pool.size();
  const std::size_t q = m > f + 2 ? m - f - 2 : 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best = pool.front();
  std::vector<double> others;
  others.reserve(m - 1);
  for (std::size_t i : pool) {
    others.clear();
    for (std::size_t j : pool) {
      if (j != i) others.push_back(dist[i][j]);
    }
    std::partial_sort(others.begin(), others.begin() + q, others.end());
    double score = 0.0;
    for (std::size_t k = 0; k < q; ++k) score += others[k];
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

// Average of the `count` values closest to `center`, distance ties broken
// by smaller value, then smaller worker index.
double closest_average(std::vector<std::pair<double, std::size_t>> values,
                       double center, std::size_t count) {
  std::sort(values.begin(), values.end(),
            [center](const auto& a, const auto& b) {
              const double da = std::abs(a.first - center);
              const double db = std::abs(b.first - center);
              return std::tie(da, a.first, a.second) <
                     std::tie(db, b.first, b.second);
            });
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += values[k].first;
  return acc / static_cast<double>(count);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 == 1 ? values[m / 2]
                    : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

double trimmed_mean_of(std::vector<double> values, std::size_t f) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (std::size_t k = f; k < values.size() - f; ++k) acc += values[k];
  return acc / static_cast<double>(values.size() - 2 * f);
}

Vec bulyan(std::span<const Vec> reports, std::size_t f) {
  const std::size_t n = reports.size();
  const auto dist = pairwise_sq_dists(reports);
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;

  const std::size_t theta = n - 2 * f;
  std::vector<std::size_t> selected;
  selected.reserve(theta);
  for (std::size_t round = 0; round < theta; ++round) {
    const std::size_t pick = krum_select(dist, pool, f);
    selected.push_back(pick);
    pool.erase(std::find(pool.begin(), pool.end(), pick));
  }

  const std::size_t beta = n - 4 * f;  // theta - 2f
  const std::size_t d = reports.front().size();
  Vec out(d, 0.0);
  std::vector<double> column(theta);
  std::vector<std::pair<double, std::size_t>> tagged(theta);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < theta; ++k) {
      column[k] = reports[selected[k]][j];
      tagged[k] = {column[k], selected[k]};
    }
    out[j] = closest_average(tagged, median_of(column), beta);
  }
  return out;
}

}  // namespace

Vec aggregate(const GarSpec& spec, std::span<const Vec> reports) {
  check_applicable(spec);
  if (reports.size() != spec.n) {
    throw std::invalid_argument("aggregate: expected exactly n reports");
  }
  const std::size_t d = reports.front().size();
  for (const Vec& r : reports) {
    if (r.size() != d) {
      throw std::invalid_argument("aggregate: reports have mixed dimensions");
    }
  }
  const std::size_t n = spec.n;
  const std::size_t f = spec.f;

  switch (spec.kind) {
    case GarKind::Average: {
      std::vector<std::size_t> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = i;
      return mean_of(reports, all);
    }
    case GarKind::Mda:
      return mda(reports, f);
    case GarKind::Krum: {
      const auto dist = pairwise_sq_dists(reports);
      std::vector<std::size_t> pool(n);
      for (std::size_t i = 0; i < n; ++i) pool[i] = i;
      return reports[krum_select(dist, pool, f)];
    }
    case GarKind::Bulyan:
      return bulyan(reports, f);
    case GarKind::Median: {
      Vec out(d, 0.0);
      std::vector<double> column(n);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = reports[i][j];
        out[j] = median_of(column);
      }
      return out;
    }
    case GarKind::Meamed:
    case GarKind::Phocas: {
      Vec out(d, 0.0);
      std::vector<double> column(n);
      std::vector<std::pair<double, std::size_t>> tagged(n);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          column[i] = reports[i][j];
          tagged[i] = {column[i], i};
        }
        const double center = spec.kind == GarKind::Meamed
                                  ? median_of(column)
                                  : trimmed_mean_of(column, f);
        out[j] = closest_average(tagged, center, n - f);
      }
      return out;
    }
    case GarKind::TrimmedMean: {
      Vec out(d, 0.0);
      std::vector<double> column(n);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = reports[i][j];
        out[j] = trimmed_mean_of(column, f);
      }
      return out;
    }
  }
  throw std::logic_error("unknown GarKind");
}

}  // namespace dpbyz
