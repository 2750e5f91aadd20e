#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dpbyz/gar.hpp"
#include "dpbyz/numerics.hpp"

using namespace dpbyz;

namespace {

double dist(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(acc);
}

// Bitmask-enumerated minimum-diameter subset, plain (non-squared) distances.
// Candidate index sets are visited in lexicographic order, strict improvement
// only, mirroring the documented tie rule.
Vec oracle_mda(const std::vector<Vec>& reports, std::size_t f) {
  const std::size_t n = reports.size();
  const std::size_t m = n - f;
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    if (std::size_t(std::popcount(mask)) != m) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    candidates.push_back(idx);
  }
  std::sort(candidates.begin(), candidates.end());
  double best = std::numeric_limits<double>::infinity();
  const std::vector<std::size_t>* chosen = nullptr;
  for (const auto& idx : candidates) {
    double diameter = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        diameter = std::max(diameter, dist(reports[idx[a]], reports[idx[b]]));
      }
    }
    if (diameter < best) {
      best = diameter;
      chosen = &idx;
    }
  }
  Vec out(reports.front().size(), 0.0);
  for (std::size_t i : *chosen) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += reports[i][j];
  }
  for (double& x : out) x /= double(m);
  return out;
}

// Full-sort Krum scorer: sum of the n-f-2 smallest squared distances.
Vec oracle_krum(const std::vector<Vec>& reports, std::size_t f) {
  const std::size_t n = reports.size();
  const std::size_t q = n - f - 2;
  double best = std::numeric_limits<double>::infinity();
  std::size_t winner = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> ds;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double sq = 0.0;
      for (std::size_t c = 0; c < reports[i].size(); ++c) {
        sq += (reports[i][c] - reports[j][c]) * (reports[i][c] - reports[j][c]);
      }
      ds.push_back(sq);
    }
    std::sort(ds.begin(), ds.end());
    double score = 0.0;
    for (std::size_t k = 0; k < q; ++k) score += ds[k];
    if (score < best) {  // strict: ties keep the smaller index
      best = score;
      winner = i;
    }
  }
  return reports[winner];
}

double oracle_median(std::vector<double> col) {
  std::sort(col.begin(), col.end());
  const std::size_t m = col.size();
  return m % 2 ? col[m / 2] : (col[m / 2 - 1] + col[m / 2]) / 2.0;
}

double oracle_trimmed(std::vector<double> col, std::size_t f) {
  std::sort(col.begin(), col.end());
  double acc = 0.0;
  for (std::size_t k = f; k + f < col.size(); ++k) acc += col[k];
  return acc / double(col.size() - 2 * f);
}

// n-f values closest to `center`; ties by smaller value, then worker index.
double oracle_closest(const std::vector<double>& col, double center,
                      std::size_t count) {
  std::vector<std::size_t> order(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = std::abs(col[a] - center), db = std::abs(col[b] - center);
    if (da != db) return da < db;
    return col[a] < col[b];
  });
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += col[order[k]];
  return acc / double(count);
}

Vec column_rule(const std::vector<Vec>& reports, std::size_t f, GarKind kind) {
  const std::size_t d = reports.front().size();
  Vec out(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col;
    for (const Vec& r : reports) col.push_back(r[j]);
    switch (kind) {
      case GarKind::Median: out[j] = oracle_median(col); break;
      case GarKind::TrimmedMean: out[j] = oracle_trimmed(col, f); break;
      case GarKind::Meamed:
        out[j] = oracle_closest(col, oracle_median(col), col.size() - f);
        break;
      case GarKind::Phocas:
        out[j] = oracle_closest(col, oracle_trimmed(col, f), col.size() - f);
        break;
      default: throw std::logic_error("not a column rule");
    }
  }
  return out;
}

std::vector<Vec> random_reports(RandomStream& stream, std::size_t n,
                                std::size_t d, bool integer_grid) {
  std::vector<Vec> reports(n, Vec(d, 0.0));
  for (Vec& r : reports) {
    for (double& x : r) {
      x = integer_grid ? double(stream.next_u64() % 3)
                       : stream.next_standard_normal();
    }
  }
  return reports;
}

}  // namespace

TEST_CASE("kf worked examples") {
  CHECK(kf({GarKind::Mda, 11, 5}) ==
        doctest::Approx(6.0 / (std::sqrt(8.0) * 5.0)).epsilon(1e-12));
  CHECK(kf({GarKind::Mda, 11, 5}) == doctest::Approx(0.42426).epsilon(1e-4));
  CHECK(kf({GarKind::Mda, 11, 0}) == std::numeric_limits<double>::infinity());

  // eta(13,5) = 8 + (5*6 + 25*7)/1 = 213, k = 1/sqrt(426)
  CHECK(kf({GarKind::Krum, 13, 5}) ==
        doctest::Approx(1.0 / std::sqrt(426.0)).epsilon(1e-12));
  CHECK(kf({GarKind::Bulyan, 25, 5}) ==
        doctest::Approx(kf({GarSpec{GarKind::Krum, 25, 5}})).epsilon(1e-12));

  CHECK(kf({GarKind::Median, 11, 5}) ==
        doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(kf({GarKind::Meamed, 11, 5}) ==
        doctest::Approx(1.0 / std::sqrt(60.0)).epsilon(1e-12));
  CHECK(kf({GarKind::TrimmedMean, 11, 5}) ==
        doctest::Approx(std::sqrt(1.0 / 72.0)).epsilon(1e-12));
  CHECK(kf({GarKind::Phocas, 11, 5}) ==
        doctest::Approx(std::sqrt(4.0 + 1.0 / 432.0)).epsilon(1e-12));

  CHECK_THROWS_AS(kf({GarKind::Average, 11, 5}), std::invalid_argument);
}

TEST_CASE("applicability preconditions") {
  CHECK(applicable({GarKind::Mda, 11, 5}));
  CHECK_FALSE(applicable({GarKind::Mda, 10, 5}));
  CHECK(applicable({GarKind::Krum, 13, 5}));
  CHECK_FALSE(applicable({GarKind::Krum, 12, 5}));
  CHECK(applicable({GarKind::Bulyan, 23, 5}));
  CHECK_FALSE(applicable({GarKind::Bulyan, 22, 5}));
  CHECK(applicable({GarKind::Median, 11, 5}));
  CHECK_FALSE(applicable({GarKind::Median, 10, 5}));
  CHECK(applicable({GarKind::TrimmedMean, 11, 5}));
  CHECK_FALSE(applicable({GarKind::TrimmedMean, 10, 5}));
  CHECK_FALSE(applicable({GarKind::Average, 0, 0}));
  CHECK_FALSE(applicable({GarKind::Median, 5, 6}));  // f > n

  try {
    check_applicable({GarKind::Krum, 12, 5});
    FAIL_CHECK("no exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("n >= 2f + 3") != std::string::npos);
  }
}

TEST_CASE("aggregate hand examples") {
  const std::vector<Vec> reports{{0.0}, {1.0}, {2.0}, {3.0}, {10.0}};
  // MDA n=5, f=2: subset {0,1,2} has diameter 2 -> mean 1.
  CHECK(aggregate({GarKind::Mda, 5, 2}, reports)[0] == doctest::Approx(1.0));
  // Median of 5 values.
  CHECK(aggregate({GarKind::Median, 5, 2}, reports)[0] == doctest::Approx(2.0));
  // Trimmed mean drops 2 from each side.
  CHECK(aggregate({GarKind::TrimmedMean, 5, 2}, reports)[0] == doctest::Approx(2.0));
  // Meamed: 3 closest to the median 2 -> {2, 1, 3}.
  CHECK(aggregate({GarKind::Meamed, 5, 2}, reports)[0] == doctest::Approx(2.0));
  // Krum n=5, f=1: q = 2; the tight cluster wins, outlier never does.
  const Vec k = aggregate({GarKind::Krum, 5, 1}, reports);
  CHECK(k[0] != 10.0);
  // Average.
  CHECK(aggregate({GarKind::Average, 5, 0}, reports)[0] == doctest::Approx(3.2));
}

TEST_CASE("bulyan hand example n=7 f=1") {
  // Six clustered reports and one far outlier: theta = 5 Krum selections
  // never pick the outlier, and the per-coordinate stage (beta = 3 closest
  // to the median of the selected) stays inside the cluster.
  std::vector<Vec> reports{{0.0}, {0.1}, {0.2}, {0.3}, {0.4}, {0.5}, {50.0}};
  const Vec out = aggregate({GarKind::Bulyan, 7, 1}, reports);
  CHECK(out[0] > 0.0);
  CHECK(out[0] < 0.5);
  const std::vector<double> sel{0.0, 0.1, 0.2, 0.3, 0.4};  // Krum picks, any order
  // median of any 5 of the cluster is in [0.1, 0.4]; 3 closest average stays
  // within [0.1, 0.4] too.
  CHECK(out[0] >= 0.1);
  CHECK(out[0] <= 0.4);
}

TEST_CASE("aggregate equals independent oracles on random instances") {
  RandomStream stream(41, 0);
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{
      {5, 1}, {5, 2}, {6, 1}, {6, 2}, {7, 1}, {7, 2}, {7, 3}, {4, 1}, {3, 1}};
  int instances = 0;
  for (int rep = 0; rep < 125; ++rep) {
    for (const auto& [n, f] : shapes) {
      const std::size_t d = 1 + stream.next_u64() % 3;
      const bool grid = rep % 4 == 0;  // every 4th instance is tie-heavy
      const auto reports = random_reports(stream, n, d, grid);
      ++instances;

      if (applicable({GarKind::Mda, n, f})) {
        const Vec got = aggregate({GarKind::Mda, n, f}, reports);
        const Vec want = oracle_mda(reports, f);
        for (std::size_t j = 0; j < d; ++j) {
          CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
        }
      }
      if (applicable({GarKind::Krum, n, f})) {
        CHECK(aggregate({GarKind::Krum, n, f}, reports) ==
              oracle_krum(reports, f));
      }
      for (GarKind kind : {GarKind::Median, GarKind::TrimmedMean,
                           GarKind::Meamed, GarKind::Phocas}) {
        if (!applicable({kind, n, f})) continue;
        const Vec got = aggregate({kind, n, f}, reports);
        const Vec want = column_rule(reports, f, kind);
        for (std::size_t j = 0; j < d; ++j) {
          CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
        }
      }
    }
  }
  CHECK(instances >= 1000);
}

TEST_CASE("aggregation properties") {
  RandomStream stream(43, 1);
  const std::vector<GarSpec> specs{
      {GarKind::Mda, 7, 2},    {GarKind::Krum, 7, 2},
      {GarKind::Median, 7, 3}, {GarKind::TrimmedMean, 7, 3},
      {GarKind::Meamed, 7, 3}, {GarKind::Phocas, 7, 3},
      {GarKind::Bulyan, 7, 1}, {GarKind::Average, 7, 0}};
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t d = 2;
    auto reports = random_reports(stream, 7, d, false);
    for (const GarSpec& spec : specs) {
      const Vec base = aggregate(spec, reports);

      // Permutation invariance (reversal). MDA and Bulyan are excluded: both
      // can hit exact score ties on continuous inputs (two subsets sharing a
      // diameter pair; Bulyan's late Krum rounds where q clamps to 0), and
      // ties are broken by worker index, which a permutation relabels.
      if (spec.kind != GarKind::Mda && spec.kind != GarKind::Bulyan) {
        auto reversed = reports;
        std::reverse(reversed.begin(), reversed.end());
        const Vec perm = aggregate(spec, reversed);
        for (std::size_t j = 0; j < d; ++j) {
          CHECK(perm[j] == doctest::Approx(base[j]).epsilon(1e-9));
        }
      }

      // Translation equivariance.
      const Vec shift{3.25, -1.5};
      auto shifted = reports;
      for (Vec& r : shifted) {
        for (std::size_t j = 0; j < d; ++j) r[j] += shift[j];
      }
      const Vec trans = aggregate(spec, shifted);
      for (std::size_t j = 0; j < d; ++j) {
        CHECK(trans[j] == doctest::Approx(base[j] + shift[j]).epsilon(1e-9));
      }

      // Coordinate-wise bounding box of the reports contains the aggregate.
      for (std::size_t j = 0; j < d; ++j) {
        double lo = reports[0][j], hi = reports[0][j];
        for (const Vec& r : reports) {
          lo = std::min(lo, r[j]);
          hi = std::max(hi, r[j]);
        }
        CHECK(base[j] >= lo - 1e-12);
        CHECK(base[j] <= hi + 1e-12);
      }
    }
    // Krum returns one of the reports verbatim.
    const Vec k = aggregate({GarKind::Krum, 7, 2}, reports);
    CHECK(std::find(reports.begin(), reports.end(), k) != reports.end());
  }
}

TEST_CASE("aggregate input validation") {
  const std::vector<Vec> four{{1.0}, {2.0}, {3.0}, {4.0}};
  CHECK_THROWS_AS(aggregate({GarKind::Median, 5, 2}, four), std::invalid_argument);
  const std::vector<Vec> mixed{{1.0}, {2.0, 3.0}, {4.0}, {5.0}, {6.0}};
  CHECK_THROWS_AS(aggregate({GarKind::Median, 5, 2}, mixed), std::invalid_argument);
  CHECK_THROWS_AS(aggregate({GarKind::Krum, 4, 1}, four), std::invalid_argument);
}

TEST_CASE("name round trips") {
  for (GarKind kind : {GarKind::Average, GarKind::Mda, GarKind::Krum,
                       GarKind::Bulyan, GarKind::Median, GarKind::Meamed,
                       GarKind::Phocas, GarKind::TrimmedMean}) {
    CHECK(gar_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(gar_kind_from_string("nonsense"), std::invalid_argument);
}
