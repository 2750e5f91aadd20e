#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dpbyz {

// Dense gradient / parameter vector. The dimension is fixed by the
// enclosing experiment and all public operations keep components finite.
using Vec = std::vector<double>;

double l2_norm(const Vec& v);

// Per-coordinate mean and population (1/N) standard deviation.
// Throws std::invalid_argument on an empty list or mixed lengths.
std::pair<Vec, Vec> coordinate_stats(std::span<const Vec> samples);

// Counter-based deterministic random stream. Two streams with the same
// (master_seed, stream_id) produce the same sequence; distinct stream_ids
// give statistically independent sequences. Copying a stream snapshots its
// state; advancing the counter is the only mutation.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id,
               std::uint64_t counter = 0);

  std::uint64_t next_u64();
  double next_uniform();  // (0, 1]

  // One standard-normal draw via Box-Muller (cos branch), two uniforms
  // per draw so the stream position is a pure function of the draw count.
  double next_standard_normal();

  // d i.i.d. draws from N(0, std^2). std == 0 returns the zero vector
  // without consuming the stream. Non-finite std is a parameter error.
  Vec gaussian_vector(std::size_t d, double std);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t base_;  // mixed (master_seed, stream_id), fixed at construction
  std::uint64_t counter_;
};

// Reserved stream ids. Workers use their own index (0 .. n-1), so
// reserved purposes start well above any realistic worker count.
namespace stream_id {
inline constexpr std::uint64_t kSplit = 1u << 20;
inline constexpr std::uint64_t kTestbed = (1u << 20) + 1;
inline constexpr std::uint64_t kSynthData = (1u << 20) + 2;
inline constexpr std::uint64_t kProbe = (1u << 20) + 3;
}  // namespace stream_id

// Streaming per-coordinate mean/variance (Chan et al. pairwise update).
// Merging two accumulators equals accumulating their samples in any order.
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(std::size_t dim);

  void add(const Vec& sample);
  void merge(const RunningStats& other);

  std::size_t count() const { return count_; }
  const Vec& mean() const { return mean_; }
  Vec variance() const;  // population variance, non-negative per coordinate

 private:
  std::size_t count_ = 0;
  Vec mean_;
  Vec m2_;  // sum of squared deviations from the running mean
};

}  // namespace dpbyz
