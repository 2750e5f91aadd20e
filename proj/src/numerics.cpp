#include "dpbyz/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpbyz {

namespace {

// splitmix64 finalizer; full-avalanche mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

double l2_norm(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

std::pair<Vec, Vec> coordinate_stats(std::span<const Vec> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("coordinate_stats: empty sample list");
  }
  const std::size_t d = samples.front().size();
  for (const Vec& s : samples) {
    if (s.size() != d) {
      throw std::invalid_argument("coordinate_stats: mixed vector lengths");
    }
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  Vec mean(d, 0.0);
  for (const Vec& s : samples) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += s[j];
  }
  for (double& m : mean) m *= inv_n;
  Vec std_dev(d, 0.0);
  for (const Vec& s : samples) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = s[j] - mean[j];
      std_dev[j] += dev * dev;
    }
  }
  for (double& v : std_dev) v = std::sqrt(v * inv_n);
  return {std::move(mean), std::move(std_dev)};
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id,
                           std::uint64_t counter)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      base_(mix64(mix64(master_seed) ^ mix64(stream_id + 0x6a09e667f3bcc909ull))),
      counter_(counter) {}

std::uint64_t RandomStream::next_u64() {
  return mix64(base_ ^ mix64(counter_++));
}

double RandomStream::next_uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() below is always finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_standard_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Vec RandomStream::gaussian_vector(std::size_t d, double std) {
  if (d == 0) throw std::invalid_argument("gaussian_vector: d must be >= 1");
  if (!std::isfinite(std) || std < 0.0) {
    throw std::invalid_argument("gaussian_vector: std must be finite and >= 0");
  }
  Vec out(d, 0.0);
  if (std == 0.0) return out;
  for (double& x : out) x = std * next_standard_normal();
  return out;
}

RunningStats::RunningStats(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

void RunningStats::add(const Vec& sample) {
  if (count_ == 0 && mean_.empty()) {
    mean_.assign(sample.size(), 0.0);
    m2_.assign(sample.size(), 0.0);
  }
  if (sample.size() != mean_.size()) {
    throw std::invalid_argument("RunningStats: dimension mismatch");
  }
  ++count_;
  const double inv_n = 1.0 / static_cast<double>(count_);
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double delta = sample[j] - mean_[j];
    mean_[j] += delta * inv_n;
    m2_[j] += delta * (sample[j] - mean_[j]);
  }
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.mean_.size() != mean_.size()) {
    throw std::invalid_argument("RunningStats: dimension mismatch in merge");
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double delta = other.mean_[j] - mean_[j];
    mean_[j] += delta * nb / n;
    m2_[j] += other.m2_[j] + delta * delta * na * nb / n;
  }
  count_ += other.count_;
}

Vec RunningStats::variance() const {
  Vec var(mean_.size(), 0.0);
  if (count_ == 0) return var;
  const double inv_n = 1.0 / static_cast<double>(count_);
  for (std::size_t j = 0; j < var.size(); ++j) {
    var[j] = m2_[j] > 0.0 ? m2_[j] * inv_n : 0.0;
  }
  return var;
}

}  // namespace dpbyz
