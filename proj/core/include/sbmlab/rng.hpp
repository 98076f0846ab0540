#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace sbmlab {

/// Deterministic random stream keyed by (seed, stream). Move-only: one owner
/// per stream.
class RngHandle {
 public:
  using result_type = std::uint64_t;

  RngHandle(std::uint64_t seed, std::uint64_t stream);

  RngHandle(const RngHandle&) = delete;
  RngHandle& operator=(const RngHandle&) = delete;
  RngHandle(RngHandle&&) noexcept = default;
  RngHandle& operator=(RngHandle&&) noexcept = default;

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer on [0, n).
  int below(int n);

  /// Derives an independent child stream from the next draw of this one.
  RngHandle spawn(std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

RngHandle seeded_rng(std::uint64_t seed, std::uint64_t stream);

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);
/// Order-sensitive hash of a word sequence; used to derive per-task seeds.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);
std::uint64_t double_bits(double x);

double sample_gamma(RngHandle& rng, double shape);
double sample_beta(RngHandle& rng, double a, double b);
std::vector<double> sample_dirichlet(RngHandle& rng, std::span<const double> concentration);
/// Draws an index with probability proportional to exp(log_weights[i]).
int sample_log_categorical(RngHandle& rng, std::span<const double> log_weights);

}  // namespace sbmlab
