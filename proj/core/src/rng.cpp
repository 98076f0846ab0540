#include "sbmlab/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "sbmlab/model.hpp"

namespace sbmlab {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(stream ^ 0x6a09e667f3bcc909ULL);
  return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                       static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(stream)};
}

}  // namespace

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq(seed, stream);
  engine_.seed(seq);
}

double RngHandle::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

int RngHandle::below(int n) {
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(engine_);
}

RngHandle RngHandle::spawn(std::uint64_t stream) { return RngHandle(engine_(), stream); }

RngHandle seeded_rng(std::uint64_t seed, std::uint64_t stream) { return RngHandle(seed, stream); }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t double_bits(double x) {
  if (x == 0.0) x = 0.0;  // fold -0 onto +0
  return std::bit_cast<std::uint64_t>(x);
}

double sample_gamma(RngHandle& rng, double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

double sample_beta(RngHandle& rng, double a, double b) {
  const double x = sample_gamma(rng, a);
  const double y = sample_gamma(rng, b);
  if (x + y <= 0.0) return rng.uniform() < a / (a + b) ? 1.0 : 0.0;
  return x / (x + y);
}

std::vector<double> sample_dirichlet(RngHandle& rng, std::span<const double> concentration) {
  std::vector<double> draw(concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < draw.size(); ++i) {
    draw[i] = std::max(sample_gamma(rng, concentration[i]), std::numeric_limits<double>::min());
    total += draw[i];
  }
  for (double& d : draw) d /= total;
  return draw;
}

int sample_log_categorical(RngHandle& rng, std::span<const double> log_weights) {
  if (log_weights.empty()) throw Error("categorical draw over empty support");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(top)) {
    if (top > 0) throw Error("categorical draw with infinite weight");
    return rng.below(static_cast<int>(log_weights.size()));
  }
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - top);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    u -= std::exp(log_weights[i] - top);
    if (u < 0.0) return static_cast<int>(i);
  }
  // Roundoff: fall back to the last index with positive weight.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (log_weights[i] > -std::numeric_limits<double>::infinity()) return static_cast<int>(i);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

}  // namespace sbmlab
