#pragma once

// Seeded random sources and the Epanechnikov travel-time distribution.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace mrta {

class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// SplitMix64 finalizer. Used to derive substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_stream(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// Deterministic random source keyed by (seed, stream).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard. Floating-point draws are built from the raw 64-bit words
/// rather than std::uniform_real_distribution, whose algorithm differs
/// between standard library implementations.
class SeededRng {
public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), engine_(combine_stream(seed, stream)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InvalidParameter("SeededRng::below: empty range");
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Epanechnikov distribution with density 3/(4b) (1 - ((x - mu)/b)^2)
/// on [mu - b, mu + b]. A zero half-width denotes a point mass at mu.
struct EpanechnikovDist {
  double mu = 0.0;
  double half_width = 0.0;

  double lower() const noexcept { return mu - half_width; }
  double upper() const noexcept { return mu + half_width; }
  bool degenerate() const noexcept { return half_width <= 0.0; }
  double stddev() const noexcept { return half_width / std::sqrt(5.0); }
};

/// How the "sigma = mu / 3" scale is mapped onto the support.
enum class ScaleConvention {
  kHalfWidth,  // b = sigma
  kTrueStddev  // b = sigma * sqrt(5), so the standard deviation equals sigma
};

inline constexpr double kTravelScaleFactor = 3.0;

inline EpanechnikovDist epan_from_mean(double mu,
                                       ScaleConvention conv = ScaleConvention::kHalfWidth) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidParameter("epan_from_mean: mean must be positive, got " + std::to_string(mu));
  }
  const double sigma = mu / kTravelScaleFactor;
  const double b = conv == ScaleConvention::kHalfWidth ? sigma : sigma * std::sqrt(5.0);
  return {mu, b};
}

/// Travel distribution for a leg with the given mean; a zero mean gives a
/// point mass at zero.
inline EpanechnikovDist travel_distribution(double mu,
                                            ScaleConvention conv = ScaleConvention::kHalfWidth) {
  if (mu == 0.0) return {0.0, 0.0};
  return epan_from_mean(mu, conv);
}

inline double epan_cdf(const EpanechnikovDist& d, double x) noexcept {
  if (d.degenerate()) return x >= d.mu ? 1.0 : 0.0;
  if (x <= d.lower()) return 0.0;
  if (x >= d.upper()) return 1.0;
  const double u = (x - d.mu) / d.half_width;
  return 0.25 * (2.0 + 3.0 * u - u * u * u);
}

/// Closed-form quantile: the root in [-1, 1] of u^3 - 3u + (4q - 2) = 0 is
/// u = 2 sin(asin(2q - 1) / 3).
inline double epan_quantile(const EpanechnikovDist& d, double q) noexcept {
  if (d.degenerate()) return d.mu;
  if (q <= 0.0) return d.lower();
  if (q >= 1.0) return d.upper();
  const double u = 2.0 * std::sin(std::asin(2.0 * q - 1.0) / 3.0);
  return d.mu + d.half_width * u;
}

/// Inverse-CDF sampling, exactly one uniform draw per sample.
inline double epan_sample(const EpanechnikovDist& d, SeededRng& rng) {
  return epan_quantile(d, rng.uniform());
}

}  // namespace mrta
