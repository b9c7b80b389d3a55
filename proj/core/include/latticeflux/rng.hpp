#pragma once

// Counter-based random number streams.
//
// Every random quantity in the library is a pure function of
// (master seed, key path, counter). Streams keyed by stable ids
// (edge index, site, replica number) are independent of window
// size and of the order in which other streams are consumed, which
// is what makes couplings exact and window-doubling a no-op.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lflux {

namespace detail {

// splitmix64 finalizer; full-period 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

}  // namespace detail

/// Derive a stream key from the master seed and a path of stable ids.
inline std::uint64_t derive_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = detail::mix64(seed);
  for (std::uint64_t p : path) k = detail::combine(k, p);
  return k;
}

/// Tags keeping unrelated stream families disjoint.
enum class StreamTag : std::uint64_t {
  Replica = 1,
  EdgeClock = 2,
  SiteClock = 3,
  AuxClock = 4,
  InitialState = 5,
  Weights = 6,
  Walker = 7,
  LabelRefresh = 8,
  Scratch = 9,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

/// A sequential view of one counter-based stream.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key), counter_(0) {}

  std::uint64_t next_u64() { return detail::combine(key_, counter_++); }

  /// Uniform in (0,1); never returns 0 or 1.
  double next_uniform() {
    // 53 random bits, shifted into (0,1) by a half-ulp offset.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential(double rate) { return -std::log(next_uniform()) / rate; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    spare_ = m * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return m * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool next_bernoulli(double p) { return next_uniform() < p; }

  /// Poisson by inversion (product form); fine for the small means used here.
  long next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    double l = std::exp(-mean);
    long k = 0;
    double prod = next_uniform();
    while (prod > l) {
      prod *= next_uniform();
      ++k;
    }
    return k;
  }

  /// Geometric on {0,1,2,...} with success probability p.
  long next_geometric(double p) {
    double u = next_uniform();
    return static_cast<long>(std::floor(std::log(u) / std::log1p(-p)));
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      double u = next_uniform();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = next_uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    double x = next_gamma(a);
    double y = next_gamma(b);
    return x / (x + y);
  }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lflux
