#pragma once

// Discrete-time independent-walkers current: simulator plus an exact
// finite-n oracle for the mean and covariance of the current observed
// along the characteristic, computed from convolution powers of the
// step kernel and the random-sum covariance formula.

#include <cstdint>
#include <optional>
#include <vector>

#include "latticeflux/gauss_limit.hpp"
#include "latticeflux/rng.hpp"

namespace lflux::iid {

/// Finite-support step distribution on the integers.
class JumpKernel {
public:
  JumpKernel(std::vector<long> steps, std::vector<double> probs);

  const std::vector<long>& steps() const { return steps_; }
  const std::vector<double>& probs() const { return probs_; }
  long min_step() const { return steps_.front(); }
  long max_step() const { return steps_.back(); }
  long max_abs_step() const;

  double mean() const { return mean_; }          // v
  double variance() const { return variance_; }  // sigma1^2

  /// Lattice span of the walk (gcd of support differences); 1 means
  /// aperiodic in the potential-kernel sense. Informational here; the
  /// random average process construction enforces span 1.
  long span() const { return span_; }

private:
  std::vector<long> steps_;
  std::vector<double> probs_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  long span_ = 1;
};

/// (v, sigma1^2) of the kernel.
std::pair<double, double> kernel_moments(const JumpKernel& k);

/// i.i.d. initial occupation law with matching (mu_bar, sigma0_sq).
class InitialLaw {
public:
  enum class Kind { Poisson, Bernoulli, Geometric, Deterministic };

  static InitialLaw poisson(double mu);
  static InitialLaw bernoulli(double rho);
  /// Geometric on {0,1,...} with the given mean m (variance m(1+m)).
  static InitialLaw geometric(double mean);
  static InitialLaw deterministic(long count);

  Kind kind() const { return kind_; }
  double mu_bar() const { return mu_bar_; }
  double sigma0_sq() const { return sigma0_sq_; }
  long sample(CounterRng& rng) const;

private:
  InitialLaw(Kind k, double param, double mu, double var)
      : kind_(k), param_(param), mu_bar_(mu), sigma0_sq_(var) {}
  Kind kind_;
  double param_;
  double mu_bar_;
  double sigma0_sq_;
};

/// Exact s-step law of the walk started at 0: pmf over [offset, offset+size).
struct WalkLaw {
  long offset = 0;
  std::vector<double> pmf;

  double mass() const;
  double mean() const;
  /// P(X > c) for integer c.
  double tail(long c) const;
  /// P(X <= c) for integer c.
  double low(long c) const;
};

/// s-fold convolution power of the kernel. Throws ResourceError when the
/// support would exceed the entry budget.
WalkLaw exact_walk_law(const JumpKernel& k, long steps);

/// Walk laws at several step counts in one incremental pass.
std::vector<WalkLaw> exact_walk_laws(const JumpKernel& k,
                                     const std::vector<long>& steps);

struct CurrentMoments {
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;
};

/// Exact finite-n mean vector and covariance matrix of
/// {Y_n(t_i, r_i)} under the given kernel and initial law.
/// Point count capped at 8.
CurrentMoments exact_current_moments(const JumpKernel& k, const InitialLaw& law,
                                     long n,
                                     const std::vector<gauss::SpaceTimePoint>& points);

struct CurrentSample {
  long n = 0;
  std::vector<gauss::SpaceTimePoint> points;
  std::vector<long> values;            // raw Y_n(t,r)
  std::vector<double> centered_scaled; // n^{-1/4} (Y - exact mean)
};

/// Lattice window [-L, L] for the walker cloud. `half_width` may be
/// omitted to use the exact light-cone bound.
struct WindowSpec {
  std::optional<long> half_width;
};

/// Precomputes walk laws, thresholds and the oracle means once, then
/// draws independent replicas. Instances are immutable after
/// construction; sampling is a pure function of the seed.
class CurrentSimulator {
public:
  CurrentSimulator(JumpKernel kernel, InitialLaw law, long n,
                   std::vector<gauss::SpaceTimePoint> points, WindowSpec window = {});

  CurrentSample sample(std::uint64_t seed) const;

  long required_half_width() const { return required_half_width_; }
  const std::vector<double>& oracle_means() const { return oracle_means_; }

private:
  JumpKernel kernel_;
  InitialLaw law_;
  long n_;
  std::vector<gauss::SpaceTimePoint> points_;
  long half_width_;
  long required_half_width_;

  std::vector<long> sorted_steps_;       // unique step counts, ascending
  std::vector<std::vector<double>> gap_cdfs_;  // CDF of each inter-time gap law
  std::vector<long> gap_offsets_;
  std::vector<long> thresholds_;         // floor(ntv + r sqrt(n)) per point
  std::vector<std::size_t> point_gap_;   // point -> index in sorted_steps_
  std::vector<double> oracle_means_;
  long m_lo_ = 0, m_hi_ = 0;             // sites that can contribute
};

/// One-replica convenience wrapper around CurrentSimulator.
CurrentSample simulate_current(const JumpKernel& k, const InitialLaw& law, long n,
                               const std::vector<gauss::SpaceTimePoint>& points,
                               WindowSpec window, std::uint64_t seed);

}  // namespace lflux::iid
