#pragma once

// Replication and estimation layer: mergeable accumulators over replica
// observables, mean/variance/covariance estimates with standard errors,
// weighted log-log slope fits for scaling exponents, and an
// empirical-CDF normality check.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "latticeflux/rng.hpp"

namespace lflux::mc {

/// Accumulator over replica observable vectors.
///
/// Rows are keyed by replica index and estimates are always computed in
/// index order, so merging partial accumulators (in any order, from any
/// thread layout) reproduces the pooled-run estimates bit for bit.
class Accumulator {
public:
  Accumulator() = default;
  explicit Accumulator(std::vector<std::string> names) : names_(std::move(names)) {}

  void add(std::uint64_t replica_index, std::vector<double> values);
  void merge(const Accumulator& other);

  std::size_t count() const { return rows_.size(); }
  std::size_t dimension() const;
  const std::vector<std::string>& names() const { return names_; }

  /// Raw samples of one observable, in replica-index order.
  std::vector<double> samples(std::size_t observable) const;

private:
  friend struct Estimates;
  friend Estimates estimate(const Accumulator& acc);

  struct Row {
    std::uint64_t index;
    std::vector<double> values;
  };
  std::vector<std::string> names_;
  mutable std::vector<Row> rows_;
  mutable bool sorted_ = true;

  void sort_rows() const;
};

struct Estimates {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> mean_se;
  std::vector<std::vector<double>> covariance;  // unbiased sample covariance
  std::vector<double> variance_se;              // fourth-moment formula, diagonal
};

/// Means, covariances and standard errors; requires count >= 2.
Estimates estimate(const Accumulator& acc);

struct SeedPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_key(std::uint64_t replica_index) const {
    return derive_key(master_seed, {tag(StreamTag::Replica), replica_index});
  }
};

/// Run `n_replicas` independent replicas of `body`. Each replica gets a
/// counter-derived seed; a throwing replica aborts the run with its index
/// and seed reported in the error message.
Accumulator run_replicas(
    const std::function<std::vector<double>(std::uint64_t replica_index,
                                            std::uint64_t stream_key)>& body,
    std::uint64_t n_replicas, const SeedPolicy& policy,
    std::vector<std::string> names = {});

struct SlopePoint {
  double t;
  double estimate;
  double stderr_;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // residual bootstrap
  std::size_t n_points = 0;
};

/// Weighted least squares of log(estimate) on log(t); weights from the
/// delta-method log-scale standard errors. Requires >= 3 points with
/// positive estimates.
SlopeFit fit_slope(const std::vector<SlopePoint>& series,
                   std::uint64_t bootstrap_seed = 0x5107eULL,
                   int bootstrap_rounds = 400);

struct NormalityResult {
  double statistic = 0.0;  // sup |F_hat - Phi_fitted|
  double threshold = 0.0;
  bool pass = false;
};

/// Empirical-CDF sup-distance to the Gaussian fitted by sample mean and
/// variance. Default threshold is the large-sample Lilliefors critical
/// value at the 1% level, 1.035/sqrt(n). Requires >= 1000 samples.
NormalityResult normality_check(std::vector<double> samples,
                                double threshold_coefficient = 1.035);

}  // namespace lflux::mc
