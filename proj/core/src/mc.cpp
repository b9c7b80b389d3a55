#include "latticeflux/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "latticeflux/errors.hpp"
#include "latticeflux/gauss_limit.hpp"

namespace lflux::mc {

void Accumulator::add(std::uint64_t replica_index, std::vector<double> values) {
  if (!rows_.empty() && values.size() != rows_.front().values.size())
    throw ModelError("Accumulator: inconsistent observable dimension");
  if (!names_.empty() && values.size() != names_.size())
    throw ModelError("Accumulator: dimension does not match observable names");
  if (!rows_.empty() && replica_index <= rows_.back().index) sorted_ = false;
  rows_.push_back({replica_index, std::move(values)});
}

void Accumulator::merge(const Accumulator& other) {
  if (names_.empty()) names_ = other.names_;
  for (const Row& r : other.rows_) add(r.index, r.values);
}

std::size_t Accumulator::dimension() const {
  if (!rows_.empty()) return rows_.front().values.size();
  return names_.size();
}

void Accumulator::sort_rows() const {
  if (sorted_) return;
  std::stable_sort(rows_.begin(), rows_.end(),
                   [](const Row& a, const Row& b) { return a.index < b.index; });
  sorted_ = true;
}

std::vector<double> Accumulator::samples(std::size_t observable) const {
  sort_rows();
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const Row& r : rows_) out.push_back(r.values.at(observable));
  return out;
}

Estimates estimate(const Accumulator& acc) {
  if (acc.count() < 2) throw ModelError("estimate: need at least 2 replicas");
  acc.sort_rows();
  const std::size_t n = acc.count();
  const std::size_t d = acc.dimension();
  Estimates est;
  est.count = n;
  est.mean.assign(d, 0.0);
  for (const auto& row : acc.rows_)
    for (std::size_t i = 0; i < d; ++i) est.mean[i] += row.values[i];
  for (std::size_t i = 0; i < d; ++i) est.mean[i] /= static_cast<double>(n);

  est.covariance.assign(d, std::vector<double>(d, 0.0));
  std::vector<double> m4(d, 0.0);
  for (const auto& row : acc.rows_) {
    for (std::size_t i = 0; i < d; ++i) {
      double di = row.values[i] - est.mean[i];
      m4[i] += di * di * di * di;
      for (std::size_t j = i; j < d; ++j)
        est.covariance[i][j] += di * (row.values[j] - est.mean[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      est.covariance[i][j] /= static_cast<double>(n - 1);
      est.covariance[j][i] = est.covariance[i][j];
    }
    m4[i] /= static_cast<double>(n);
  }
  est.mean_se.resize(d);
  est.variance_se.resize(d);
  double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i) {
    double s2 = est.covariance[i][i];
    est.mean_se[i] = std::sqrt(std::max(0.0, s2) / dn);
    // Var(s^2) ~ (m4 - (n-3)/(n-1) s^4)/n
    double vv = (m4[i] - (dn - 3.0) / (dn - 1.0) * s2 * s2) / dn;
    est.variance_se[i] = std::sqrt(std::max(0.0, vv));
  }
  return est;
}

Accumulator run_replicas(
    const std::function<std::vector<double>(std::uint64_t, std::uint64_t)>& body,
    std::uint64_t n_replicas, const SeedPolicy& policy,
    std::vector<std::string> names) {
  Accumulator acc(std::move(names));
  for (std::uint64_t r = 0; r < n_replicas; ++r) {
    std::uint64_t key = policy.replica_key(r);
    try {
      acc.add(r, body(r, key));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "replica " << r << " (stream key " << key << ") failed: " << e.what();
      throw ModelError(msg.str());
    }
  }
  return acc;
}

namespace {

struct Wls {
  double slope;
  double intercept;
};

Wls weighted_ls(const std::vector<double>& x, const std::vector<double>& y,
                const std::vector<double>& w) {
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  double det = sw * swxx - swx * swx;
  double slope = (sw * swxy - swx * swy) / det;
  double intercept = (swy - slope * swx) / sw;
  return {slope, intercept};
}

}  // namespace

SlopeFit fit_slope(const std::vector<SlopePoint>& series, std::uint64_t bootstrap_seed,
                   int bootstrap_rounds) {
  if (series.size() < 3) throw ModelError("fit_slope: need at least 3 points");
  std::vector<double> x, y, w;
  for (const auto& p : series) {
    if (!(p.estimate > 0.0))
      throw ModelError("fit_slope: nonpositive estimate at t=" + std::to_string(p.t));
    x.push_back(std::log(p.t));
    y.push_back(std::log(p.estimate));
    double se_log = p.stderr_ > 0.0 ? p.stderr_ / p.estimate : 0.0;
    w.push_back(se_log > 0.0 ? 1.0 / (se_log * se_log) : 1.0);
  }
  if (std::any_of(series.begin(), series.end(),
                  [](const SlopePoint& p) { return p.stderr_ > 0.0; })) {
    // Mixed zero/nonzero SEs would give infinite relative weight; treat
    // zero-SE points as exact by giving them the largest finite weight.
    double wmax = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!(series[i].stderr_ > 0.0)) w[i] = wmax;
  }

  Wls base = weighted_ls(x, y, w);
  SlopeFit fit;
  fit.slope = base.slope;
  fit.intercept = base.intercept;
  fit.n_points = series.size();

  std::vector<double> resid(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    resid[i] = y[i] - (base.intercept + base.slope * x[i]);

  CounterRng rng(derive_key(bootstrap_seed, {tag(StreamTag::Scratch)}));
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> yb(x.size());
  for (int round = 0; round < bootstrap_rounds; ++round) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::size_t j = static_cast<std::size_t>(rng.next_u64() % resid.size());
      yb[i] = base.intercept + base.slope * x[i] + resid[j];
    }
    double s = weighted_ls(x, yb, w).slope;
    sum += s;
    sumsq += s * s;
  }
  double mb = sum / bootstrap_rounds;
  fit.slope_se = std::sqrt(std::max(0.0, sumsq / bootstrap_rounds - mb * mb));
  return fit;
}

NormalityResult normality_check(std::vector<double> samples,
                                double threshold_coefficient) {
  if (samples.size() < 1000)
    throw ModelError("normality_check: need at least 1000 samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= (n - 1.0);
  if (!(var > 0.0)) throw ModelError("normality_check: degenerate sample variance");

  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = gauss::normal_cdf(samples[i] - mean, var);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  NormalityResult res;
  res.statistic = d;
  res.threshold = threshold_coefficient / std::sqrt(n);
  res.pass = d <= res.threshold;
  return res;
}

}  // namespace lflux::mc
