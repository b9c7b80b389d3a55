#include "latticeflux/iid_current.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latticeflux/errors.hpp"

namespace lflux::iid {

namespace {
constexpr long kMaxLawEntries = 8'000'000;

long floor_threshold(long n, double t, double r, double v) {
  // floor(ntv) + r sqrt(n), indicator evaluated on reals; for integer
  // walkers the effective cutoff is the floor of the real threshold.
  double c = std::floor(static_cast<double>(n) * t * v) +
             r * std::sqrt(static_cast<double>(n));
  return static_cast<long>(std::floor(c));
}
}  // namespace

JumpKernel::JumpKernel(std::vector<long> steps, std::vector<double> probs)
    : steps_(std::move(steps)), probs_(std::move(probs)) {
  if (steps_.empty() || steps_.size() != probs_.size())
    throw ModelError("JumpKernel: steps/probs size mismatch or empty");
  std::vector<std::size_t> order(steps_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return steps_[a] < steps_[b]; });
  std::vector<long> s;
  std::vector<double> p;
  for (std::size_t i : order) {
    if (!s.empty() && steps_[i] == s.back())
      throw ModelError("JumpKernel: duplicate step value");
    s.push_back(steps_[i]);
    p.push_back(probs_[i]);
  }
  steps_ = std::move(s);
  probs_ = std::move(p);

  double sum = 0.0;
  for (double x : probs_) {
    if (x < 0.0) throw ModelError("JumpKernel: negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ModelError("JumpKernel: probabilities do not sum to 1");
  for (double& x : probs_) x /= sum;

  for (std::size_t i = 0; i < steps_.size(); ++i)
    mean_ += static_cast<double>(steps_[i]) * probs_[i];
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    double d = static_cast<double>(steps_[i]) - mean_;
    variance_ += d * d * probs_[i];
  }
  span_ = 0;
  for (std::size_t i = 1; i < steps_.size(); ++i)
    span_ = std::gcd(span_, std::abs(steps_[i] - steps_[0]));
  if (span_ == 0) span_ = 1;  // single-point support
}

long JumpKernel::max_abs_step() const {
  return std::max(std::abs(min_step()), std::abs(max_step()));
}

std::pair<double, double> kernel_moments(const JumpKernel& k) {
  return {k.mean(), k.variance()};
}

InitialLaw InitialLaw::poisson(double mu) {
  if (mu < 0.0) throw ModelError("InitialLaw: negative Poisson mean");
  return InitialLaw(Kind::Poisson, mu, mu, mu);
}

InitialLaw InitialLaw::bernoulli(double rho) {
  if (rho < 0.0 || rho > 1.0) throw ModelError("InitialLaw: rho outside [0,1]");
  return InitialLaw(Kind::Bernoulli, rho, rho, rho * (1.0 - rho));
}

InitialLaw InitialLaw::geometric(double mean) {
  if (mean < 0.0) throw ModelError("InitialLaw: negative geometric mean");
  return InitialLaw(Kind::Geometric, mean, mean, mean * (1.0 + mean));
}

InitialLaw InitialLaw::deterministic(long count) {
  if (count < 0) throw ModelError("InitialLaw: negative count");
  return InitialLaw(Kind::Deterministic, static_cast<double>(count),
                    static_cast<double>(count), 0.0);
}

long InitialLaw::sample(CounterRng& rng) const {
  switch (kind_) {
    case Kind::Poisson:
      return rng.next_poisson(param_);
    case Kind::Bernoulli:
      return rng.next_bernoulli(param_) ? 1 : 0;
    case Kind::Geometric: {
      if (param_ == 0.0) return 0;
      double beta = param_ / (1.0 + param_);  // P(k) = (1-beta) beta^k
      return rng.next_geometric(1.0 - beta);
    }
    case Kind::Deterministic:
      return static_cast<long>(param_);
  }
  return 0;
}

double WalkLaw::mass() const { return std::accumulate(pmf.begin(), pmf.end(), 0.0); }

double WalkLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i)
    m += static_cast<double>(offset + static_cast<long>(i)) * pmf[i];
  return m;
}

double WalkLaw::tail(long c) const {
  long hi = offset + static_cast<long>(pmf.size()) - 1;
  if (c >= hi) return 0.0;
  if (c < offset) return 1.0;
  double s = 0.0;
  for (long x = c + 1; x <= hi; ++x) s += pmf[static_cast<std::size_t>(x - offset)];
  return s;
}

double WalkLaw::low(long c) const {
  long hi = offset + static_cast<long>(pmf.size()) - 1;
  if (c >= hi) return 1.0;
  if (c < offset) return 0.0;
  double s = 0.0;
  for (long x = offset; x <= c; ++x) s += pmf[static_cast<std::size_t>(x - offset)];
  return s;
}

std::vector<WalkLaw> exact_walk_laws(const JumpKernel& k,
                                     const std::vector<long>& steps) {
  std::vector<long> sorted = steps;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 0)
    throw ModelError("exact_walk_law: negative step count");
  if (!sorted.empty()) {
    long span = k.max_step() - k.min_step();
    long entries = sorted.back() * span + 1;
    if (entries > kMaxLawEntries)
      throw ResourceError("exact_walk_law: support exceeds memory budget");
  }

  std::vector<WalkLaw> snapshots;
  WalkLaw cur;
  cur.offset = 0;
  cur.pmf = {1.0};
  long done = 0;
  for (long target : sorted) {
    while (done < target) {
      WalkLaw next;
      next.offset = cur.offset + k.min_step();
      next.pmf.assign(
          cur.pmf.size() + static_cast<std::size_t>(k.max_step() - k.min_step()), 0.0);
      for (std::size_t i = 0; i < cur.pmf.size(); ++i) {
        double w = cur.pmf[i];
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < k.steps().size(); ++j)
          next.pmf[i + static_cast<std::size_t>(k.steps()[j] - k.min_step())] +=
              w * k.probs()[j];
      }
      cur = std::move(next);
      ++done;
    }
    snapshots.push_back(cur);
  }
  std::vector<WalkLaw> reordered(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), steps[i]);
    reordered[i] = snapshots[static_cast<std::size_t>(it - sorted.begin())];
  }
  return reordered;
}

WalkLaw exact_walk_law(const JumpKernel& k, long steps) {
  return exact_walk_laws(k, {steps}).front();
}

namespace {

// O(1) tail/low lookups plus their cumulative sums, with the exact
// linear extensions outside the support.
struct LawTables {
  long lo, hi;
  std::vector<double> tail_;      // P(X > c), c in [lo-1, hi]
  std::vector<double> low_;       // P(X <= c), c in [lo, hi+1]
  std::vector<double> cum_tail_;  // sum_{k>=c} tail(k), c in [lo-1, hi]
  std::vector<double> cum_low_;   // sum_{k<=c} low(k),  c in [lo, hi+1]

  explicit LawTables(const WalkLaw& w) {
    lo = w.offset;
    hi = w.offset + static_cast<long>(w.pmf.size()) - 1;
    std::size_t len = static_cast<std::size_t>(hi - lo + 2);
    tail_.assign(len, 0.0);
    low_.assign(len, 0.0);
    double acc = 0.0;
    for (long c = hi; c >= lo - 1; --c) {
      if (c + 1 <= hi) acc += w.pmf[static_cast<std::size_t>(c + 1 - lo)];
      tail_[static_cast<std::size_t>(c - (lo - 1))] = acc;
    }
    acc = 0.0;
    for (long c = lo; c <= hi + 1; ++c) {
      if (c <= hi) acc += w.pmf[static_cast<std::size_t>(c - lo)];
      low_[static_cast<std::size_t>(c - lo)] = acc;
    }
    cum_tail_.assign(len, 0.0);
    double s = 0.0;
    for (long c = hi; c >= lo - 1; --c) {
      s += tail_[static_cast<std::size_t>(c - (lo - 1))];
      cum_tail_[static_cast<std::size_t>(c - (lo - 1))] = s;
    }
    cum_low_.assign(len, 0.0);
    s = 0.0;
    for (long c = lo; c <= hi + 1; ++c) {
      s += low_[static_cast<std::size_t>(c - lo)];
      cum_low_[static_cast<std::size_t>(c - lo)] = s;
    }
  }

  double tail(long c) const {
    if (c >= hi) return 0.0;
    if (c < lo) return 1.0;
    return tail_[static_cast<std::size_t>(c - (lo - 1))];
  }
  double low(long c) const {
    if (c >= hi) return 1.0;
    if (c < lo) return 0.0;
    return low_[static_cast<std::size_t>(c - lo)];
  }
  // sum_{k >= c} P(X > k); equals (lo-1-c) + value at lo-1 below the support.
  double ct(long c) const {
    if (c > hi) return 0.0;
    if (c < lo - 1) return cum_tail_.front() + static_cast<double>(lo - 1 - c);
    return cum_tail_[static_cast<std::size_t>(c - (lo - 1))];
  }
  // sum_{k <= c} P(X <= k); equals value at hi+1 plus (c-hi-1) above.
  double cl(long c) const {
    if (c < lo) return 0.0;
    if (c > hi + 1) return cum_low_.back() + static_cast<double>(c - (hi + 1));
    return cum_low_[static_cast<std::size_t>(c - lo)];
  }
};

}  // namespace

CurrentMoments exact_current_moments(const JumpKernel& k, const InitialLaw& law,
                                     long n,
                                     const std::vector<gauss::SpaceTimePoint>& points) {
  if (points.size() > 8)
    throw ResourceError("exact_current_moments: more than 8 points");
  if (n <= 0) throw ModelError("exact_current_moments: n must be positive");
  const std::size_t np = points.size();
  const double v = k.mean();
  const double mu = law.mu_bar();
  const double s0 = law.sigma0_sq();

  std::vector<long> steps(np), thr(np);
  for (std::size_t i = 0; i < np; ++i) {
    if (points[i].t < 0.0) throw ModelError("exact_current_moments: negative time");
    steps[i] = static_cast<long>(std::floor(static_cast<double>(n) * points[i].t));
    thr[i] = floor_threshold(n, points[i].t, points[i].r, v);
  }

  // Walk laws at each distinct step count and at each needed gap.
  std::vector<long> wanted(steps);
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = 0; b < np; ++b)
      if (steps[b] >= steps[a]) wanted.push_back(steps[b] - steps[a]);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  std::vector<WalkLaw> laws = exact_walk_laws(k, wanted);
  std::vector<LawTables> tables;
  tables.reserve(laws.size());
  for (const WalkLaw& w : laws) tables.emplace_back(w);
  auto idx_of = [&](long s) {
    return static_cast<std::size_t>(
        std::lower_bound(wanted.begin(), wanted.end(), s) - wanted.begin());
  };

  CurrentMoments out;
  out.mean.assign(np, 0.0);
  out.covariance.assign(np, std::vector<double>(np, 0.0));

  // Means: mu * [ sum_{m<=0} P(X^m_s > A) - sum_{m>0} P(X^m_s <= A) ].
  for (std::size_t i = 0; i < np; ++i) {
    const LawTables& tb = tables[idx_of(steps[i])];
    double acc = 0.0;
    // m <= 0: tail(A-m) vanishes for m <= A - hi and equals 1 for m > A - lo.
    for (long m = std::min<long>(0, thr[i] - tb.lo); m > thr[i] - tb.hi && m <= 0; --m)
      acc += tb.tail(thr[i] - m);
    if (thr[i] - tb.lo < 0) acc += static_cast<double>(-(thr[i] - tb.lo));  // certain sites
    // m > 0: low(A-m) vanishes for m > A - lo (and equals 1 for m <= A - hi).
    for (long m = 1; m <= thr[i] - tb.lo; ++m) acc -= tb.low(thr[i] - m);
    out.mean[i] = mu * acc;
  }

  // Covariances via the random-sum formula: per start site m,
  //   Cov_m = mu*(joint - prod) + sigma0^2 * prod,
  // with the site sums of joint probabilities collapsed through
  // cumulative-tail identities (O(support) per pair of points).
  for (std::size_t ia = 0; ia < np; ++ia) {
    for (std::size_t ib = ia; ib < np; ++ib) {
      std::size_t i = ia, j = ib;
      if (steps[j] < steps[i]) std::swap(i, j);
      const long s = steps[i], u = steps[j];
      const long Ai = thr[i], Aj = thr[j];
      const WalkLaw& ws = laws[idx_of(s)];
      const LawTables& ts = tables[idx_of(s)];
      const LawTables& tu = tables[idx_of(u)];
      const LawTables& td = tables[idx_of(u - s)];

      double prod_neg = 0.0;  // sum_{m<=0} T_i(m) T_j(m)
      {
        long m_min = std::max(Ai - ts.hi, Aj - tu.hi) + 1;
        for (long m = 0; m >= m_min; --m)
          prod_neg += ts.tail(Ai - m) * tu.tail(Aj - m);
      }
      double prod_pos = 0.0;  // sum_{m>0} L_i(m) L_j(m)
      {
        long m_max = std::min(Ai - ts.lo, Aj - tu.lo);
        for (long m = 1; m <= m_max; ++m)
          prod_pos += ts.low(Ai - m) * tu.low(Aj - m);
      }

      // sum_{m<=0} P(X^m_s > Ai, X^m_u > Aj)
      double joint_neg = 0.0;
      {
        double ct_ref = td.ct(Aj - Ai);
        for (long y = std::max(Ai + 1, ts.lo); y <= ts.hi; ++y) {
          double wy = ws.pmf[static_cast<std::size_t>(y - ts.lo)];
          if (wy == 0.0) continue;
          joint_neg += wy * (td.ct(Aj - y) - ct_ref);
        }
      }
      // sum_{m>0} P(X^m_s <= Ai, X^m_u <= Aj)
      double joint_pos = 0.0;
      {
        double cl_ref = td.cl(Aj - Ai - 1);
        for (long y = ts.lo; y <= std::min(Ai - 1, ts.hi); ++y) {
          double wy = ws.pmf[static_cast<std::size_t>(y - ts.lo)];
          if (wy == 0.0) continue;
          joint_pos += wy * (td.cl(Aj - y - 1) - cl_ref);
        }
      }

      double cov = mu * (joint_neg - prod_neg + joint_pos - prod_pos) +
                   s0 * (prod_neg + prod_pos);
      out.covariance[ia][ib] = cov;
      out.covariance[ib][ia] = cov;
    }
  }
  return out;
}

CurrentSimulator::CurrentSimulator(JumpKernel kernel, InitialLaw law, long n,
                                   std::vector<gauss::SpaceTimePoint> points,
                                   WindowSpec window)
    : kernel_(std::move(kernel)), law_(law), n_(n), points_(std::move(points)) {
  if (n_ <= 0) throw ModelError("CurrentSimulator: n must be positive");
  const double v = kernel_.mean();

  std::vector<long> steps(points_.size());
  thresholds_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    steps[i] = static_cast<long>(std::floor(static_cast<double>(n_) * points_[i].t));
    thresholds_[i] = floor_threshold(n_, points_[i].t, points_[i].r, v);
  }

  sorted_steps_ = steps;
  std::sort(sorted_steps_.begin(), sorted_steps_.end());
  sorted_steps_.erase(std::unique(sorted_steps_.begin(), sorted_steps_.end()),
                      sorted_steps_.end());
  point_gap_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    point_gap_[i] = static_cast<std::size_t>(
        std::lower_bound(sorted_steps_.begin(), sorted_steps_.end(), steps[i]) -
        sorted_steps_.begin());

  // Inter-time gap laws and their CDFs for endpoint sampling. Sampling
  // the exact convolution law is the same process as stepping the walk;
  // only the amount of randomness consumed differs.
  std::vector<long> gaps;
  long prev = 0;
  for (long s : sorted_steps_) {
    gaps.push_back(s - prev);
    prev = s;
  }
  std::vector<WalkLaw> laws = exact_walk_laws(kernel_, gaps);
  for (const WalkLaw& w : laws) {
    gap_offsets_.push_back(w.offset);
    std::vector<double> cdf(w.pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.pmf.size(); ++i) {
      acc += w.pmf[i];
      cdf[i] = acc;
    }
    if (!cdf.empty()) cdf.back() = 1.0;
    gap_cdfs_.push_back(std::move(cdf));
  }

  // Exact light cone: only sites in [m_lo, m_hi] can contribute a
  // non-deterministic or nonzero term. Walkers from m <= 0 contribute
  // +1{X > A}; certain crossings (m > A - s*min_step) can only occur for
  // m <= 0 if A < s*min_step, handled below by clamping.
  long r_max = kernel_.max_abs_step();
  m_lo_ = 0;
  m_hi_ = 0;
  required_half_width_ = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    long s = steps[i];
    m_lo_ = std::min(m_lo_, thresholds_[i] - s * kernel_.max_step());
    m_hi_ = std::max(m_hi_, thresholds_[i] - s * kernel_.min_step());
    required_half_width_ =
        std::max(required_half_width_, std::abs(thresholds_[i]) + r_max * s);
  }
  m_hi_ = std::max(m_hi_, 0L);
  m_lo_ = std::min(m_lo_, 0L);
  half_width_ = window.half_width.value_or(required_half_width_);
  if (half_width_ < std::max(std::abs(m_lo_), std::abs(m_hi_)))
    throw WindowError(
        "CurrentSimulator: window half-width " + std::to_string(half_width_) +
        " smaller than light cone " +
        std::to_string(std::max(std::abs(m_lo_), std::abs(m_hi_))));

  oracle_means_ = exact_current_moments(kernel_, law_, n_, points_).mean;
}

CurrentSample CurrentSimulator::sample(std::uint64_t seed) const {
  CurrentSample out;
  out.n = n_;
  out.points = points_;
  out.values.assign(points_.size(), 0);

  constexpr std::uint64_t kSiteBias = 1ULL << 40;  // site ids made nonnegative
  for (long m = m_lo_; m <= m_hi_; ++m) {
    CounterRng init_rng(derive_key(
        seed, {tag(StreamTag::InitialState), static_cast<std::uint64_t>(m) + kSiteBias}));
    long count = law_.sample(init_rng);
    for (long w = 0; w < count; ++w) {
      CounterRng walk_rng(derive_key(
          seed, {tag(StreamTag::Walker), static_cast<std::uint64_t>(m) + kSiteBias,
                 static_cast<std::uint64_t>(w)}));
      long pos = m;
      for (std::size_t g = 0; g < gap_cdfs_.size(); ++g) {
        const std::vector<double>& cdf = gap_cdfs_[g];
        if (cdf.size() > 1) {
          double u = walk_rng.next_uniform();
          std::size_t idx = static_cast<std::size_t>(
              std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          if (idx >= cdf.size()) idx = cdf.size() - 1;
          pos += gap_offsets_[g] + static_cast<long>(idx);
        } else if (cdf.size() == 1) {
          pos += gap_offsets_[g];
        }
        for (std::size_t p = 0; p < points_.size(); ++p) {
          if (point_gap_[p] != g) continue;
          if (m <= 0) {
            if (pos > thresholds_[p]) out.values[p] += 1;
          } else {
            if (pos <= thresholds_[p]) out.values[p] -= 1;
          }
        }
      }
    }
  }

  out.centered_scaled.resize(points_.size());
  double scale = std::pow(static_cast<double>(n_), -0.25);
  for (std::size_t p = 0; p < points_.size(); ++p)
    out.centered_scaled[p] =
        scale * (static_cast<double>(out.values[p]) - oracle_means_[p]);
  return out;
}

CurrentSample simulate_current(const JumpKernel& k, const InitialLaw& law, long n,
                               const std::vector<gauss::SpaceTimePoint>& points,
                               WindowSpec window, std::uint64_t seed) {
  CurrentSimulator sim(k, law, n, points, window);
  return sim.sample(seed);
}

}  // namespace lflux::iid
