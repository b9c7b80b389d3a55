#pragma once

// Closed-form limit objects for the Edwards-Wilkinson class: centered
// Gaussian kernels, the tail functional psi, the two covariance kernels
// gamma1/gamma2 with their integral cross-check forms, the composite
// covariances for i.i.d.-walk and random-average-process currents, and
// the exclusion flux / characteristic speed.
//
// All functions here are pure; safe for unrestricted concurrent use.

#include <optional>

namespace lflux::gauss {

/// A macroscopic space-time observation point (t >= 0, r real).
struct SpaceTimePoint {
  double t = 0.0;
  double r = 0.0;
};

/// Moment inputs of a model: mean occupation mu_bar, occupation variance
/// sigma0_sq, single-walk variance sigma1_sq, and (for the random average
/// process only) the constant kappa.
struct ModelMoments {
  double mu_bar = 0.0;
  double sigma0_sq = 0.0;
  double sigma1_sq = 1.0;
  std::optional<double> kappa;
};

/// Exclusion-process parameters; requires p + q = 1 and p > q.
struct AsepParams {
  double p = 1.0;
  double q = 0.0;
  double rho = 0.5;

  AsepParams(double p_, double q_, double rho_);
  double bias() const { return p - q; }
};

/// Density of the centered Gaussian with variance nu2 at x.
double normal_pdf(double x, double nu2);

/// Distribution function of the centered Gaussian with variance nu2.
/// Absolute accuracy better than 1e-12 across the whole line (erfc-based,
/// not quadrature; the tails enter psi multiplied by x).
double normal_cdf(double x, double nu2);

/// psi(x; nu2) = nu2 * pdf(x) - x * (1 - cdf(x)).
/// The degenerate nu2 = 0 case is the pointwise limit max(-x, 0).
double psi(double x, double nu2);

/// gamma1((s,q),(t,r)) = psi_{v(t+s)}(r-q) - psi_{v|t-s|}(r-q), v = sigma1_sq.
double gamma1(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq);

/// The same object as a single integral of the Gaussian kernel over the
/// variance variable; used as an independent cross-check of gamma1.
double gamma1_quadrature(const SpaceTimePoint& a, const SpaceTimePoint& b,
                         double sigma1_sq);

/// gamma2((s,q),(t,r)) = psi_{vs}(-q) + psi_{vt}(r) - psi_{v(t+s)}(r-q).
double gamma2(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq);

/// Brownian-probability integral form of gamma2 (two half-line integrals);
/// independent cross-check route built on normal_cdf.
double gamma2_quadrature(const SpaceTimePoint& a, const SpaceTimePoint& b,
                         double sigma1_sq);

/// Covariance of the i.i.d.-walk current limit:
/// mu_bar * gamma1 + sigma0_sq * gamma2. Requires m.kappa to be absent.
double z_cov(const SpaceTimePoint& a, const SpaceTimePoint& b,
             const ModelMoments& m);

/// Covariance of the random-average-process current limit:
/// mu_bar^2 * kappa * gamma1 + sigma0_sq * gamma2. Requires m.kappa present.
double rap_cov(const SpaceTimePoint& a, const SpaceTimePoint& b,
               const ModelMoments& m);

/// Stationary exclusion flux (p-q) rho (1-rho).
double asep_flux(const AsepParams& p);

/// Characteristic speed (p-q)(1-2 rho).
double asep_charspeed(const AsepParams& p);

}  // namespace lflux::gauss
