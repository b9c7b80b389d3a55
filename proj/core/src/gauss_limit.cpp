#include "latticeflux/gauss_limit.hpp"

#include <cmath>

#include "latticeflux/errors.hpp"
#include "latticeflux/quadrature.hpp"

namespace lflux::gauss {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
}  // namespace

AsepParams::AsepParams(double p_, double q_, double rho_) : p(p_), q(q_), rho(rho_) {
  if (!(p > 0.0) || p > 1.0 || q < 0.0 || std::abs(p + q - 1.0) > 1e-12)
    throw ModelError("AsepParams: need 0 <= q < p <= 1 with p + q = 1");
  if (!(p > q)) throw ModelError("AsepParams: asymmetry p > q required");
  if (rho < 0.0 || rho > 1.0) throw ModelError("AsepParams: rho outside [0,1]");
}

double normal_pdf(double x, double nu2) {
  if (!(nu2 > 0.0)) throw ModelError("normal_pdf: variance must be positive");
  return std::exp(-0.5 * x * x / nu2) / std::sqrt(kTwoPi * nu2);
}

double normal_cdf(double x, double nu2) {
  if (!(nu2 > 0.0)) throw ModelError("normal_cdf: variance must be positive");
  return 0.5 * std::erfc(-x / (kSqrt2 * std::sqrt(nu2)));
}

double psi(double x, double nu2) {
  if (nu2 < 0.0) throw ModelError("psi: negative variance");
  if (nu2 == 0.0) return x < 0.0 ? -x : 0.0;
  // Upper tail as erfc/2 keeps x*(1-cdf) accurate far out.
  double tail = 0.5 * std::erfc(x / (kSqrt2 * std::sqrt(nu2)));
  return nu2 * normal_pdf(x, nu2) - x * tail;
}

double gamma1(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq) {
  if (a.t < 0.0 || b.t < 0.0) throw ModelError("gamma1: negative time");
  double d = b.r - a.r;
  return psi(d, sigma1_sq * (a.t + b.t)) - psi(d, sigma1_sq * std::abs(b.t - a.t));
}

double gamma1_quadrature(const SpaceTimePoint& a, const SpaceTimePoint& b,
                         double sigma1_sq) {
  double d = b.r - a.r;
  double lo = sigma1_sq * std::abs(b.t - a.t);
  double hi = sigma1_sq * (a.t + b.t);
  if (hi <= lo) return 0.0;
  auto f = [d](double v) { return v > 0.0 ? normal_pdf(d, v) : 0.0; };
  return 0.5 * integrate(f, lo, hi);
}

double gamma2(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq) {
  if (a.t < 0.0 || b.t < 0.0) throw ModelError("gamma2: negative time");
  return psi(-a.r, sigma1_sq * a.t) + psi(b.r, sigma1_sq * b.t) -
         psi(b.r - a.r, sigma1_sq * (a.t + b.t));
}

double gamma2_quadrature(const SpaceTimePoint& a, const SpaceTimePoint& b,
                         double sigma1_sq) {
  double vs = sigma1_sq * a.t;
  double vt = sigma1_sq * b.t;
  double q = a.r, r = b.r;
  if (vs == 0.0 && vt == 0.0) {
    // Point-mass walks: both probabilities are indicators.
    return 0.0;
  }
  auto upper = [vs, vt, q, r](double x) {
    double ps = vs > 0.0 ? 1.0 - normal_cdf(q - x, vs) : (q - x < 0.0 ? 1.0 : 0.0);
    double pt = vt > 0.0 ? 1.0 - normal_cdf(r - x, vt) : (r - x < 0.0 ? 1.0 : 0.0);
    return ps * pt;
  };
  auto lower = [vs, vt, q, r](double x) {
    double ps = vs > 0.0 ? normal_cdf(q - x, vs) : (q - x >= 0.0 ? 1.0 : 0.0);
    double pt = vt > 0.0 ? normal_cdf(r - x, vt) : (r - x >= 0.0 ? 1.0 : 0.0);
    return ps * pt;
  };
  // Gaussian tails make both integrands negligible 12 standard deviations
  // past the thresholds.
  double spread = 12.0 * std::sqrt(std::max(vs, vt)) + std::abs(q) + std::abs(r) + 1.0;
  double left = integrate(upper, -spread, 0.0);
  double right = integrate(lower, 0.0, spread);
  return left + right;
}

double z_cov(const SpaceTimePoint& a, const SpaceTimePoint& b,
             const ModelMoments& m) {
  if (m.kappa.has_value())
    throw ModelError("z_cov: kappa must be absent (use rap_cov)");
  if (m.mu_bar == 0.0 && m.sigma0_sq == 0.0) return 0.0;
  return m.mu_bar * gamma1(a, b, m.sigma1_sq) + m.sigma0_sq * gamma2(a, b, m.sigma1_sq);
}

double rap_cov(const SpaceTimePoint& a, const SpaceTimePoint& b,
               const ModelMoments& m) {
  if (!m.kappa.has_value()) throw ModelError("rap_cov: kappa missing");
  return m.mu_bar * m.mu_bar * (*m.kappa) * gamma1(a, b, m.sigma1_sq) +
         m.sigma0_sq * gamma2(a, b, m.sigma1_sq);
}

double asep_flux(const AsepParams& p) { return p.bias() * p.rho * (1.0 - p.rho); }

double asep_charspeed(const AsepParams& p) { return p.bias() * (1.0 - 2.0 * p.rho); }

}  // namespace lflux::gauss
