#include "mimolab/closedform.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mimolab {

SimplifiedParams SimplifiedParams::make(int L, int K, int N, double alpha,
                                        double kappa, double rho_tr,
                                        double rho, double phi_design) {
  SimplifiedParams p;
  p.L = L;
  p.K = K;
  p.N = N;
  p.alpha = alpha;
  p.kappa = kappa;
  p.rho_tr = rho_tr;
  p.rho = rho;
  p.phi_design = phi_design;
  p.Lbar = alpha * (L - 1) + 1.0 / (1.0 + kappa);
  p.nu = rho_tr / (1.0 + rho_tr * p.Lbar);
  p.phi = p.nu / ((1.0 + kappa) * (1.0 + kappa));
  p.phix = alpha * p.nu / (1.0 + kappa);
  p.lambda = (double(K) / N) * (p.Lbar - p.phi) + phi_design;
  p.tau = 1.0 / (1.0 + kappa) + kappa / p.nu;
  return p;
}

double cubic_root(const SimplifiedParams& p) {
  const double kn = double(p.K) / p.N;
  const double kp = p.kappa / (1.0 + p.kappa);
  const double c3 = p.lambda;
  const double c2 = 2.0 * p.lambda + p.phi * (1.0 - kn);
  const double c1 = p.lambda + p.phi * (1.0 - 2.0 * kn) + kp;
  const double c0 = -p.phi * kn;
  auto f = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto fp = [&](double x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };

  // f(0) = c0 < 0 and the leading coefficient is positive, so the unique
  // positive root sits in a growable bracket.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && f(hi) < 0.0; ++i) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double step = f(x) / fp(x);
    x -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

SimplifiedDetEq simplified_deteq(const SimplifiedParams& p) {
  const double kn = double(p.K) / p.N;
  const double kp = p.kappa / (1.0 + p.kappa);
  SimplifiedDetEq q;
  q.delta_tilde = cubic_root(p);
  q.delta = q.delta_tilde / p.phi + (1.0 - kn) / p.lambda;
  const double a = p.lambda * (1.0 + q.delta_tilde);
  const double bhat = kp / (1.0 + q.delta * p.phi);
  q.t = q.delta_tilde / (kn * p.phi);
  q.g = 1.0 - p.lambda * q.t;
  q.theta = (1.0 - kn) / (a * a) + kn / ((a + bhat) * (a + bhat));
  q.theta_tilde = q.delta_tilde * q.delta_tilde / kn;
  q.F = kp * q.delta_tilde * q.delta_tilde /
        (kn * p.phi * (1.0 + q.delta_tilde) * (1.0 + q.delta_tilde));
  q.Delta = (1.0 - q.F) * (1.0 - q.F) -
            p.lambda * p.lambda * q.theta * q.theta_tilde;
  if (!(q.Delta > 0.0))
    throw std::domain_error("simplified_deteq: invalid regime (Delta <= 0)");
  q.nu_bar = q.theta / q.Delta;
  const double psi_den = -1.0 + (1.0 - q.F) / q.Delta;
  if (!(psi_den > 0.0))
    throw std::domain_error("simplified_deteq: invalid regime (psi_bar <= 0)");
  q.psi_bar = kn * p.phi / psi_den;
  q.tau_under = 1.0 / (1.0 + p.kappa) +
                (p.kappa / p.nu) /
                    (p.lambda * q.delta * (1.0 + q.delta_tilde));
  return q;
}

double sinr_mr_simplified(const SimplifiedParams& p, MrDecomposition* parts) {
  const double kn = double(p.K) / p.N;
  const double okp = 1.0 + p.kappa;
  const double kp = p.kappa / okp;
  const double noise = p.Lbar * okp / (p.tau * p.N * p.rho);
  const double A = (kn * p.Lbar + 1.0 / (p.N * p.rho)) * okp / p.tau +
                   kn * kp / (p.tau * p.tau);
  const double B = p.Lbar * okp / p.tau + kp / (p.tau * p.tau);
  const double csi = A / p.rho_tr;
  const double interf = kn * p.Lbar * B;
  const double pilot =
      (p.alpha / (p.tau * p.tau)) * (p.Lbar - 1.0 / okp);
  if (parts != nullptr) {
    parts->noise = noise;
    parts->imperfect_csi = csi;
    parts->interference = interf;
    parts->pilot = pilot;
  }
  return 1.0 / (noise + csi + interf + pilot);
}

double sinr_mmse_rzf_simplified(const SimplifiedParams& p,
                                MmseDecomposition* parts) {
  const SimplifiedDetEq q = simplified_deteq(p);
  const double kn = double(p.K) / p.N;
  const double kp = p.kappa / (1.0 + p.kappa);
  const double lam = p.lambda;
  const double omt2 = (1.0 + q.delta_tilde) * (1.0 + q.delta_tilde);

  const double ga_own = kp * q.t * q.t / omt2;
  const double ga_x = p.phix * p.phix * q.delta * q.delta * ga_own;
  const double mu_own =
      1.0 / (1.0 + p.kappa) - p.phi + lam * lam * p.phi * q.t * q.t;
  const double mu_x =
      p.alpha - lam * p.phix * p.phix * q.delta *
                    (2.0 * q.t + q.delta * lam * p.phi * q.t * q.t);
  const double xi = 1.0 / q.psi_bar;  // per-UE xi equals 1/psi_bar here
  const double zeta =
      (1.0 - q.F) / q.Delta * lam * lam * p.phi * q.t * q.t +
      lam * lam * q.theta_tilde / q.Delta * kp * q.t * q.t / omt2;
  const double sbar_over_psi =
      kn * ((mu_own + (p.L - 1) * mu_x) * xi +
            (ga_own + (p.L - 1) * ga_x) * zeta);

  const double noise = 1.0 / (p.N * p.rho) / (q.psi_bar * q.g * q.g);
  const double noncoh = sbar_over_psi / (q.g * q.g);
  const double pilot =
      p.alpha * p.alpha * (p.L - 1) / (q.tau_under * q.tau_under);
  if (parts != nullptr) {
    parts->noise = noise;
    parts->noncoherent = noncoh;
    parts->pilot = pilot;
  }
  return 1.0 / (noise + noncoh + pilot);
}

double gamma_infinity(const SimplifiedParams& p) {
  if (p.L == 1 || p.alpha == 0.0)
    return std::numeric_limits<double>::infinity();
  return p.tau * p.tau / (p.alpha * p.alpha * (p.L - 1));
}

double rate_infinity(const SimplifiedParams& p) {
  return std::log2(1.0 + gamma_infinity(p));
}

int antennas_needed(const std::string& scheme, int L, int K, double alpha,
                    double kappa, double rho_tr, double rho,
                    double target_rate, double phi_design) {
  if (scheme != "mr" && scheme != "smmse")
    throw std::invalid_argument("antennas_needed: scheme must be mr or smmse");
  auto rate = [&](int N) {
    const SimplifiedParams p =
        SimplifiedParams::make(L, K, N, alpha, kappa, rho_tr, rho, phi_design);
    const double g = scheme == "mr" ? sinr_mr_simplified(p)
                                    : sinr_mmse_rzf_simplified(p);
    return std::log2(1.0 + g);
  };
  const SimplifiedParams p0 =
      SimplifiedParams::make(L, K, K, alpha, kappa, rho_tr, rho, phi_design);
  const double ceiling = rate_infinity(p0);
  if (target_rate >= ceiling) {
    std::ostringstream msg;
    msg << "antennas_needed: target " << target_rate
        << " bit/s/Hz is not attainable for any N; the pilot-contamination "
           "ceiling is "
        << ceiling << " bit/s/Hz";
    throw std::domain_error(msg.str());
  }
  int lo = K;
  if (rate(lo) >= target_rate) return lo;
  int hi = 2 * lo;
  while (rate(hi) < target_rate) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (rate(mid) >= target_rate ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace mimolab
