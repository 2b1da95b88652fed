#pragma once

#include "mimolab/common.hpp"

#include <string>

namespace mimolab {

/// Scalar description of the symmetric orthogonal-LoS network and every
/// derived constant the closed forms use.
struct SimplifiedParams {
  int L = 4, K = 10, N = 64;
  double alpha = 0.1;
  double kappa = 0.0;
  double rho_tr = 1.0;
  double rho = 1.0;          // data SNR (UL and DL coincide here)
  double phi_design = 0.0;

  // derived
  double Lbar = 0.0;         // alpha(L-1) + 1/(1+kappa)
  double nu = 0.0;           // rho_tr / (1 + rho_tr Lbar)
  double phi = 0.0;          // nu/(1+kappa)^2
  double phix = 0.0;         // alpha nu/(1+kappa)
  double lambda = 0.0;       // (K/N)(Lbar - phi) + phi_design
  double tau = 0.0;          // 1/(1+kappa) + kappa/nu

  static SimplifiedParams make(int L, int K, int N, double alpha, double kappa,
                               double rho_tr, double rho,
                               double phi_design = 0.0);
};

/// Derived fixed-point scalars obtained from the cubic root.
struct SimplifiedDetEq {
  double delta_tilde = 0.0;  // positive cubic root
  double delta = 0.0;        // delta_tilde/phi + (1 - K/N)/lambda
  double t = 0.0;            // (N/K) delta_tilde / phi = [T_tilde]_kk
  double g = 0.0;            // 1 - lambda t
  double theta = 0.0;        // (1/N) tr T^2
  double theta_tilde = 0.0;  // (N/K) delta_tilde^2
  double F = 0.0;
  double Delta = 0.0;
  double nu_bar = 0.0;
  double psi_bar = 0.0;
  double tau_under = 0.0;    // pilot-effective tau
};

/// Unique positive root of the cubic characteristic equation; Newton-polished
/// bisection. Residual is below 1e-12 in the acceptance tolerance sense.
double cubic_root(const SimplifiedParams& p);

/// Throws std::domain_error when Delta <= 0 or psi_bar <= 0.
SimplifiedDetEq simplified_deteq(const SimplifiedParams& p);

struct MrDecomposition {
  double noise = 0.0;          // Lbar(1+kappa)/(tau N rho)
  double imperfect_csi = 0.0;  // A / rho_tr
  double interference = 0.0;   // (K/N) Lbar B
  double pilot = 0.0;
};

/// Closed-form MR SINR (MRC and MRT coincide on the symmetric model).
/// Returns the direct value; the decomposition re-sums to 1/sinr exactly.
double sinr_mr_simplified(const SimplifiedParams& p,
                          MrDecomposition* parts = nullptr);

struct MmseDecomposition {
  double noise = 0.0;
  double noncoherent = 0.0;
  double pilot = 0.0;
};

/// Closed-form S-MMSE/RZF SINR assembled from the cubic-root scalars.
double sinr_mmse_rzf_simplified(const SimplifiedParams& p,
                                MmseDecomposition* parts = nullptr);

/// Pilot-contamination-only limits (N -> infinity, K/N -> 0).
double gamma_infinity(const SimplifiedParams& p);
double rate_infinity(const SimplifiedParams& p);

/// Smallest antenna count whose closed-form rate meets target_rate
/// (bit/s/Hz). scheme is "mr" or "smmse". Doubling then binary search on
/// integer N >= K. Throws std::domain_error when target_rate >= R_infinity
/// (message reports the ceiling).
int antennas_needed(const std::string& scheme, int L, int K, double alpha,
                    double kappa, double rho_tr, double rho,
                    double target_rate, double phi_design = 0.0);

}  // namespace mimolab
