#pragma once

#include "mimolab/channel.hpp"
#include "mimolab/common.hpp"
#include "mimolab/report.hpp"
#include "mimolab/scenario.hpp"

#include <vector>

namespace mimolab {

/// Converged per-cell fixed point and every auxiliary the SINR formulas
/// need. All trace quantities are computed through K x K reductions, so the
/// state stays small even for very large N; resolvent_T() materializes the
/// N x N resolvent on demand for small-N checks.
struct DetEqState {
  int K = 0, N = 0;
  double lambda = 0.0;
  VecD phi_own;       // phi_jjk, k = 1..K
  MatC gram;          // (1/N) Hbar^H Hbar
  double delta = 0.0;
  double delta_tilde = 0.0;
  int iterations = 0;
  double residual = 0.0;

  MatC T_tilde;       // K x K
  VecD t_diag;        // [T_tilde]_kk (real)
  VecD t2_diag;       // [T_tilde^2]_kk (real)
  MatD t_abs2;        // |[T_tilde]_ki|^2
  VecD s_diag;        // [T_tilde M T_tilde]_kk,   M = gram
  VecD p_diag;        // [T_tilde Phi T_tilde]_kk
  VecD u;             // (1/N) |hbar_k|^2 = gram diagonal

  double theta = 0.0;        // (1/N) tr T^2
  double theta_tilde = 0.0;  // (1/N) tr(Phi T_tilde Phi T_tilde)
  double F = 0.0;
  double Delta = 0.0;
  double nu_bar = 0.0;
  double theta_bar = 0.0;    // MR power normalizer
  double psi_bar = 0.0;      // RZF power normalizer

  VecD varsigma_bar;  // per UE
  VecD xi_aux;        // per UE
  VecD zeta_aux;      // per UE
  MatD mu;            // L x K
  MatD gamma_coef;    // L x K

  /// Dense N x N resolvent rebuilt from the converged scalars (tests only;
  /// quadratic memory).
  MatC resolvent_T(const MatC& hbar) const;
};

/// Solves the two-scalar fixed point for cell j and fills all auxiliaries.
/// Throws std::invalid_argument for lambda <= 0, std::runtime_error on
/// non-convergence (message carries the residual), std::domain_error when
/// Delta <= 0 (invalid asymptotic regime).
DetEqState solve_cell(const LargeScaleTable& table, const LoSSet& los, int j);

/// Convenience: all cells.
std::vector<DetEqState> solve_all(const LargeScaleTable& table,
                                  const LoSSet& los);

double rate_from_sinr(double sinr);

/// Asymptotic per-UE SINR reports. MRC/S-MMSE are uplink (rho_ul);
/// MRT/RZF are downlink (rho_dl). RZF and MRT need every cell's state.
SinrReport sinr_mrc(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st);
SinrReport sinr_mrt(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st);
SinrReport sinr_smmse(const LargeScaleTable& table, const LoSSet& los,
                      const std::vector<DetEqState>& st);
SinrReport sinr_rzf(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st);

enum class LimitRegime { kn_zero, kn_zero_favorable };

/// N -> infinity, K/N -> 0 values. The favorable variant demands orthogonal
/// LoS columns and throws std::invalid_argument otherwise.
SinrReport sinr_limit(const std::string& scheme, const LargeScaleTable& table,
                      const LoSSet& los, LimitRegime regime);

}  // namespace mimolab
