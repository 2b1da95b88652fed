#pragma once

#include "mimolab/channel.hpp"
#include "mimolab/common.hpp"
#include "mimolab/rng.hpp"
#include "mimolab/scenario.hpp"

#include <vector>

namespace mimolab {

/// Own-cell LMMSE estimates plus the raw pilot observations they came from.
/// Cross-cell estimates are exact scalar multiples of (hhat - hbar), so only
/// O(L K N) state is kept.
struct EstimateSet {
  std::vector<MatC> hhat;  // per cell: N x K own-cell estimates
  std::vector<MatC> ytr;   // per cell: N x K pilot observations
};

/// Pilot observation y_jk = sum_l h_jlk + noise/sqrt(rho_tr), then the
/// per-column LMMSE update hhat = hbar + c_jjk (y - hbar).
EstimateSet mmse_estimate(const ChannelRealization& real,
                          const LargeScaleTable& table, const LoSSet& los,
                          Rng& rng);

/// Reconstructs the cross-cell estimate hhat_jlk = (c_jlk/c_jjk)(hhat_jjk -
/// hbar_jjk). Throws std::invalid_argument when l == j (that estimate is
/// stored directly).
VecC intercell_estimate(const EstimateSet& est, const LargeScaleTable& table,
                        const LoSSet& los, int j, int l, int k);

/// Total conditional interference variance sum_{l,i} d_jli (1 - c_jli);
/// the white residual seen by any combiner at BS j.
double residual_variance(const LargeScaleTable& table, int j);

}  // namespace mimolab
