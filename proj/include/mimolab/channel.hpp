#pragma once

#include "mimolab/common.hpp"
#include "mimolab/rng.hpp"
#include "mimolab/scenario.hpp"

#include <vector>

namespace mimolab {

/// Per-cell deterministic LoS matrices and their Gram products.
struct LoSSet {
  std::vector<MatC> hbar;  // per cell: N x K, column k = sqrt(d_jjk*kappa)*a
  std::vector<MatC> gram;  // per cell: K x K, (1/N) Hbar^H Hbar
};

/// One coherence-block draw of every link: h[j][l] is the N x K matrix of
/// channels from the UEs of cell l to BS j.
struct ChannelRealization {
  std::vector<std::vector<MatC>> h;
};

/// Uniform linear array response, element n = exp(-i*pi*n*sin(angle)).
VecC ula_steering(double angle, int N);

/// K distinct beam indices from the N-point orthogonal grid
/// sin(theta_k) = -1 + (2k-1)/N, mapped back to angles.
std::vector<double> orthogonal_beam_angles(int N, int K, Rng& rng);

/// Builds H_bar_jj from the table's own-cell gains, Rician factors, angles.
LoSSet build_los(const LargeScaleTable& table);

/// Rician own-cell / Rayleigh cross-cell draw, independent across links.
ChannelRealization sample_channels(const LargeScaleTable& table,
                                   const LoSSet& los, Rng& rng);

}  // namespace mimolab
