#include "mimolab/channel.hpp"

#include <cmath>
#include <numbers>

namespace mimolab {

VecC ula_steering(double angle, int N) {
  if (N < 1) throw std::invalid_argument("steering: N must be >= 1");
  VecC a(N);
  const double s = std::sin(angle);
  for (int n = 0; n < N; ++n) {
    const double phase = -std::numbers::pi * n * s;
    a[n] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

std::vector<double> orthogonal_beam_angles(int N, int K, Rng& rng) {
  if (K > N)
    throw std::invalid_argument("beams: K orthogonal beams need K <= N");
  const auto idx = rng.sample_without_replacement(N, K);
  std::vector<double> angles(K);
  for (int k = 0; k < K; ++k) {
    // grid point sin(theta) = -1 + (2m - 1)/N for beam m = 1..N
    angles[k] = std::asin(-1.0 + (2.0 * (idx[k] + 1) - 1.0) / N);
  }
  return angles;
}

LoSSet build_los(const LargeScaleTable& table) {
  LoSSet los;
  los.hbar.reserve(table.L);
  los.gram.reserve(table.L);
  for (int j = 0; j < table.L; ++j) {
    MatC H(table.N, table.K);
    for (int k = 0; k < table.K; ++k) {
      const double amp =
          std::sqrt(table.d[j](j, k) * table.kappa(j, k));
      H.col(k) = amp * ula_steering(table.angles(j, k), table.N);
    }
    los.hbar.push_back(H);
    los.gram.push_back((H.adjoint() * H) / static_cast<double>(table.N));
  }
  return los;
}

ChannelRealization sample_channels(const LargeScaleTable& table,
                                   const LoSSet& los, Rng& rng) {
  ChannelRealization real;
  real.h.assign(table.L, std::vector<MatC>(table.L));
  MatC z(table.N, table.K);
  for (int j = 0; j < table.L; ++j) {
    for (int l = 0; l < table.L; ++l) {
      rng.fill_cgauss(z);
      MatC h = z;
      for (int k = 0; k < table.K; ++k)
        h.col(k) *= std::sqrt(table.d[j](l, k));
      if (l == j) h += los.hbar[j];
      real.h[j][l] = std::move(h);
    }
  }
  return real;
}

}  // namespace mimolab
