#include "mimolab/estimation.hpp"

#include <cmath>

namespace mimolab {

EstimateSet mmse_estimate(const ChannelRealization& real,
                          const LargeScaleTable& table, const LoSSet& los,
                          Rng& rng) {
  EstimateSet est;
  est.hhat.reserve(table.L);
  est.ytr.reserve(table.L);
  MatC noise(table.N, table.K);
  for (int j = 0; j < table.L; ++j) {
    rng.fill_cgauss(noise);
    MatC y = noise / std::sqrt(table.rho_tr);
    for (int l = 0; l < table.L; ++l) y += real.h[j][l];
    MatC hhat = los.hbar[j];
    for (int k = 0; k < table.K; ++k)
      hhat.col(k) +=
          table.c[j](j, k) * (y.col(k) - los.hbar[j].col(k));
    est.ytr.push_back(std::move(y));
    est.hhat.push_back(std::move(hhat));
  }
  return est;
}

VecC intercell_estimate(const EstimateSet& est, const LargeScaleTable& table,
                        const LoSSet& los, int j, int l, int k) {
  if (l == j)
    throw std::invalid_argument(
        "intercell_estimate: own-cell estimate is stored directly");
  const double ratio = table.c[j](l, k) / table.c[j](j, k);
  return ratio * (est.hhat[j].col(k) - los.hbar[j].col(k));
}

double residual_variance(const LargeScaleTable& table, int j) {
  double e = 0.0;
  for (int l = 0; l < table.L; ++l)
    for (int k = 0; k < table.K; ++k)
      e += table.d[j](l, k) * (1.0 - table.c[j](l, k));
  return e;
}

}  // namespace mimolab
