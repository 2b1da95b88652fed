#pragma once

#include "mimolab/common.hpp"
#include "mimolab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mimolab {

enum class Mode { simplified, geometric };

/// Geometry/propagation parameters for geometric mode. Distances in km,
/// powers in dBm, gains in dB; converted to linear quantities only when the
/// large-scale table is built.
struct GeometricParams {
  double cell_size_km = 0.25;
  double pathloss_exp = 3.7;
  double ref_gain_db = -148.0;   // median channel gain at 1 km
  double shadow_std_db = 10.0;
  double min_dist_km = 0.035;
  double tx_power_dbm = 20.7;    // calibrated: median SNR at 35 m = 20.6 dB
  double noise_dbm = -94.0;      // 20 MHz thermal + noise figure
};

/// Symmetric-model parameters: every intercell gain equals alpha, every UE
/// shares one Rician factor, and LoS directions are drawn from the grid of
/// orthogonal array beams.
struct SimplifiedModelParams {
  double alpha = 0.1;
  double kappa = 0.0;
};

struct ScenarioConfig {
  int L = 4;
  int K = 10;
  int N = 64;
  double rho_tr = 1.0;  // linear SNRs
  double rho_ul = 1.0;
  double rho_dl = 1.0;
  double phi_design = 0.0;
  Mode mode = Mode::simplified;
  GeometricParams geo;
  SimplifiedModelParams simp;
  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;

  /// JSON file format keeps powers in dB (rho_tr_db, rho_ul_db, rho_dl_db).
  static ScenarioConfig from_json_file(const std::string& path);
  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

/// BS and UE positions on the wrap-around grid (km). Cells tile an
/// rows-by-cols torus; distances take the minimum over 3x3 torus images.
struct Geometry {
  int rows = 0;
  int cols = 0;
  double cell_km = 0.0;
  std::vector<std::pair<double, double>> bs;                // per cell
  std::vector<std::vector<std::pair<double, double>>> ue;   // [cell][ue]

  double wrap_distance_km(double ax, double ay, double bx, double by) const;
};

/// (j,l,k)-indexed large-scale tables plus per-cell regularization scalars.
/// All entries linear. Index convention: quantity[j](l,k) is "seen by BS j,
/// about the UE k of cell l".
struct LargeScaleTable {
  int L = 0, K = 0, N = 0;
  std::vector<MatD> beta;   // L matrices of size L x K
  std::vector<MatD> d;      // Rayleigh-part gains
  std::vector<MatD> c;      // LMMSE gains d/(1/rho_tr + sum_n d)
  std::vector<MatD> phi;    // estimate covariance levels
  MatD kappa;               // L x K Rician factors (own-cell links)
  MatD angles;              // L x K LoS azimuths (radians)
  VecD xi;                  // per cell
  VecD lambda;              // xi/N + phi_design
  double rho_tr = 1.0, rho_ul = 1.0, rho_dl = 1.0;
  double phi_design = 0.0;
};

/// Median pathloss; shadow fading is added separately by the sampler.
double pathloss_db(double distance_km, const GeometricParams& p);

/// Drops UEs uniformly per cell with the serving-distance floor enforced by
/// rejection; throws std::invalid_argument if the floor is infeasible.
Geometry build_wraparound_geometry(const ScenarioConfig& cfg, Rng& rng);

/// Builds the full table for either mode; deterministic given cfg.rng_seed.
LargeScaleTable sample_large_scale(const ScenarioConfig& cfg);

/// Table from explicit per-link inputs (testing and custom studies):
/// beta_in[j](l,k) linear gains, kappa/angles per own-cell link.
LargeScaleTable table_from_gains(const std::vector<MatD>& beta_in,
                                 const MatD& kappa, const MatD& angles,
                                 int N, double rho_tr, double rho_ul,
                                 double rho_dl, double phi_design);

}  // namespace mimolab
