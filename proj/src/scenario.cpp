#include "mimolab/scenario.hpp"

#include "mimolab/channel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mimolab {

using nlohmann::json;

void ScenarioConfig::validate() const {
  if (L < 1) throw std::invalid_argument("config: L must be >= 1");
  if (K < 1) throw std::invalid_argument("config: K must be >= 1");
  if (N < 1) throw std::invalid_argument("config: N must be >= 1");
  if (!(rho_tr > 0) || !(rho_ul > 0) || !(rho_dl > 0))
    throw std::invalid_argument("config: SNRs must be positive");
  if (phi_design < 0)
    throw std::invalid_argument("config: phi_design must be >= 0");
  if (mode == Mode::simplified) {
    if (!(simp.alpha > 0) || simp.alpha > 1.0)
      throw std::invalid_argument("config: alpha must lie in (0, 1]");
    if (simp.kappa < 0)
      throw std::invalid_argument("config: kappa must be >= 0");
    if (K > N)
      throw std::invalid_argument(
          "config: simplified mode assigns orthogonal beams, needs K <= N");
  } else {
    if (geo.cell_size_km <= 0 || geo.min_dist_km < 0)
      throw std::invalid_argument("config: bad geometry sizes");
    if (geo.min_dist_km * 2.0 >= geo.cell_size_km)
      throw std::invalid_argument(
          "config: min BS-UE distance infeasible for cell size");
  }
}

namespace {

Mode mode_from_string(const std::string& s) {
  if (s == "simplified") return Mode::simplified;
  if (s == "geometric") return Mode::geometric;
  throw std::invalid_argument("config: unknown mode '" + s + "'");
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io_error(std::string("config parse error: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg.L = doc.value("L", cfg.L);
    cfg.K = doc.value("K", cfg.K);
    cfg.N = doc.value("N", cfg.N);
    cfg.rho_tr = db_to_linear(doc.value("rho_tr_db", 0.0));
    cfg.rho_ul = db_to_linear(doc.value("rho_ul_db", 0.0));
    cfg.rho_dl = db_to_linear(doc.value("rho_dl_db", 0.0));
    cfg.phi_design = doc.value("phi_design", 0.0);
    cfg.mode = mode_from_string(doc.value("mode", std::string("simplified")));
    cfg.rng_seed = doc.value("rng_seed", std::uint64_t{1});
    if (doc.contains("simplified")) {
      const auto& s = doc["simplified"];
      cfg.simp.alpha = s.value("alpha", cfg.simp.alpha);
      cfg.simp.kappa = s.value("kappa", cfg.simp.kappa);
    }
    if (doc.contains("geometric")) {
      const auto& g = doc["geometric"];
      cfg.geo.cell_size_km = g.value("cell_size_km", cfg.geo.cell_size_km);
      cfg.geo.pathloss_exp = g.value("pathloss_exp", cfg.geo.pathloss_exp);
      cfg.geo.ref_gain_db = g.value("ref_gain_db", cfg.geo.ref_gain_db);
      cfg.geo.shadow_std_db = g.value("shadow_std_db", cfg.geo.shadow_std_db);
      cfg.geo.min_dist_km = g.value("min_dist_km", cfg.geo.min_dist_km);
      cfg.geo.tx_power_dbm = g.value("tx_power_dbm", cfg.geo.tx_power_dbm);
      cfg.geo.noise_dbm = g.value("noise_dbm", cfg.geo.noise_dbm);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") +
                                e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
  json doc;
  doc["L"] = L;
  doc["K"] = K;
  doc["N"] = N;
  doc["rho_tr_db"] = linear_to_db(rho_tr);
  doc["rho_ul_db"] = linear_to_db(rho_ul);
  doc["rho_dl_db"] = linear_to_db(rho_dl);
  doc["phi_design"] = phi_design;
  doc["rng_seed"] = rng_seed;
  if (mode == Mode::simplified) {
    doc["mode"] = "simplified";
    doc["simplified"] = {{"alpha", simp.alpha}, {"kappa", simp.kappa}};
  } else {
    doc["mode"] = "geometric";
    doc["geometric"] = {{"cell_size_km", geo.cell_size_km},
                        {"pathloss_exp", geo.pathloss_exp},
                        {"ref_gain_db", geo.ref_gain_db},
                        {"shadow_std_db", geo.shadow_std_db},
                        {"min_dist_km", geo.min_dist_km},
                        {"tx_power_dbm", geo.tx_power_dbm},
                        {"noise_dbm", geo.noise_dbm}};
  }
  return doc.dump(2);
}

double pathloss_db(double distance_km, const GeometricParams& p) {
  if (!(distance_km > 0))
    throw std::domain_error("pathloss: distance must be positive");
  return p.ref_gain_db - 10.0 * p.pathloss_exp * std::log10(distance_km);
}

double Geometry::wrap_distance_km(double ax, double ay, double bx,
                                  double by) const {
  const double w = cols * cell_km;
  const double h = rows * cell_km;
  double best = std::numeric_limits<double>::infinity();
  for (int ix = -1; ix <= 1; ++ix) {
    for (int iy = -1; iy <= 1; ++iy) {
      const double dx = ax - (bx + ix * w);
      const double dy = ay - (by + iy * h);
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

Geometry build_wraparound_geometry(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  Geometry g;
  // most-square factorization of L
  int rows = static_cast<int>(std::sqrt(static_cast<double>(cfg.L)));
  while (cfg.L % rows != 0) --rows;
  g.rows = rows;
  g.cols = cfg.L / rows;
  g.cell_km = cfg.geo.cell_size_km;
  g.bs.resize(cfg.L);
  g.ue.assign(cfg.L, {});
  for (int j = 0; j < cfg.L; ++j) {
    const int r = j / g.cols;
    const int c = j % g.cols;
    g.bs[j] = {(c + 0.5) * g.cell_km, (r + 0.5) * g.cell_km};
    g.ue[j].reserve(cfg.K);
    for (int k = 0; k < cfg.K; ++k) {
      // rejection sampling against the serving-distance floor
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000)
          throw std::invalid_argument(
              "geometry: cannot satisfy min distance");
        const double x =
            (c + rng.uniform()) * g.cell_km;
        const double y = (r + rng.uniform()) * g.cell_km;
        if (g.wrap_distance_km(x, y, g.bs[j].first, g.bs[j].second) >=
            cfg.geo.min_dist_km) {
          g.ue[j].push_back({x, y});
          break;
        }
      }
    }
  }
  return g;
}

namespace {

/// Fill c, phi, xi, lambda from beta/d/kappa; shared by both modes.
void finish_table(LargeScaleTable& t) {
  const int L = t.L, K = t.K;
  t.c.assign(L, MatD::Zero(L, K));
  t.phi.assign(L, MatD::Zero(L, K));
  t.xi = VecD::Zero(L);
  t.lambda = VecD::Zero(L);
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      double S = 1.0 / t.rho_tr;
      for (int n = 0; n < L; ++n) S += t.d[j](n, k);
      for (int l = 0; l < L; ++l) {
        t.c[j](l, k) = t.d[j](l, k) / S;
        t.phi[j](l, k) = t.d[j](j, k) * t.d[j](l, k) / S;
      }
    }
    double xi = 0.0;
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k)
        xi += (l == j) ? (t.d[j](j, k) - t.phi[j](j, k)) : t.d[j](l, k);
    t.xi[j] = xi;
    t.lambda[j] = xi / t.N + t.phi_design;
  }
}

}  // namespace

LargeScaleTable table_from_gains(const std::vector<MatD>& beta_in,
                                 const MatD& kappa, const MatD& angles,
                                 int N, double rho_tr, double rho_ul,
                                 double rho_dl, double phi_design) {
  LargeScaleTable t;
  t.L = static_cast<int>(beta_in.size());
  if (t.L == 0 || beta_in[0].rows() != t.L)
    throw std::invalid_argument("table: beta must be L matrices of L x K");
  t.K = static_cast<int>(beta_in[0].cols());
  t.N = N;
  t.rho_tr = rho_tr;
  t.rho_ul = rho_ul;
  t.rho_dl = rho_dl;
  t.phi_design = phi_design;
  t.beta = beta_in;
  t.kappa = kappa;
  t.angles = angles;
  t.d.assign(t.L, MatD::Zero(t.L, t.K));
  for (int j = 0; j < t.L; ++j)
    for (int l = 0; l < t.L; ++l)
      for (int k = 0; k < t.K; ++k)
        t.d[j](l, k) = (l == j) ? t.beta[j](j, k) / (1.0 + t.kappa(j, k))
                                : t.beta[j](l, k);
  finish_table(t);
  return t;
}

LargeScaleTable sample_large_scale(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  std::vector<MatD> beta(cfg.L, MatD::Zero(cfg.L, cfg.K));
  MatD kappa = MatD::Zero(cfg.L, cfg.K);
  MatD angles = MatD::Zero(cfg.L, cfg.K);

  if (cfg.mode == Mode::simplified) {
    for (int j = 0; j < cfg.L; ++j) {
      for (int l = 0; l < cfg.L; ++l)
        for (int k = 0; k < cfg.K; ++k)
          beta[j](l, k) = (l == j) ? 1.0 : cfg.simp.alpha;
      // beta holds the pre-split gain; d gets beta/(1+kappa) on the own cell
      for (int k = 0; k < cfg.K; ++k) kappa(j, k) = cfg.simp.kappa;
      const auto th = orthogonal_beam_angles(cfg.N, cfg.K, rng);
      for (int k = 0; k < cfg.K; ++k) angles(j, k) = th[k];
    }
    // In the symmetric model the LoS carries d*kappa with d = 1/(1+kappa),
    // i.e. beta stays 1; table_from_gains applies the split.
    return table_from_gains(beta, kappa, angles, cfg.N, cfg.rho_tr,
                            cfg.rho_ul, cfg.rho_dl, cfg.phi_design);
  }

  // Geometric mode: gains are normalized by the noise floor only, and the
  // dimensionless SNRs all equal the linear transmit power, so that
  // rho * beta is the per-link SNR.
  const Geometry geo = build_wraparound_geometry(cfg, rng);
  for (int j = 0; j < cfg.L; ++j) {
    for (int l = 0; l < cfg.L; ++l) {
      for (int k = 0; k < cfg.K; ++k) {
        const double dist = geo.wrap_distance_km(
            geo.bs[j].first, geo.bs[j].second, geo.ue[l][k].first,
            geo.ue[l][k].second);
        const double shadow = cfg.geo.shadow_std_db * rng.gauss();
        beta[j](l, k) = db_to_linear(pathloss_db(dist, cfg.geo) + shadow -
                                     cfg.geo.noise_dbm);
      }
    }
    for (int k = 0; k < cfg.K; ++k) {
      kappa(j, k) = cfg.simp.kappa;  // common Rician factor on LoS links
      angles(j, k) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
  }
  const double rho = db_to_linear(cfg.geo.tx_power_dbm);
  return table_from_gains(beta, kappa, angles, cfg.N, rho, rho, rho,
                          cfg.phi_design);
}

}  // namespace mimolab
