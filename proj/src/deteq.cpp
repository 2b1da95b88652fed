#include "mimolab/deteq.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mimolab {

namespace {

constexpr double kFpTol = 1e-13;
constexpr int kFpMaxIter = 20000;

// Hermitian K x K inverse of (diag(1 + delta*phi) + M/a).
MatC core_inverse(const VecD& phi, const MatC& M, double delta, double a) {
  const int K = static_cast<int>(phi.size());
  MatC A = M / a;
  for (int k = 0; k < K; ++k) A(k, k) += cplx(1.0 + delta * phi(k), 0.0);
  return A.llt().solve(MatC::Identity(K, K));
}

}  // namespace

MatC DetEqState::resolvent_T(const MatC& hbar) const {
  const double a = lambda * (1.0 + delta_tilde);
  MatC T = MatC::Identity(N, N) / a;
  T.noalias() -=
      hbar * (lambda * T_tilde) * hbar.adjoint() / (a * a * double(N));
  return T;
}

DetEqState solve_cell(const LargeScaleTable& table, const LoSSet& los, int j) {
  const int K = table.K;
  const int N = table.N;
  if (j < 0 || j >= table.L)
    throw std::invalid_argument("solve_cell: cell index out of range");
  const double lambda = table.lambda(j);
  if (!(lambda > 0.0)) {
    std::ostringstream msg;
    msg << "solve_cell: regularizer must be positive (cell " << j
        << ", lambda=" << lambda << ")";
    throw std::invalid_argument(msg.str());
  }

  DetEqState st;
  st.K = K;
  st.N = N;
  st.lambda = lambda;
  st.phi_own = table.phi[j].row(j).transpose();
  st.gram = los.gram[j];

  const VecD& phiv = st.phi_own;
  const MatC& M = st.gram;

  double delta = 1.0 / lambda;
  double dtilde = 0.0;
  double eta = 0.5;
  double res = 0.0;
  bool converged = false;
  int it = 0;
  while (it < kFpMaxIter) {
    ++it;
    const double a = lambda * (1.0 + dtilde);
    const MatC W = core_inverse(phiv, M, delta, a);
    const double trMW = (M * W).trace().real() / double(N);
    const double d_new = 1.0 / a - trMW / (a * a);
    const double dt_new =
        (phiv.array() * W.diagonal().real().array()).sum() / (lambda * N);
    res = std::max(std::abs(d_new - delta), std::abs(dt_new - dtilde)) /
          std::max(1.0, std::abs(delta));
    if (res < 1e-3) eta = 1.0;
    delta = (1.0 - eta) * delta + eta * d_new;
    dtilde = (1.0 - eta) * dtilde + eta * dt_new;
    if (res < kFpTol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve_cell: fixed point did not converge (cell " << j
        << ", residual=" << res << " after " << it << " iterations)";
    throw std::runtime_error(msg.str());
  }
  st.delta = delta;
  st.delta_tilde = dtilde;
  st.iterations = it;
  st.residual = res;

  const double a = lambda * (1.0 + dtilde);
  const MatC W = core_inverse(phiv, M, delta, a);
  st.T_tilde = W / lambda;
  const MatC& Tt = st.T_tilde;
  const MatC MW = M * W;
  const double trMW = MW.trace().real() / double(N);
  st.theta = 1.0 / (a * a) - 2.0 * trMW / (a * a * a) +
             (MW * MW).trace().real() / double(N) / (a * a * a * a);

  const VecC phic = phiv.cast<cplx>();
  const MatC Smat = Tt * M * Tt;
  const MatC Pmat = Tt * phic.asDiagonal() * Tt;
  const double omt2 = (1.0 + dtilde) * (1.0 + dtilde);
  st.F = (phiv.array() * Smat.diagonal().real().array()).sum() / double(N) /
         omt2;
  st.theta_tilde =
      (phiv.array() * Pmat.diagonal().real().array()).sum() / double(N);
  st.Delta = (1.0 - st.F) * (1.0 - st.F) -
             lambda * lambda * st.theta * st.theta_tilde;
  if (!(st.Delta > 0.0)) {
    std::ostringstream msg;
    msg << "solve_cell: asymptotic regime invalid (cell " << j
        << ", Delta=" << st.Delta << ")";
    throw std::domain_error(msg.str());
  }
  st.nu_bar = st.theta / st.Delta;

  st.t_diag = Tt.diagonal().real();
  st.t2_diag = (Tt * Tt).diagonal().real();
  st.t_abs2 = Tt.cwiseAbs2();
  st.s_diag = Smat.diagonal().real();
  st.p_diag = Pmat.diagonal().real();
  st.u = M.diagonal().real();

  const double lead = (1.0 - st.F) / st.Delta;
  st.varsigma_bar =
      lead * st.s_diag / omt2 +
      st.nu_bar * lambda * lambda *
          (st.p_diag.array() - phiv.array() * st.t_diag.array().square())
              .matrix();
  st.xi_aux = st.nu_bar * lambda * lambda * st.p_diag + lead * st.s_diag / omt2;
  st.zeta_aux = lead * lambda * lambda * st.p_diag +
                (lambda * lambda * st.theta_tilde / st.Delta) * st.s_diag /
                    omt2;

  st.theta_bar = 1.0 / (phiv + st.u).mean();
  const double inv_psi =
      lambda * lambda * st.nu_bar *
          (phiv.array() * st.t2_diag.array()).sum() / double(K) +
      lead / omt2 * st.s_diag.sum() / double(K);
  st.psi_bar = 1.0 / inv_psi;

  st.mu.resize(table.L, K);
  st.gamma_coef.resize(table.L, K);
  for (int l = 0; l < table.L; ++l) {
    for (int i = 0; i < K; ++i) {
      if (l == j) {
        st.mu(l, i) = table.d[j](j, i) - table.phi[j](j, i) +
                      lambda * lambda * st.p_diag(i);
        st.gamma_coef(l, i) = st.s_diag(i) / omt2;
      } else {
        const double p = table.phi[j](l, i);
        st.mu(l, i) =
            table.d[j](l, i) -
            lambda * p * p * delta *
                (2.0 * st.t_diag(i) + delta * lambda * st.p_diag(i));
        st.gamma_coef(l, i) = p * p * delta * delta * st.s_diag(i) / omt2;
      }
    }
  }
  return st;
}

std::vector<DetEqState> solve_all(const LargeScaleTable& table,
                                  const LoSSet& los) {
  std::vector<DetEqState> out;
  out.reserve(table.L);
  for (int j = 0; j < table.L; ++j) out.push_back(solve_cell(table, los, j));
  return out;
}

double rate_from_sinr(double sinr) { return std::log2(1.0 + sinr); }

namespace {

SinrEntry make_entry(int cell, int ue, const std::string& scheme,
                     const std::string& direction, double signal, double noise,
                     double noncoh, double coh) {
  SinrEntry e;
  e.cell = cell;
  e.ue = ue;
  e.scheme = scheme;
  e.direction = direction;
  e.provenance = "deteq";
  e.signal = signal;
  e.noise = noise;
  e.noncoh = noncoh;
  e.coh = coh;
  e.sinr = signal / (noise + noncoh + coh);
  e.rate = rate_from_sinr(e.sinr);
  return e;
}

}  // namespace

SinrReport sinr_mrc(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st) {
  (void)los;
  SinrReport rep;
  for (int j = 0; j < table.L; ++j) {
    const DetEqState& s = st[j];
    const VecD& phiv = s.phi_own;
    const double d_all = table.d[j].sum();
    for (int k = 0; k < table.K; ++k) {
      const double sig =
          (phiv(k) + s.u(k)) * (phiv(k) + s.u(k));
      const double noise = 1.0 / (table.N * table.rho_ul * s.theta_bar);
      double sbar = d_all * (phiv(k) + s.u(k)) / table.N;
      sbar += phiv(k) * (s.u.sum() - s.u(k)) / table.N;
      double coh = 0.0;
      for (int i = 0; i < table.K; ++i)
        if (i != k) coh += std::norm(s.gram(i, k));
      for (int l = 0; l < table.L; ++l)
        if (l != j) coh += table.phi[j](l, k) * table.phi[j](l, k);
      rep.entries.push_back(make_entry(j, k, "mrc", "ul", sig, noise, sbar,
                                       coh));
    }
  }
  return rep;
}

SinrReport sinr_mrt(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st) {
  (void)los;
  SinrReport rep;
  for (int j = 0; j < table.L; ++j) {
    const DetEqState& s = st[j];
    const VecD& phiv = s.phi_own;
    for (int k = 0; k < table.K; ++k) {
      const double sig =
          s.theta_bar * (phiv(k) + s.u(k)) * (phiv(k) + s.u(k));
      const double noise = 1.0 / (table.N * table.rho_dl);
      double sbar = 0.0;
      for (int l = 0; l < table.L; ++l) {
        const DetEqState& sl = st[l];
        sbar += sl.theta_bar * table.d[l](j, k) *
                (sl.phi_own + sl.u).sum() / table.N;
      }
      sbar += s.theta_bar * (phiv.sum() - phiv(k)) * s.u(k) / table.N;
      double coh = 0.0;
      for (int i = 0; i < table.K; ++i)
        if (i != k) coh += std::norm(s.gram(i, k));
      coh *= s.theta_bar;
      for (int l = 0; l < table.L; ++l)
        if (l != j)
          coh += st[l].theta_bar * table.phi[l](j, k) * table.phi[l](j, k);
      rep.entries.push_back(make_entry(j, k, "mrt", "dl", sig, noise, sbar,
                                       coh));
    }
  }
  return rep;
}

SinrReport sinr_smmse(const LargeScaleTable& table, const LoSSet& los,
                      const std::vector<DetEqState>& st) {
  (void)los;
  SinrReport rep;
  for (int j = 0; j < table.L; ++j) {
    const DetEqState& s = st[j];
    const double lam = s.lambda;
    const double sum_mu = s.mu.sum() / table.N;
    const double sum_ga = s.gamma_coef.sum() / table.N;
    for (int k = 0; k < table.K; ++k) {
      const double one_minus = 1.0 - lam * s.t_diag(k);
      const double sig = one_minus * one_minus;
      const double noise =
          (s.phi_own(k) * s.nu_bar * lam * lam * s.t_diag(k) * s.t_diag(k) +
           s.varsigma_bar(k)) /
          (table.N * table.rho_ul);
      const double sbar = sum_mu * s.xi_aux(k) + sum_ga * s.zeta_aux(k);
      double coh =
          lam * lam * (s.t2_diag(k) - s.t_diag(k) * s.t_diag(k));
      double pilot = 0.0;
      for (int l = 0; l < table.L; ++l) {
        if (l == j) continue;
        for (int i = 0; i < table.K; ++i)
          pilot += table.phi[j](l, i) * table.phi[j](l, i) * s.t_abs2(k, i);
      }
      coh += lam * lam * s.delta * s.delta * pilot;
      rep.entries.push_back(make_entry(j, k, "smmse", "ul", sig, noise, sbar,
                                       coh));
    }
  }
  return rep;
}

SinrReport sinr_rzf(const LargeScaleTable& table, const LoSSet& los,
                    const std::vector<DetEqState>& st) {
  (void)los;
  SinrReport rep;
  VecD xibar(table.L), zetabar(table.L);
  for (int l = 0; l < table.L; ++l) {
    xibar(l) = st[l].xi_aux.sum() / table.N;
    zetabar(l) = st[l].zeta_aux.sum() / table.N;
  }
  for (int j = 0; j < table.L; ++j) {
    const DetEqState& s = st[j];
    const double lam = s.lambda;
    for (int k = 0; k < table.K; ++k) {
      const double one_minus = 1.0 - lam * s.t_diag(k);
      const double sig = s.psi_bar * one_minus * one_minus;
      const double noise = 1.0 / (table.N * table.rho_dl);
      double sbar = 0.0;
      for (int l = 0; l < table.L; ++l)
        sbar += st[l].psi_bar * (st[l].mu(j, k) * xibar(l) +
                                 st[l].gamma_coef(j, k) * zetabar(l));
      double coh =
          s.psi_bar * lam * lam * (s.t2_diag(k) - s.t_diag(k) * s.t_diag(k));
      for (int l = 0; l < table.L; ++l) {
        if (l == j) continue;
        const DetEqState& sl = st[l];
        const double cross = table.phi[l](j, k) * sl.delta;
        coh += sl.psi_bar * cross * cross * sl.lambda * sl.lambda *
               sl.t2_diag(k);
      }
      rep.entries.push_back(make_entry(j, k, "rzf", "dl", sig, noise, sbar,
                                       coh));
    }
  }
  return rep;
}

namespace {

struct LimitCell {
  MatC M;
  MatC Tt;    // (lambda I + Phi + M)^{-1}
  MatC Tt2;
  VecD u;
  double theta_bar = 0.0;
  double psi_bar = 0.0;
};

std::vector<LimitCell> limit_cells(const LargeScaleTable& table,
                                   const LoSSet& los) {
  std::vector<LimitCell> out(table.L);
  for (int l = 0; l < table.L; ++l) {
    LimitCell& c = out[l];
    c.M = los.gram[l];
    MatC A = c.M;
    for (int k = 0; k < table.K; ++k)
      A(k, k) += cplx(table.lambda(l) + table.phi[l](l, k), 0.0);
    c.Tt = A.llt().solve(MatC::Identity(table.K, table.K));
    c.Tt2 = c.Tt * c.Tt;
    c.u = c.M.diagonal().real();
    const VecD phiv = table.phi[l].row(l).transpose();
    c.theta_bar = 1.0 / (phiv + c.u).mean();
    c.psi_bar =
        double(table.K) /
        ((phiv.array() * c.Tt2.diagonal().real().array()).sum() +
         (c.Tt * c.M * c.Tt).trace().real());
  }
  return out;
}

bool orthogonal_los(const LargeScaleTable& table, const LoSSet& los) {
  for (int l = 0; l < table.L; ++l) {
    const MatC& M = los.gram[l];
    const double scale = 1.0 + M.diagonal().real().maxCoeff();
    for (int a = 0; a < table.K; ++a)
      for (int b = 0; b < table.K; ++b)
        if (a != b && std::abs(M(a, b)) > 1e-8 * scale) return false;
  }
  return true;
}

}  // namespace

SinrReport sinr_limit(const std::string& scheme, const LargeScaleTable& table,
                      const LoSSet& los, LimitRegime regime) {
  if (scheme != "mrc" && scheme != "mrt" && scheme != "smmse" &&
      scheme != "rzf")
    throw std::invalid_argument("sinr_limit: unknown scheme '" + scheme + "'");
  const bool favorable = regime == LimitRegime::kn_zero_favorable;
  if (favorable && !orthogonal_los(table, los))
    throw std::invalid_argument(
        "sinr_limit: favorable regime requires orthogonal deterministic "
        "components");
  const std::string direction =
      (scheme == "mrc" || scheme == "smmse") ? "ul" : "dl";
  const std::vector<LimitCell> cells = limit_cells(table, los);

  // In the favorable regime the inverse is diagonal with entries
  // 1/(lambda + phi + u); psi_bar follows the same diagonal reduction.
  std::vector<VecD> tdiag(table.L);
  VecD psi_fav(table.L);
  if (favorable) {
    for (int l = 0; l < table.L; ++l) {
      const VecD phiv = table.phi[l].row(l).transpose();
      tdiag[l] =
          (table.lambda(l) + (phiv + cells[l].u).array()).inverse().matrix();
      psi_fav(l) =
          double(table.K) /
          ((phiv + cells[l].u).array() * tdiag[l].array().square()).sum();
    }
  }

  SinrReport rep;
  for (int j = 0; j < table.L; ++j) {
    const LimitCell& c = cells[j];
    const double lam = table.lambda(j);
    const VecD phiv = table.phi[j].row(j).transpose();
    for (int k = 0; k < table.K; ++k) {
      double num = 0.0, den = 0.0;
      if (scheme == "mrc" || scheme == "mrt") {
        num = (phiv(k) + c.u(k)) * (phiv(k) + c.u(k));
        if (!favorable)
          for (int i = 0; i < table.K; ++i)
            if (i != k) den += std::norm(c.M(i, k));
        for (int l = 0; l < table.L; ++l) {
          if (l == j) continue;
          if (scheme == "mrc") {
            den += table.phi[j](l, k) * table.phi[j](l, k);
          } else {
            den += (cells[l].theta_bar / c.theta_bar) * table.phi[l](j, k) *
                   table.phi[l](j, k);
          }
        }
      } else if (scheme == "smmse") {
        const double tkk = favorable ? tdiag[j](k) : c.Tt(k, k).real();
        num = (1.0 - lam * tkk) * (1.0 - lam * tkk);
        if (!favorable) {
          den = lam * lam * (c.Tt2(k, k).real() - tkk * tkk);
          for (int l = 0; l < table.L; ++l) {
            if (l == j) continue;
            for (int i = 0; i < table.K; ++i)
              den += table.phi[j](l, i) * table.phi[j](l, i) *
                     std::norm(c.Tt(k, i));
          }
        } else {
          for (int l = 0; l < table.L; ++l)
            if (l != j)
              den += table.phi[j](l, k) * table.phi[j](l, k) * tkk * tkk;
        }
      } else {  // rzf
        const double psij = favorable ? psi_fav(j) : c.psi_bar;
        const double tkk = favorable ? tdiag[j](k) : c.Tt(k, k).real();
        num = psij * (1.0 - lam * tkk) * (1.0 - lam * tkk);
        if (!favorable)
          den = psij * lam * lam * (c.Tt2(k, k).real() - tkk * tkk);
        for (int l = 0; l < table.L; ++l) {
          if (l == j) continue;
          const double psil = favorable ? psi_fav(l) : cells[l].psi_bar;
          const double t2 =
              favorable ? tdiag[l](k) * tdiag[l](k) : cells[l].Tt2(k, k).real();
          den += psil * table.phi[l](j, k) * table.phi[l](j, k) * t2;
        }
      }
      SinrEntry e = make_entry(j, k, scheme, direction, num, 0.0, 0.0, den);
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace mimolab
