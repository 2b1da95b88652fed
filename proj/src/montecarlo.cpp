#include "mimolab/montecarlo.hpp"

#include "mimolab/deteq.hpp"
#include "mimolab/estimation.hpp"
#include "mimolab/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mimolab {

namespace {

// Fixed block partition: results depend on (seed, samples) only, never on
// how many workers pulled blocks.
constexpr int kBlockSize = 64;
constexpr std::uint64_t kWarmupStreamOffset = 1ull << 32;

int block_count(int samples) {
  return (samples + kBlockSize - 1) / kBlockSize;
}

int block_reps(int samples, int b) {
  return std::min(kBlockSize, samples - b * kBlockSize);
}

void run_blocks(int n_blocks, int threads,
                const std::function<void(int)>& work) {
  threads = std::min(threads, n_blocks);
  if (threads <= 1) {
    for (int b = 0; b < n_blocks; ++b) work(b);
    return;
  }
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int b; (b = next.fetch_add(1)) < n_blocks;) work(b);
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
}

void check_samples(const McOptions& opts) {
  if (opts.samples <= 0)
    throw std::invalid_argument("monte carlo: samples must be positive");
}

// hhat (lambda I_K + hhat^H hhat / N)^{-1} / N  ==  (lambda I_N +
// hhat hhat^H / N)^{-1} hhat / N, kept K x K.
MatC regularized_combiner(const MatC& hhat, double lambda, int N) {
  const int K = static_cast<int>(hhat.cols());
  MatC G = hhat.adjoint() * hhat / double(N);
  for (int k = 0; k < K; ++k) G(k, k) += lambda;
  return hhat * G.llt().solve(MatC::Identity(K, K)) / double(N);
}

struct UlBlockSums {
  MatD rate, rate_sq, sinr, sig, noise, noncoh, coh;
  void init(int L, int K) {
    rate = MatD::Zero(L, K);
    rate_sq = MatD::Zero(L, K);
    sinr = MatD::Zero(L, K);
    sig = MatD::Zero(L, K);
    noise = MatD::Zero(L, K);
    noncoh = MatD::Zero(L, K);
    coh = MatD::Zero(L, K);
  }
};

struct DlBlockSums {
  MatC sig;
  MatD pw;
  void init(int L, int K) {
    sig = MatC::Zero(L, K);
    pw = MatD::Zero(L, K);
  }
};

}  // namespace

int resolve_threads(const McOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("MIMOLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

SinrReport mc_uplink(const LargeScaleTable& table, const LoSSet& los,
                     const std::string& scheme, const McOptions& opts) {
  if (scheme != "mrc" && scheme != "smmse")
    throw std::invalid_argument("mc_uplink: scheme must be mrc or smmse");
  check_samples(opts);
  const int L = table.L, K = table.K, N = table.N;

  VecD evar(L);
  for (int j = 0; j < L; ++j) evar(j) = residual_variance(table, j);

  const int n_blocks = block_count(opts.samples);
  std::vector<UlBlockSums> blocks(n_blocks);

  auto work = [&](int b) {
    UlBlockSums& acc = blocks[b];
    acc.init(L, K);
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(b)));
    const int reps = block_reps(opts.samples, b);
    for (int r = 0; r < reps; ++r) {
      const ChannelRealization real = sample_channels(table, los, rng);
      const EstimateSet est = mmse_estimate(real, table, los, rng);
      for (int j = 0; j < L; ++j) {
        const MatC& hhat = est.hhat[j];
        const MatC V = scheme == "mrc"
                           ? hhat
                           : regularized_combiner(hhat, table.lambda(j), N);
        const MatC A = V.adjoint() * hhat;
        const MatC B = V.adjoint() * (hhat - los.hbar[j]);
        const VecD nrm = V.colwise().squaredNorm().real().transpose();
        for (int k = 0; k < K; ++k) {
          const double num = std::norm(A(k, k));
          double intra = 0.0;
          for (int i = 0; i < K; ++i)
            if (i != k) intra += std::norm(A(k, i));
          double cross = 0.0;
          for (int l = 0; l < L; ++l) {
            if (l == j) continue;
            for (int i = 0; i < K; ++i) {
              const double ratio = table.c[j](l, i) / table.c[j](j, i);
              cross += ratio * ratio * std::norm(B(k, i));
            }
          }
          const double noise = nrm(k) * (evar(j) + 1.0 / table.rho_ul);
          const double g = num / (intra + cross + noise);
          const double rate = rate_from_sinr(g);
          acc.rate(j, k) += rate;
          acc.rate_sq(j, k) += rate * rate;
          acc.sinr(j, k) += g;
          acc.sig(j, k) += num;
          acc.noise(j, k) += noise;
          acc.noncoh(j, k) += intra;
          acc.coh(j, k) += cross;
        }
      }
    }
  };
  run_blocks(n_blocks, resolve_threads(opts), work);

  UlBlockSums total;
  total.init(L, K);
  for (const UlBlockSums& b : blocks) {
    total.rate += b.rate;
    total.rate_sq += b.rate_sq;
    total.sinr += b.sinr;
    total.sig += b.sig;
    total.noise += b.noise;
    total.noncoh += b.noncoh;
    total.coh += b.coh;
  }

  const double n = opts.samples;
  SinrReport rep;
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      SinrEntry e;
      e.cell = j;
      e.ue = k;
      e.scheme = scheme;
      e.direction = "ul";
      e.provenance = "montecarlo";
      e.sinr = total.sinr(j, k) / n;
      e.rate = total.rate(j, k) / n;
      e.signal = total.sig(j, k) / n;
      e.noise = total.noise(j, k) / n;
      e.noncoh = total.noncoh(j, k) / n;
      e.coh = total.coh(j, k) / n;
      if (opts.samples > 1) {
        const double var =
            (total.rate_sq(j, k) / n - e.rate * e.rate) * n / (n - 1.0);
        e.stderr_rate = std::sqrt(std::max(0.0, var) / n);
      }
      rep.entries.push_back(e);
    }
  }
  return rep;
}

SinrReport mc_downlink(const LargeScaleTable& table, const LoSSet& los,
                       const std::string& scheme, const McOptions& opts) {
  if (scheme != "mrt" && scheme != "rzf")
    throw std::invalid_argument("mc_downlink: scheme must be mrt or rzf");
  check_samples(opts);
  if (opts.warmup <= 0)
    throw std::invalid_argument("mc_downlink: warmup must be positive");
  const int L = table.L, K = table.K, N = table.N;

  auto precoders = [&](const EstimateSet& est) {
    std::vector<MatC> U(L);
    for (int l = 0; l < L; ++l)
      U[l] = scheme == "mrt"
                 ? est.hhat[l]
                 : regularized_combiner(est.hhat[l], table.lambda(l), N);
    return U;
  };

  // Warm-up: freeze per-cell power normalizers from an independent batch.
  const int n_warm_blocks = block_count(opts.warmup);
  std::vector<VecD> warm(n_warm_blocks);
  auto warm_work = [&](int b) {
    warm[b] = VecD::Zero(L);
    Rng rng(derive_seed(opts.seed,
                        kWarmupStreamOffset + static_cast<std::uint64_t>(b)));
    const int reps = block_reps(opts.warmup, b);
    for (int r = 0; r < reps; ++r) {
      const ChannelRealization real = sample_channels(table, los, rng);
      const EstimateSet est = mmse_estimate(real, table, los, rng);
      const std::vector<MatC> U = precoders(est);
      for (int l = 0; l < L; ++l)
        warm[b](l) += U[l].colwise().squaredNorm().mean();
    }
  };
  run_blocks(n_warm_blocks, resolve_threads(opts), warm_work);
  VecD scale = VecD::Zero(L);
  for (const VecD& w : warm) scale += w;
  scale = (scale / double(opts.warmup)).cwiseInverse();

  const int n_blocks = block_count(opts.samples);
  std::vector<DlBlockSums> blocks(n_blocks);
  auto work = [&](int b) {
    DlBlockSums& acc = blocks[b];
    acc.init(L, K);
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(b)));
    const int reps = block_reps(opts.samples, b);
    for (int r = 0; r < reps; ++r) {
      const ChannelRealization real = sample_channels(table, los, rng);
      const EstimateSet est = mmse_estimate(real, table, los, rng);
      const std::vector<MatC> U = precoders(est);
      for (int j = 0; j < L; ++j) {
        for (int l = 0; l < L; ++l) {
          const MatC G = real.h[l][j].adjoint() * U[l];
          acc.pw.row(j) += scale(l) * G.cwiseAbs2().rowwise().sum().transpose();
          if (l == j)
            acc.sig.row(j) +=
                std::sqrt(scale(l)) * G.diagonal().transpose();
        }
      }
    }
  };
  run_blocks(n_blocks, resolve_threads(opts), work);

  MatC sig_tot = MatC::Zero(L, K);
  MatD pw_tot = MatD::Zero(L, K);
  for (const DlBlockSums& b : blocks) {
    sig_tot += b.sig;
    pw_tot += b.pw;
  }

  auto rate_at = [&](const cplx& s_sum, double p_sum, double count) {
    const double s = std::norm(s_sum / count);
    const double denom = 1.0 / table.rho_dl + p_sum / count - s;
    return rate_from_sinr(s / denom);
  };

  const double n = opts.samples;
  SinrReport rep;
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      SinrEntry e;
      e.cell = j;
      e.ue = k;
      e.scheme = scheme;
      e.direction = "dl";
      e.provenance = "montecarlo";
      e.signal = std::norm(sig_tot(j, k) / n);
      e.noise = 1.0 / table.rho_dl;
      e.noncoh = pw_tot(j, k) / n - e.signal;
      e.coh = 0.0;
      e.sinr = e.signal / (e.noise + e.noncoh);
      e.rate = rate_from_sinr(e.sinr);
      if (n_blocks > 1) {
        // Delete-one-block jackknife on the plug-in rate.
        double mean = 0.0;
        std::vector<double> leave(n_blocks);
        for (int b = 0; b < n_blocks; ++b) {
          const double nb = block_reps(opts.samples, b);
          leave[b] = rate_at(sig_tot(j, k) - blocks[b].sig(j, k),
                             pw_tot(j, k) - blocks[b].pw(j, k), n - nb);
          mean += leave[b];
        }
        mean /= n_blocks;
        double ss = 0.0;
        for (double v : leave) ss += (v - mean) * (v - mean);
        e.stderr_rate =
            std::sqrt(ss * (n_blocks - 1.0) / double(n_blocks));
      }
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace mimolab
