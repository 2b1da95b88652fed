#pragma once

#include "mimolab/channel.hpp"
#include "mimolab/common.hpp"
#include "mimolab/report.hpp"
#include "mimolab/scenario.hpp"

#include <cstdint>
#include <string>

namespace mimolab {

struct McOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  int warmup = 512;   // DL normalizer batch
  int threads = 0;    // 0 -> MIMOLAB_THREADS env or hardware concurrency
};

/// Number of worker threads an McOptions resolves to.
int resolve_threads(const McOptions& opts);

/// Ergodic uplink rates via the conditional SINR given the estimates.
/// scheme: "mrc" | "smmse". Deterministic for fixed (seed, samples)
/// regardless of thread count.
SinrReport mc_uplink(const LargeScaleTable& table, const LoSSet& los,
                     const std::string& scheme, const McOptions& opts);

/// Downlink hardening (use-and-then-forget) SINR; precoder power
/// normalizers are frozen from a warm-up batch. scheme: "mrt" | "rzf".
SinrReport mc_downlink(const LargeScaleTable& table, const LoSSet& los,
                       const std::string& scheme, const McOptions& opts);

}  // namespace mimolab
