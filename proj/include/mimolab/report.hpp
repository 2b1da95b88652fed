#pragma once

#include "mimolab/common.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mimolab {

/// One (cell, UE, scheme, direction) result with its denominator split.
/// stderr_rate is NaN unless the row came from Monte Carlo.
struct SinrEntry {
  int cell = 0;
  int ue = 0;
  std::string scheme;      // mrt | mrc | smmse | rzf
  std::string direction;   // ul | dl
  std::string provenance;  // deteq | closedform | montecarlo
  double sinr = 0.0;       // linear
  double rate = 0.0;       // bit/s/Hz
  double signal = 0.0;
  double noise = 0.0;
  double noncoh = 0.0;
  double coh = 0.0;
  double stderr_rate = std::numeric_limits<double>::quiet_NaN();
};

struct SinrReport {
  std::vector<SinrEntry> entries;

  void append(const SinrReport& other);
  double mean_rate() const;
  double mean_rate(int cell) const;

  /// Columns: cell,ue,scheme,direction,provenance,sinr_db,rate,signal,noise,
  /// noncoh,coh,stderr (stderr blank for deterministic rows).
  void write_csv(std::ostream& os) const;
  std::string to_json_text() const;

  /// Writes csv or json to `path` ("-" for stdout); throws io_error.
  void save(const std::string& path, const std::string& format) const;
};

}  // namespace mimolab
