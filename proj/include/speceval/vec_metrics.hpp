// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "speceval/errors.hpp"
#include "speceval/spectra.hpp"

namespace speceval {

// Fixed binning grid [low, high) with K = ceil((high-low)/bin_width) bins.
struct BinningConfig {
  double low = 0.0;
  double high = 0.0;
  double bin_width = 1.0;
  // Optional Gaussian spreading of each peak over neighboring bins, in axis
  // units; 0 keeps the plain nearest-bin deposit.
  double spread_sigma = 0.0;

  std::size_t bin_count() const {
    return static_cast<std::size_t>(std::ceil((high - low) / bin_width - 1e-12));
  }

  void check() const {
    if (!(high > low) || !(bin_width > 0.0) || bin_count() < 1 || spread_sigma < 0.0)
      throw Error(errc::config_mismatch, "bad binning config");
  }

  friend bool operator==(const BinningConfig&, const BinningConfig&) = default;

  static BinningConfig ir_default() { return {500.0, 4000.0, 2.0, 0.0}; }
  static BinningConfig ms_default() { return {0.0, 1000.0, 1.0, 0.0}; }
  static BinningConfig uv_default() { return {200.0, 800.0, 1.0, 0.0}; }
};

struct SpectrumVector {
  std::vector<double> values;
  BinningConfig config;
  std::size_t dropped = 0;  // out-of-range peaks, reported as a warning count
};

namespace vec_detail {

inline SpectrumVector deposit(const std::vector<std::pair<double, double>>& peaks,
                              const BinningConfig& cfg) {
  cfg.check();
  SpectrumVector out{std::vector<double>(cfg.bin_count(), 0.0), cfg, 0};
  const double k = static_cast<double>(cfg.bin_count());
  for (auto [pos, inten] : peaks) {
    double x = (pos - cfg.low) / cfg.bin_width;
    if (x < 0.0 || x >= k) {
      out.dropped++;
      continue;
    }
    if (cfg.spread_sigma > 0.0) {
      double sb = cfg.spread_sigma / cfg.bin_width;
      long center = static_cast<long>(x);
      long radius = static_cast<long>(std::ceil(4.0 * sb));
      for (long b = center - radius; b <= center + radius; ++b) {
        if (b < 0 || b >= static_cast<long>(cfg.bin_count())) continue;
        double d = (static_cast<double>(b) + 0.5 - x) / sb;
        out.values[static_cast<std::size_t>(b)] += inten * std::exp(-0.5 * d * d);
      }
    } else {
      out.values[static_cast<std::size_t>(x)] += inten;
    }
  }
  return out;
}

}  // namespace vec_detail

inline SpectrumVector vectorize(const WaveformSpectrum& s, const BinningConfig& cfg) {
  return vec_detail::deposit(s.points, cfg);
}

inline SpectrumVector vectorize(const MassSpectrum& s, const BinningConfig& cfg) {
  return vec_detail::deposit(s.peaks, cfg);
}

// p·q / (|p||q|); 0 when either vector is all zero, so degenerate
// predictions never score well.
inline double cosine_similarity(const SpectrumVector& p, const SpectrumVector& q) {
  if (p.config != q.config || p.values.size() != q.values.size())
    throw Error(errc::config_mismatch, "cosine over mismatched binning configs");
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    dot += p.values[i] * q.values[i];
    np += p.values[i] * p.values[i];
    nq += q.values[i] * q.values[i];
  }
  if (np == 0.0 || nq == 0.0) return 0.0;
  return dot / (std::sqrt(np) * std::sqrt(nq));
}

}  // namespace speceval
