// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "speceval/errors.hpp"
#include "speceval/spectra.hpp"

namespace speceval {

struct NmrConfig {
  double tau_c = 0.5;   // ppm, 13C match tolerance
  double tau_h = 0.12;  // ppm, 1H match tolerance
  double sigma = 0.06;  // ppm, Gaussian decay width for 1H weights

  void check() const {
    if (!(tau_c > 0.0 && tau_h > 0.0 && sigma > 0.0))
      throw Error(errc::config_mismatch, "NMR tolerances must be positive");
  }
};

struct MatchPair {
  std::size_t pred_index = 0;  // position in the descending-sorted peak list
  std::size_t true_index = 0;
  double deviation = 0.0;  // ppm
  double weight = 0.0;     // Gaussian overlap weight; 0 for 13C pairs
};

struct MatchScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> mae;      // absent when nothing matched
  std::optional<double> jaccard;  // 1H only
  std::size_t n_match = 0;
  std::size_t n_pred = 0;
  std::size_t n_true = 0;
  std::vector<MatchPair> pairs;
};

namespace nmr_detail {

inline void fill_counts(MatchScore& s) {
  if (s.n_pred == 0 && s.n_true == 0) {
    // Both empty: a vacuously perfect prediction.
    s.precision = s.recall = s.f1 = 1.0;
    s.mae = 0.0;
    return;
  }
  s.precision = s.n_pred ? static_cast<double>(s.n_match) / static_cast<double>(s.n_pred) : 0.0;
  s.recall = s.n_true ? static_cast<double>(s.n_match) / static_cast<double>(s.n_true) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  if (s.n_match > 0) {
    double sum = 0.0;
    for (const auto& p : s.pairs) sum += p.deviation;
    s.mae = sum / static_cast<double>(s.n_match);
  }
}

}  // namespace nmr_detail

inline double gaussian_overlap_weight(int nh_pred, int nh_true, double delta, double sigma) {
  double r = delta / sigma;
  return static_cast<double>(std::min(nh_pred, nh_true)) * std::exp(-0.5 * r * r);
}

// Greedy nearest-neighbor matching for 13C. Predictions are scanned in
// descending shift order (the stored order); each takes the unused truth
// peak with the smallest absolute difference, if that difference is within
// tau_c. Equidistant candidates resolve to the lower truth index.
inline MatchScore score_carbon(const CarbonSpectrum& pred, const CarbonSpectrum& truth,
                               const NmrConfig& cfg = {}) {
  cfg.check();
  MatchScore score;
  score.n_pred = pred.shifts.size();
  score.n_true = truth.shifts.size();
  std::vector<bool> used(truth.shifts.size(), false);
  for (std::size_t j = 0; j < pred.shifts.size(); ++j) {
    std::size_t best = truth.shifts.size();
    double best_dev = 0.0;
    for (std::size_t i = 0; i < truth.shifts.size(); ++i) {
      if (used[i]) continue;
      double dev = std::abs(pred.shifts[j] - truth.shifts[i]);
      if (dev > cfg.tau_c) continue;
      if (best == truth.shifts.size() || dev < best_dev) {
        best = i;
        best_dev = dev;
      }
    }
    if (best < truth.shifts.size()) {
      used[best] = true;
      score.pairs.push_back({j, best, best_dev, 0.0});
    }
  }
  score.n_match = score.pairs.size();
  nmr_detail::fill_counts(score);
  return score;
}

// Tolerance-constrained greedy matching for 1H that maximizes the Gaussian
// overlap weight w = min(nH_pred, nH_true) * exp(-(|Δ|/σ)²/2) per prediction.
// Multiplicity and J values are parsed but never scored. The weighted Jaccard
// is W_match / (W_pred + W_true - W_match) over total proton counts.
inline MatchScore score_proton(const ProtonSpectrum& pred, const ProtonSpectrum& truth,
                               const NmrConfig& cfg = {}) {
  cfg.check();
  MatchScore score;
  score.n_pred = pred.peaks.size();
  score.n_true = truth.peaks.size();
  std::vector<bool> used(truth.peaks.size(), false);
  double w_match = 0.0;
  for (std::size_t j = 0; j < pred.peaks.size(); ++j) {
    std::size_t best = truth.peaks.size();
    double best_w = 0.0, best_dev = 0.0;
    for (std::size_t i = 0; i < truth.peaks.size(); ++i) {
      if (used[i]) continue;
      double dev = std::abs(pred.peaks[j].centroid - truth.peaks[i].centroid);
      if (dev > cfg.tau_h) continue;
      double w = gaussian_overlap_weight(pred.peaks[j].n_h, truth.peaks[i].n_h, dev, cfg.sigma);
      if (best == truth.peaks.size() || w > best_w) {
        best = i;
        best_w = w;
        best_dev = dev;
      }
    }
    if (best < truth.peaks.size()) {
      used[best] = true;
      score.pairs.push_back({j, best, best_dev, best_w});
      w_match += best_w;
    }
  }
  score.n_match = score.pairs.size();
  nmr_detail::fill_counts(score);
  double w_pred = 0.0, w_true = 0.0;
  for (const auto& p : pred.peaks) w_pred += p.n_h;
  for (const auto& p : truth.peaks) w_true += p.n_h;
  double denom = w_pred + w_true - w_match;
  score.jaccard = denom > 0.0 ? w_match / denom : 1.0;  // both empty → perfect
  return score;
}

inline MatchScore score_carbon_text(std::string_view pred_text, std::string_view truth_text,
                                    const NmrConfig& cfg = {}) {
  auto pred = std::get<CarbonSpectrum>(parse_spectrum(pred_text));
  auto truth = std::get<CarbonSpectrum>(parse_spectrum(truth_text));
  return score_carbon(pred, truth, cfg);
}

inline MatchScore score_proton_text(std::string_view pred_text, std::string_view truth_text,
                                    const NmrConfig& cfg = {}) {
  auto pred = std::get<ProtonSpectrum>(parse_spectrum(pred_text));
  auto truth = std::get<ProtonSpectrum>(parse_spectrum(truth_text));
  return score_proton(pred, truth, cfg);
}

// Corpus-level summary: unweighted means per field. MAE (and jaccard) average
// only the spectra where they are present; the exclusions are counted.
struct ScoreSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> mae;
  std::size_t mae_excluded = 0;
  std::optional<double> jaccard;
  double n_match = 0.0;  // mean counts
  double n_pred = 0.0;
  double n_true = 0.0;
  std::size_t n_spectra = 0;
};

inline ScoreSummary aggregate_scores(const std::vector<MatchScore>& scores) {
  if (scores.empty()) throw Error(errc::empty_list, "no scores to aggregate");
  ScoreSummary out;
  out.n_spectra = scores.size();
  double mae_sum = 0.0, jac_sum = 0.0;
  std::size_t mae_n = 0, jac_n = 0;
  for (const MatchScore& s : scores) {
    out.precision += s.precision;
    out.recall += s.recall;
    out.f1 += s.f1;
    out.n_match += static_cast<double>(s.n_match);
    out.n_pred += static_cast<double>(s.n_pred);
    out.n_true += static_cast<double>(s.n_true);
    if (s.mae) {
      mae_sum += *s.mae;
      ++mae_n;
    }
    if (s.jaccard) {
      jac_sum += *s.jaccard;
      ++jac_n;
    }
  }
  const double n = static_cast<double>(scores.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  out.n_match /= n;
  out.n_pred /= n;
  out.n_true /= n;
  out.mae_excluded = scores.size() - mae_n;
  if (mae_n) out.mae = mae_sum / static_cast<double>(mae_n);
  if (jac_n) out.jaccard = jac_sum / static_cast<double>(jac_n);
  return out;
}

}  // namespace speceval
