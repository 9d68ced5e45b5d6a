#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vwss/series.hpp"

namespace vwss {

/// Half-size K of the temporal window {i-K, ..., i, ..., i+K} used by the
/// error-weighting functions. Window cells outside the series are treated as
/// absent: they contribute neither to the existence test nor to the max.
struct WindowConfig {
  int k = 3;
};

/// Per-index audit trail of the value weighting: one (index, weight) entry
/// for every false positive and every false negative. Indices are 0-based;
/// the CSV serialization writes them 1-based.
struct WeightReport {
  std::vector<std::pair<std::size_t, double>> fp_weights;
  std::vector<std::pair<std::size_t, double>> fn_weights;
};

// Value weight of a false positive at index i. The weight looks at the
// labels inside the window around i:
//   - no event anywhere in the window            -> 2   (isolated false alarm)
//   - events only at or before i                 -> 1   (alarm after the fact)
//   - an event k steps ahead (nearest wins)      -> 1 - 1/(k+1), in [1/2, 1)
// The caller is expected to evaluate it only where y[i] = 0 and the paired
// prediction is 1; the function itself checks just the index range.
double psi(const LabelSeries& y, std::size_t i, const WindowConfig& cfg);

// Value weight of a false negative at index i, the mirror image of psi on
// the prediction sequence: an alarm k steps in the past discounts the miss
// to 1 - 1/(k+1); an alarm only after i gives 1; no alarm in the window, 2.
double phi(const PredictionSeries& p, std::size_t i, const WindowConfig& cfg);

/// Value-weighted confusion matrix: tp and tn are the plain counts while the
/// fp and fn cells accumulate psi and phi over the incorrect indices. The
/// report lists every contributing index with its weight.
std::pair<ConfusionMatrix, WeightReport> weighted_confusion_matrix(
    const LabelSeries& y, const PredictionSeries& p, const WindowConfig& cfg);

/// Matrix-only variant for hot loops (threshold sweeps) that do not need the
/// per-index report.
ConfusionMatrix weighted_confusion_total(const LabelSeries& y,
                                         const PredictionSeries& p,
                                         const WindowConfig& cfg);

}  // namespace vwss
