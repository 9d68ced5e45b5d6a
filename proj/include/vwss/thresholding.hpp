#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vwss/scoring.hpp"
#include "vwss/series.hpp"

namespace vwss {

/// Search configuration: the closed threshold interval [lo, hi] and the
/// scoring rule being maximized. Candidates are lo, hi, and the midpoints
/// between consecutive distinct probability values that fall inside the
/// interval — between two such candidates every threshold binarizes the
/// probabilities identically, so nothing else needs to be probed.
struct ThresholdSearch {
  double lo = 0.0;
  double hi = 1.0;
  ScoringSpec spec;
};

struct ThresholdResult {
  double tau = 0.0;
  double score = 0.0;
  ConfusionMatrix matrix = ConfusionMatrix::quality(0, 0, 0, 0);
  std::size_t candidates_evaluated = 0;
};

/// One probed threshold; score is empty where the skill score's denominator
/// vanished at that threshold.
struct CurvePoint {
  double tau = 0.0;
  std::optional<double> score;
};

/// The candidate set described above, ascending and deduplicated.
std::vector<double> threshold_candidates(const ProbabilitySeries& probs,
                                         double lo, double hi);

/// Maximizes the score over the candidate set. Ties resolve to the smallest
/// threshold; the returned score and matrix are recomputed at the winning
/// threshold. Throws NoFeasibleThresholdError when the score is undefined at
/// every candidate.
ThresholdResult optimize_threshold(const LabelSeries& y,
                                   const ProbabilitySeries& probs,
                                   const ThresholdSearch& search);

/// Scores every candidate, keeping undefined points in the output.
std::vector<CurvePoint> score_curve(const LabelSeries& y,
                                    const ProbabilitySeries& probs,
                                    const ThresholdSearch& search);

}  // namespace vwss
