#pragma once

#include <optional>

#include "vwss/scores.hpp"
#include "vwss/series.hpp"
#include "vwss/weights.hpp"

namespace vwss {

/// Everything needed to turn (labels, predictions) into one number: which
/// skill score, whether the confusion matrix is quality or value-weighted,
/// and the window used in the weighted case.
struct ScoringSpec {
  SkillScore kind = SkillScore::kTss;
  MatrixMode mode = MatrixMode::kQuality;
  WindowConfig window;
};

/// Builds the confusion matrix the ScoringSpec's mode asks for.
ConfusionMatrix build_matrix(const ScoringSpec& spec, const LabelSeries& y,
                             const PredictionSeries& p);

/// Scores (y, p) under the given rule; throws UndefinedScoreError when the score's
/// denominator vanishes.
double score_of(const ScoringSpec& spec, const LabelSeries& y,
                const PredictionSeries& p);

/// Non-throwing variant for search loops: nullopt where score_of would throw.
std::optional<double> maybe_score_of(const ScoringSpec& spec,
                                     const LabelSeries& y,
                                     const PredictionSeries& p);

}  // namespace vwss
