#include "vwss/scoring.hpp"

namespace vwss {

ConfusionMatrix build_matrix(const ScoringSpec& spec, const LabelSeries& y,
                             const PredictionSeries& p) {
  if (spec.mode == MatrixMode::kValueWeighted) {
    return weighted_confusion_total(y, p, spec.window);
  }
  return confusion_matrix(y, p);
}

double score_of(const ScoringSpec& spec, const LabelSeries& y,
                const PredictionSeries& p) {
  return score(spec.kind, build_matrix(spec, y, p));
}

std::optional<double> maybe_score_of(const ScoringSpec& spec,
                                     const LabelSeries& y,
                                     const PredictionSeries& p) {
  return maybe_score(spec.kind, build_matrix(spec, y, p));
}

}  // namespace vwss
