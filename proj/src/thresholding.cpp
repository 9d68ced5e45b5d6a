#include "vwss/thresholding.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>

#include "vwss/errors.hpp"

namespace vwss {

namespace {

void check_interval(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw DomainError("threshold interval must satisfy 0 <= lo < hi <= 1, got [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

void check_lengths(const LabelSeries& y, const ProbabilitySeries& probs) {
  if (y.size() != probs.size()) {
    throw AlignmentError("label series has length " + std::to_string(y.size()) +
                         " but probability series has length " +
                         std::to_string(probs.size()));
  }
}

// Quality-mode sweep support: probabilities sorted ascending alongside their
// labels, plus suffix positive counts. The confusion matrix at threshold tau
// then falls out of one binary search.
struct SortedSweep {
  std::vector<double> probs;
  std::vector<std::uint64_t> suffix_pos;  // positives among probs[i..n)
  std::uint64_t total_pos = 0;

  SortedSweep(const LabelSeries& y, const ProbabilitySeries& p) {
    const std::size_t n = p.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&p](std::size_t a, std::size_t b) {
      return p.values()[a] < p.values()[b];
    });
    probs.resize(n);
    suffix_pos.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) probs[i] = p.values()[order[i]];
    for (std::size_t i = n; i-- > 0;) {
      suffix_pos[i] = suffix_pos[i + 1] + y.values()[order[i]];
    }
    total_pos = suffix_pos[0];
  }

  ConfusionMatrix matrix_at(double tau) const {
    const std::size_t n = probs.size();
    const std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(probs.begin(), probs.end(), tau) - probs.begin());
    const std::uint64_t predicted_pos = n - idx;
    const std::uint64_t tp = suffix_pos[idx];
    const std::uint64_t fp = predicted_pos - tp;
    const std::uint64_t fn = total_pos - tp;
    const std::uint64_t tn = (n - predicted_pos) - fn;
    return ConfusionMatrix::quality(static_cast<double>(tp),
                                    static_cast<double>(fp),
                                    static_cast<double>(fn),
                                    static_cast<double>(tn));
  }
};

ConfusionMatrix matrix_at_threshold(const ScoringSpec& spec,
                                    const LabelSeries& y,
                                    const ProbabilitySeries& probs,
                                    double tau) {
  return build_matrix(spec, y, apply_threshold(probs, tau));
}

}  // namespace

std::vector<double> threshold_candidates(const ProbabilitySeries& probs,
                                         double lo, double hi) {
  check_interval(lo, hi);

  std::vector<double> distinct(probs.values());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.reserve(distinct.size() + 2);
  candidates.push_back(lo);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    const double mid = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
    if (mid >= lo && mid <= hi) candidates.push_back(mid);
  }
  candidates.push_back(hi);

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  return candidates;
}

ThresholdResult optimize_threshold(const LabelSeries& y,
                                   const ProbabilitySeries& probs,
                                   const ThresholdSearch& search) {
  check_lengths(y, probs);
  const std::vector<double> candidates =
      threshold_candidates(probs, search.lo, search.hi);

  std::optional<double> best_score;
  double best_tau = 0.0;

  if (search.spec.mode == MatrixMode::kQuality) {
    const SortedSweep sweep(y, probs);
    for (const double tau : candidates) {
      const std::optional<double> s =
          maybe_score(search.spec.kind, sweep.matrix_at(tau));
      if (s && (!best_score || *s > *best_score)) {
        best_score = s;
        best_tau = tau;
      }
    }
  } else {
    for (const double tau : candidates) {
      const std::optional<double> s = maybe_score(
          search.spec.kind, matrix_at_threshold(search.spec, y, probs, tau));
      if (s && (!best_score || *s > *best_score)) {
        best_score = s;
        best_tau = tau;
      }
    }
  }

  if (!best_score) {
    throw NoFeasibleThresholdError(
        "score " + std::string(skill_score_name(search.spec.kind)) +
        " is undefined at every candidate threshold in [" +
        std::to_string(search.lo) + ", " + std::to_string(search.hi) + "]");
  }

  // Recompute at the winner so the reported matrix/score pair is exactly the
  // one a caller would get by applying tau themselves.
  ThresholdResult result;
  result.tau = best_tau;
  result.matrix = matrix_at_threshold(search.spec, y, probs, best_tau);
  result.score = score(search.spec.kind, result.matrix);
  result.candidates_evaluated = candidates.size();
  return result;
}

std::vector<CurvePoint> score_curve(const LabelSeries& y,
                                    const ProbabilitySeries& probs,
                                    const ThresholdSearch& search) {
  check_lengths(y, probs);
  const std::vector<double> candidates =
      threshold_candidates(probs, search.lo, search.hi);

  std::vector<CurvePoint> curve;
  curve.reserve(candidates.size());
  if (search.spec.mode == MatrixMode::kQuality) {
    const SortedSweep sweep(y, probs);
    for (const double tau : candidates) {
      curve.push_back({tau, maybe_score(search.spec.kind, sweep.matrix_at(tau))});
    }
  } else {
    for (const double tau : candidates) {
      curve.push_back({tau, maybe_score(search.spec.kind,
                                        matrix_at_threshold(search.spec, y,
                                                            probs, tau))});
    }
  }
  return curve;
}

}  // namespace vwss
