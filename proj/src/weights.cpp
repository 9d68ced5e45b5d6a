#include "vwss/weights.hpp"

#include <algorithm>
#include <string>

#include "vwss/errors.hpp"
#include "vwss/kernels.hpp"

namespace vwss {

namespace {

void check_window(const WindowConfig& cfg) {
  if (cfg.k < 1) {
    throw DomainError("window half-size must be >= 1, got " +
                      std::to_string(cfg.k));
  }
}

// Shared core of psi/phi. `seq` is the sequence examined for nearby events
// (labels for psi, predictions for phi) and `dir` is +1 to scan the future,
// -1 to scan the past.
double weight_at(const std::uint8_t* seq, std::size_t n, std::size_t i,
                 int k, int dir) {
  const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, idx - k);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, idx + k);

  bool any_event = false;
  for (std::ptrdiff_t t = lo; t <= hi; ++t) {
    if (seq[t] != 0) {
      any_event = true;
      break;
    }
  }
  if (!any_event) return 2.0;

  // Nearest event in the scanned direction dominates the max of 1/(k+1);
  // if the direction holds no event at all the max is empty and the weight
  // stays at its ceiling of 1 (the event sits on the other side of i).
  double best = 0.0;
  for (int step = 1; step <= k; ++step) {
    const std::ptrdiff_t t = idx + dir * step;
    if (t < 0 || t >= len) continue;
    if (seq[t] != 0) {
      best = std::max(best, 1.0 / (step + 1.0));
    }
  }
  return 1.0 - best;
}

}  // namespace

double psi(const LabelSeries& y, std::size_t i, const WindowConfig& cfg) {
  check_window(cfg);
  if (i >= y.size()) {
    throw DomainError("psi index " + std::to_string(i) +
                      " out of range for series of length " +
                      std::to_string(y.size()));
  }
  return weight_at(y.data(), y.size(), i, cfg.k, +1);
}

double phi(const PredictionSeries& p, std::size_t i, const WindowConfig& cfg) {
  check_window(cfg);
  if (i >= p.size()) {
    throw DomainError("phi index " + std::to_string(i) +
                      " out of range for series of length " +
                      std::to_string(p.size()));
  }
  return weight_at(p.data(), p.size(), i, cfg.k, -1);
}

namespace {

struct WeightedCells {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  double wfp = 0.0;
  double wfn = 0.0;
};

template <typename OnFp, typename OnFn>
WeightedCells accumulate_weighted(const LabelSeries& y,
                                  const PredictionSeries& p,
                                  const WindowConfig& cfg, OnFp&& on_fp,
                                  OnFn&& on_fn) {
  check_window(cfg);
  if (y.size() != p.size()) {
    throw AlignmentError("label series has length " + std::to_string(y.size()) +
                         " but prediction series has length " +
                         std::to_string(p.size()));
  }

  // The correct cells are plain counts; reuse the counting kernel and only
  // walk the series for the mismatches that need a weight.
  const kernels::ConfusionCounts counts =
      kernels::active_table().confusion_count(y.data(), p.data(), y.size());

  WeightedCells cells;
  cells.tp = counts.tp;
  cells.tn = counts.tn;
  const std::uint8_t* ys = y.data();
  const std::uint8_t* ps = p.data();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (ys[i] == ps[i]) continue;
    if (ps[i] != 0) {  // y=0, p=1
      const double w = weight_at(ys, y.size(), i, cfg.k, +1);
      cells.wfp += w;
      on_fp(i, w);
    } else {  // y=1, p=0
      const double w = weight_at(ps, p.size(), i, cfg.k, -1);
      cells.wfn += w;
      on_fn(i, w);
    }
  }
  return cells;
}

}  // namespace

std::pair<ConfusionMatrix, WeightReport> weighted_confusion_matrix(
    const LabelSeries& y, const PredictionSeries& p, const WindowConfig& cfg) {
  WeightReport report;
  const WeightedCells cells = accumulate_weighted(
      y, p, cfg,
      [&report](std::size_t i, double w) { report.fp_weights.emplace_back(i, w); },
      [&report](std::size_t i, double w) { report.fn_weights.emplace_back(i, w); });
  return {ConfusionMatrix::value_weighted(
              static_cast<double>(cells.tp), cells.wfp, cells.wfn,
              static_cast<double>(cells.tn)),
          std::move(report)};
}

ConfusionMatrix weighted_confusion_total(const LabelSeries& y,
                                         const PredictionSeries& p,
                                         const WindowConfig& cfg) {
  const WeightedCells cells = accumulate_weighted(
      y, p, cfg, [](std::size_t, double) {}, [](std::size_t, double) {});
  return ConfusionMatrix::value_weighted(static_cast<double>(cells.tp),
                                         cells.wfp, cells.wfn,
                                         static_cast<double>(cells.tn));
}

}  // namespace vwss
