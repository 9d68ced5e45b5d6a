#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "vwss/errors.hpp"

namespace vwss {

/// Time-ordered binary ground-truth labels, one per sample. Immutable after
/// construction; index i precedes index i+1 in time.
class LabelSeries {
 public:
  explicit LabelSeries(std::vector<std::uint8_t> values);

  std::size_t size() const { return values_.size(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  const std::uint8_t* data() const { return values_.data(); }

 private:
  std::vector<std::uint8_t> values_;
};

/// Binary predictions aligned index-by-index with a LabelSeries.
class PredictionSeries {
 public:
  explicit PredictionSeries(std::vector<std::uint8_t> values);

  std::size_t size() const { return values_.size(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  const std::uint8_t* data() const { return values_.data(); }

 private:
  std::vector<std::uint8_t> values_;
};

/// Probabilistic classifier outputs, each in [0, 1].
class ProbabilitySeries {
 public:
  explicit ProbabilitySeries(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  const double* data() const { return values_.data(); }

 private:
  std::vector<double> values_;
};

enum class MatrixMode { kQuality, kValueWeighted };

/// 2x2 confusion matrix. Entries are stored as reals in both modes so the
/// quality and value-weighted variants share every score formula; quality
/// mode additionally guarantees integral entries.
class ConfusionMatrix {
 public:
  static ConfusionMatrix quality(double tp, double fp, double fn, double tn);
  static ConfusionMatrix value_weighted(double tp, double fp, double fn,
                                        double tn);

  double tp() const { return tp_; }
  double fp() const { return fp_; }
  double fn() const { return fn_; }
  double tn() const { return tn_; }
  MatrixMode mode() const { return mode_; }
  double total() const { return tp_ + fp_ + fn_ + tn_; }

 private:
  ConfusionMatrix(double tp, double fp, double fn, double tn, MatrixMode mode)
      : tp_(tp), fp_(fp), fn_(fn), tn_(tn), mode_(mode) {}

  double tp_, fp_, fn_, tn_;
  MatrixMode mode_;
};

/// Quality-mode confusion matrix of p against y:
/// tp = #{y=1,p=1}, fp = #{y=0,p=1}, fn = #{y=1,p=0}, tn = #{y=0,p=0}.
ConfusionMatrix confusion_matrix(const LabelSeries& y,
                                 const PredictionSeries& p);

/// Binarize probabilities with a strictly-greater-than comparison:
/// out[i] = 1 iff probs[i] > tau. tau must lie in [0, 1].
PredictionSeries apply_threshold(const ProbabilitySeries& probs, double tau);

}  // namespace vwss
