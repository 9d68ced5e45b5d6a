#include "vwss/series.hpp"

#include <cmath>
#include <string>

#include "vwss/kernels.hpp"

namespace vwss {
namespace {

void check_binary(const std::vector<std::uint8_t>& values, const char* what) {
  if (values.empty()) {
    throw DomainError(std::string(what) + " must not be empty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) {
      throw DomainError(std::string(what) + " element " + std::to_string(i) +
                        " is " + std::to_string(values[i]) +
                        ", expected 0 or 1");
    }
  }
}

}  // namespace

LabelSeries::LabelSeries(std::vector<std::uint8_t> values)
    : values_(std::move(values)) {
  check_binary(values_, "label series");
}

PredictionSeries::PredictionSeries(std::vector<std::uint8_t> values)
    : values_(std::move(values)) {
  check_binary(values_, "prediction series");
}

ProbabilitySeries::ProbabilitySeries(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw DomainError("probability series must not be empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("probability at index " + std::to_string(i) + " is " +
                        std::to_string(v) + ", expected a value in [0,1]");
    }
  }
}

ConfusionMatrix ConfusionMatrix::quality(double tp, double fp, double fn,
                                         double tn) {
  const double entries[4] = {tp, fp, fn, tn};
  for (double e : entries) {
    if (!(e >= 0.0)) throw DomainError("confusion matrix entries must be >= 0");
    if (std::floor(e) != e) {
      throw DomainError("quality-mode confusion matrix entries must be integers");
    }
  }
  return ConfusionMatrix(tp, fp, fn, tn, MatrixMode::kQuality);
}

ConfusionMatrix ConfusionMatrix::value_weighted(double tp, double fp,
                                                double fn, double tn) {
  const double entries[4] = {tp, fp, fn, tn};
  for (double e : entries) {
    if (!(e >= 0.0)) throw DomainError("confusion matrix entries must be >= 0");
  }
  return ConfusionMatrix(tp, fp, fn, tn, MatrixMode::kValueWeighted);
}

ConfusionMatrix confusion_matrix(const LabelSeries& y,
                                 const PredictionSeries& p) {
  if (y.size() != p.size()) {
    throw AlignmentError("label series has length " + std::to_string(y.size()) +
                         " but prediction series has length " +
                         std::to_string(p.size()));
  }
  const auto c =
      kernels::active_table().confusion_count(y.data(), p.data(), y.size());
  return ConfusionMatrix::quality(static_cast<double>(c.tp),
                                  static_cast<double>(c.fp),
                                  static_cast<double>(c.fn),
                                  static_cast<double>(c.tn));
}

PredictionSeries apply_threshold(const ProbabilitySeries& probs, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("threshold " + std::to_string(tau) +
                      " is outside [0,1]");
  }
  std::vector<std::uint8_t> out(probs.size());
  kernels::active_table().threshold_gt(probs.data(), probs.size(), tau,
                                       out.data());
  return PredictionSeries(std::move(out));
}

}  // namespace vwss
