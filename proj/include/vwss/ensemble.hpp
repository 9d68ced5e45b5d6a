#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vwss/scoring.hpp"
#include "vwss/series.hpp"
#include "vwss/thresholding.hpp"

namespace vwss {

/// One training epoch's probabilistic forecasts on the train and validation
/// splits, plus the calibration state attached to it later: the threshold
/// optimized on training data and the scores on both splits. tau_star stays
/// empty when the score was undefined at every candidate threshold — such an
/// epoch can never be selected.
struct EpochSnapshot {
  EpochSnapshot(std::size_t epoch, ProbabilitySeries train,
                ProbabilitySeries valid)
      : epoch_index(epoch),
        train_probs(std::move(train)),
        valid_probs(std::move(valid)) {}

  std::size_t epoch_index;
  ProbabilitySeries train_probs;
  ProbabilitySeries valid_probs;
  std::optional<double> tau_star;
  std::optional<double> train_score;
  std::optional<double> valid_score;
};

/// The quality bar an epoch's validation score must strictly exceed to join
/// the ensemble: either a fixed value, or a fraction of the best validation
/// score across epochs.
class QualityLevel {
 public:
  enum class Mode { kAbsolute, kRelativeToMax };

  static QualityLevel absolute(double alpha);
  /// rate must lie in (0, 1].
  static QualityLevel relative_to_max(double rate);

  Mode mode() const { return mode_; }
  double value() const { return value_; }

  /// The concrete cutoff given the maximum validation score observed.
  double cutoff(double max_score) const;

 private:
  QualityLevel(Mode mode, double value) : mode_(mode), value_(value) {}

  Mode mode_;
  double value_;
};

/// Per epoch, finds the threshold maximizing the training score and records
/// it (with the score) on the snapshot. Epochs where every candidate leaves
/// the score undefined keep an empty tau_star. Throws DomainError on an
/// empty sequence or duplicate epoch indices.
std::vector<EpochSnapshot> calibrate_epochs(std::vector<EpochSnapshot> snapshots,
                                            const LabelSeries& y_train,
                                            const ThresholdSearch& search);

/// Scores every calibrated epoch on the validation split with its training
/// threshold frozen (recording valid_score on the snapshots), then returns
/// the epochs whose score strictly exceeds the quality cutoff, in input
/// order. The scoring rule must be the one used during calibration; the
/// threshold interval is deliberately not accepted here — validation never
/// re-optimizes thresholds.
///
/// When no epoch clears the bar: with fallback_to_best the single best
/// epoch is returned; otherwise EmptyEnsembleError carries the best
/// achievable validation score. With no defined validation score at all the
/// error is raised even under fallback.
std::vector<std::size_t> select_epochs(std::vector<EpochSnapshot>& snapshots,
                                       const LabelSeries& y_valid,
                                       const ScoringSpec& spec,
                                       const QualityLevel& level,
                                       bool fallback_to_best = false);

/// Immutable voting classifier: the selected epochs with their frozen
/// thresholds. Classifies a sample as 1 when at least half of the members'
/// binarized forecasts are 1 (an exact tie counts as 1).
class EnsembleClassifier {
 public:
  struct Member {
    std::size_t epoch_index;
    double tau;
  };

  EnsembleClassifier(std::vector<Member> members, ScoringSpec spec);

  const std::vector<Member>& members() const { return members_; }
  const ScoringSpec& spec() const { return spec_; }

  /// probs_per_epoch must hold a series for every member, all of one common
  /// length (InputError / AlignmentError otherwise).
  PredictionSeries predict(
      const std::map<std::size_t, ProbabilitySeries>& probs_per_epoch) const;

 private:
  std::vector<Member> members_;
  ScoringSpec spec_;
};

/// Bundles the selected snapshots into a classifier; `selected` must name
/// existing epoch indices with calibrated thresholds.
EnsembleClassifier make_classifier(const std::vector<EpochSnapshot>& snapshots,
                                   const std::vector<std::size_t>& selected,
                                   const ScoringSpec& spec);

/// Side-by-side verification report: the plain and value-weighted confusion
/// matrices of the predictions plus all four scores on each. A score whose
/// denominator vanishes is reported as empty, not an error.
struct EvaluationReport {
  ConfusionMatrix quality = ConfusionMatrix::quality(0, 0, 0, 0);
  ConfusionMatrix weighted = ConfusionMatrix::value_weighted(0, 0, 0, 0);
  std::array<std::optional<double>, 4> quality_scores{};   // kAllSkillScores order
  std::array<std::optional<double>, 4> weighted_scores{};
};

EvaluationReport evaluate(const LabelSeries& y, const PredictionSeries& p,
                          const WindowConfig& window);

// ---------------------------------------------------------------------------
// Snapshot files: one row per epoch ("j,p1,...,pn"), header "epoch,<split>"
// with split one of train/valid/test. The format is the interchange point
// for forecasts produced by external models.

struct SnapshotRow {
  std::size_t epoch_index;
  ProbabilitySeries probs;
};

struct SnapshotFile {
  std::string split;
  std::vector<SnapshotRow> rows;
};

SnapshotFile read_snapshot_file(const std::filesystem::path& path);
void write_snapshot_file(const std::filesystem::path& path,
                         const SnapshotFile& file);

/// Pairs a train-split file with a valid-split file by epoch index. Both
/// must cover exactly the same epochs.
std::vector<EpochSnapshot> zip_snapshots(const SnapshotFile& train,
                                         const SnapshotFile& valid);

/// Rows keyed by epoch for EnsembleClassifier::predict.
std::map<std::size_t, ProbabilitySeries> probability_map(
    const SnapshotFile& file);

}  // namespace vwss
