#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vwss/data.hpp"
#include "vwss/ensemble.hpp"
#include "vwss/series.hpp"
#include "vwss/thresholding.hpp"
#include "vwss/weights.hpp"

namespace vwss {

/// JSON form of a confusion matrix (entries plus mode tag).
nlohmann::json matrix_json(const ConfusionMatrix& m);

/// JSON form of an evaluation: both matrices and all eight scores; an
/// undefined score serializes as null. Weighted score names carry a "w"
/// prefix (wACC, wTSS, ...).
nlohmann::json evaluation_json(const EvaluationReport& report);

/// Per-index weight audit CSV: "index,kind,weight" with 1-based indices and
/// kind FP or FN, ordered by index.
void write_weight_report_csv(const std::filesystem::path& path,
                             const WeightReport& report);

/// "index,prediction" rows, 1-based.
void write_predictions_csv(const std::filesystem::path& path,
                           const PredictionSeries& predictions);

/// "index,label" rows, 1-based.
void write_labels_csv(const std::filesystem::path& path,
                      const LabelSeries& labels);

/// "tau,score" rows; an undefined score leaves the field empty.
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurvePoint>& curve);

/// Selected-epoch listing: epoch, threshold, train and validation scores.
void write_selected_epochs_csv(const std::filesystem::path& path,
                               const std::vector<EpochSnapshot>& snapshots,
                               const std::vector<std::size_t>& selected);

/// Reads a binary series file: one value per row, either a single column or
/// index,value pairs; a non-numeric first row is treated as a header.
/// Values must be 0 or 1.
std::vector<std::uint8_t> read_binary_series_file(
    const std::filesystem::path& path);

/// Same shape, but values are probabilities in [0, 1].
std::vector<double> read_probability_series_file(
    const std::filesystem::path& path);

/// Numeric matrix CSV, uniform row width; a first row with any non-numeric
/// field is treated as a header and skipped.
FeatureMatrix read_feature_matrix_csv(const std::filesystem::path& path);

}  // namespace vwss
