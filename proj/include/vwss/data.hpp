#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vwss/series.hpp"

namespace vwss {

/// Which CSV columns to load and which cell texts mean "missing". Column
/// names must appear in the file header; everything but the timestamp column
/// is numeric.
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::vector<std::string> value_columns;
  std::vector<std::string> missing_markers = {"", "NA", "NaN", "null"};
};

/// Seconds since the Unix epoch, UTC. Accepts "YYYY-MM-DD" with an optional
/// "HH:MM[:SS]" part separated by 'T' or a space, and an optional trailing
/// 'Z'. `where` names the file location for error messages.
std::int64_t parse_timestamp(std::string_view text, const std::string& where);

/// Inverse of parse_timestamp: "YYYY-MM-DDTHH:MM:SS" (UTC).
std::string format_timestamp(std::int64_t seconds);

/// Immutable column-oriented time series with strictly increasing UTC
/// timestamps and a missing-cell mask. Masked cells hold NaN.
class TimeSeriesTable {
 public:
  TimeSeriesTable(std::vector<std::int64_t> timestamps,
                  std::vector<std::string> names,
                  std::vector<std::vector<double>> columns,
                  std::vector<std::vector<std::uint8_t>> missing);

  std::size_t rows() const { return timestamps_.size(); }
  const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<double>& column(const std::string& name) const;
  bool is_missing(const std::string& name, std::size_t row) const;
  bool column_has_missing(const std::string& name) const;

 private:
  std::size_t column_index(const std::string& name) const;

  std::vector<std::int64_t> timestamps_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<std::uint8_t>> missing_;
};

TimeSeriesTable load_csv(const std::filesystem::path& path,
                         const CsvSchema& schema);

/// Daily closing prices, strictly positive, on strictly increasing dates.
class PriceSeries {
 public:
  PriceSeries(std::vector<std::int64_t> dates, std::vector<double> closes);

  std::size_t size() const { return closes_.size(); }
  const std::vector<std::int64_t>& dates() const { return dates_; }
  const std::vector<double>& closes() const { return closes_; }

 private:
  std::vector<std::int64_t> dates_;
  std::vector<double> closes_;
};

/// Day-over-day percentage change: element t is
/// (close[t+1] - close[t]) / close[t] * 100, so the output is one shorter
/// than the input and element t describes the move INTO day t+1.
std::vector<double> daily_percentage_change(const PriceSeries& prices);

/// How raw observations become binary event labels.
class LabelRule {
 public:
  enum class Kind { kExceedsThreshold, kDownMovement };

  /// Label at time T is 1 iff column's value at T+horizon exceeds threshold.
  static LabelRule exceeds_threshold(std::string column, double threshold,
                                     std::size_t horizon);
  /// Label 1 iff the percentage change is strictly below level (a "down"
  /// movement; level -1 marks days losing more than 1%).
  static LabelRule down_movement(double level);

  Kind kind() const { return kind_; }
  const std::string& column() const { return column_; }
  double threshold() const { return threshold_; }
  std::size_t horizon() const { return horizon_; }
  double level() const { return level_; }

 private:
  LabelRule() = default;

  Kind kind_ = Kind::kDownMovement;
  std::string column_;
  double threshold_ = 0.0;
  std::size_t horizon_ = 1;
  double level_ = -1.0;
};

/// Labels plus the count of trailing rows that could not be labeled because
/// their look-ahead ran past the end of the series.
struct LabelResult {
  LabelSeries labels;
  std::size_t dropped_tail = 0;
};

/// Exceedance labeling over a table column (rule kind must be
/// kExceedsThreshold). The labeled range covers rows 0..rows-horizon-1.
LabelResult make_labels(const TimeSeriesTable& table, const LabelRule& rule);

/// Down-movement labeling over a percentage-change series (rule kind must be
/// kDownMovement). One label per change.
LabelResult make_labels(const std::vector<double>& percent_changes,
                        const LabelRule& rule);

/// Dense row-major real matrix (samples x features). All entries finite.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const double* row(std::size_t i) const { return values_.data() + i * cols_; }
  const std::vector<double>& values() const { return values_; }
  FeatureMatrix slice_rows(std::size_t begin, std::size_t end) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Sliding-window feature construction. Row r covers the `lookback` most
/// recent values of every feature column ending at time row_end_index[r];
/// windows touching a missing cell are dropped (counted, not an error).
struct WindowedFeatures {
  FeatureMatrix features;
  std::vector<std::size_t> row_end_index;
  std::size_t dropped_windows = 0;
};

WindowedFeatures windowed_features(const TimeSeriesTable& table,
                                   std::size_t lookback,
                                   const std::vector<std::string>& columns);

/// Same construction over one plain series (no missing values).
WindowedFeatures windowed_features(const std::vector<double>& series,
                                   std::size_t lookback);

/// Three contiguous half-open index ranges in time order.
struct SplitIndices {
  std::size_t train_begin = 0, train_end = 0;
  std::size_t valid_begin = 0, valid_end = 0;
  std::size_t test_begin = 0, test_end = 0;
};

/// Split by cumulative fractions: train gets floor(n*f1) rows, validation
/// runs to floor(n*f2), test takes the rest. Requires 0 < f1 < f2 < 1; an
/// empty segment raises SplitError naming it.
SplitIndices chronological_split(std::size_t n, double f1, double f2);

/// Split by timestamps: train <= t1 < valid <= t2 < test.
SplitIndices chronological_split(const std::vector<std::int64_t>& timestamps,
                                 std::int64_t t1, std::int64_t t2);

/// Per-feature affine normalization to zero mean / unit variance. Fit on the
/// training rows only; constant features keep scale 1 so transforming them
/// just recenters.
class Standardizer {
 public:
  Standardizer(std::vector<double> means, std::vector<double> stdevs);

  static Standardizer fit(const FeatureMatrix& x);
  static Standardizer fit(const FeatureMatrix& x, std::size_t row_begin,
                          std::size_t row_end);

  FeatureMatrix transform(const FeatureMatrix& x) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stdevs() const { return stdevs_; }

 private:
  std::vector<double> means_;
  std::vector<double> stdevs_;
};

/// Label subrange [begin, end).
LabelSeries slice_labels(const LabelSeries& y, std::size_t begin,
                         std::size_t end);

}  // namespace vwss
