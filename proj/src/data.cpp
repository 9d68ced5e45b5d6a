#include "vwss/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vwss/errors.hpp"
#include "vwss/io.hpp"

namespace vwss {

namespace {

// Civil-calendar conversions (proleptic Gregorian, no timezone). These are
// the standard era-based formulas; exactness is covered by round-trip tests.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = y - era * 400;
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = static_cast<int>(z - era * 146097);
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yoe + era * 400) + (m <= 2);
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text, const std::string& where) {
  std::string s(text);
  if (!s.empty() && s.back() == 'Z') s.pop_back();

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char sep = 0;
  int matched = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d,
                            &sep, &h, &mi, &se);
  const bool date_only = matched == 3;
  const bool with_time =
      (matched == 6 || matched == 7) && (sep == 'T' || sep == ' ');
  if (!date_only && !with_time) {
    throw InputError("cannot parse timestamp '" + std::string(text) + "' at " +
                     where);
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || se < 0 || se > 60) {
    throw InputError("timestamp component out of range in '" +
                     std::string(text) + "' at " + where);
  }
  // Round-trip the civil date to reject things like February 31st, which the
  // formulas would silently fold into March.
  const std::int64_t days = days_from_civil(y, mo, d);
  int ry, rm, rd;
  civil_from_days(days, ry, rm, rd);
  if (ry != y || rm != mo || rd != d) {
    throw InputError("timestamp '" + std::string(text) + "' at " + where +
                     " is not a real calendar date");
  }
  return days * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_timestamp(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m,
                d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

TimeSeriesTable::TimeSeriesTable(std::vector<std::int64_t> timestamps,
                                 std::vector<std::string> names,
                                 std::vector<std::vector<double>> columns,
                                 std::vector<std::vector<std::uint8_t>> missing)
    : timestamps_(std::move(timestamps)),
      names_(std::move(names)),
      columns_(std::move(columns)),
      missing_(std::move(missing)) {
  if (names_.size() != columns_.size() || names_.size() != missing_.size()) {
    throw DomainError("column names, values, and masks must align");
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].size() != timestamps_.size() ||
        missing_[c].size() != timestamps_.size()) {
      throw DomainError("column '" + names_[c] + "' length differs from the " +
                        std::to_string(timestamps_.size()) + " timestamps");
    }
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (timestamps_[i] <= timestamps_[i - 1]) {
      throw InputError("timestamps not strictly increasing at row " +
                       std::to_string(i + 1));
    }
  }
}

std::size_t TimeSeriesTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (names_[c] == name) return c;
  }
  throw DomainError("no column named '" + name + "'");
}

const std::vector<double>& TimeSeriesTable::column(
    const std::string& name) const {
  return columns_[column_index(name)];
}

bool TimeSeriesTable::is_missing(const std::string& name,
                                 std::size_t row) const {
  return missing_[column_index(name)][row] != 0;
}

bool TimeSeriesTable::column_has_missing(const std::string& name) const {
  const std::vector<std::uint8_t>& mask = missing_[column_index(name)];
  return std::find(mask.begin(), mask.end(), std::uint8_t{1}) != mask.end();
}

TimeSeriesTable load_csv(const std::filesystem::path& path,
                         const CsvSchema& schema) {
  const std::vector<std::string> lines =
      io::split_lines(io::read_file_text(path));
  if (lines.empty()) {
    throw InputError("CSV file " + path.string() + " is empty");
  }

  const std::vector<std::string> header = io::split_csv_line(lines[0]);
  const auto find_col = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InputError("CSV file " + path.string() + " has no column '" +
                       name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t ts_col = find_col(schema.timestamp_column);
  std::vector<std::size_t> value_cols;
  value_cols.reserve(schema.value_columns.size());
  for (const std::string& name : schema.value_columns) {
    value_cols.push_back(find_col(name));
  }

  const auto is_missing_marker = [&](const std::string& cell) {
    return std::find(schema.missing_markers.begin(),
                     schema.missing_markers.end(),
                     cell) != schema.missing_markers.end();
  };

  std::vector<std::int64_t> timestamps;
  std::vector<std::vector<double>> columns(value_cols.size());
  std::vector<std::vector<std::uint8_t>> missing(value_cols.size());

  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(ln + 1);
    const std::vector<std::string> fields = io::split_csv_line(lines[ln]);
    if (fields.size() != header.size()) {
      throw InputError("row at " + where + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    timestamps.push_back(
        parse_timestamp(fields[ts_col], where));
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      const std::string& cell = fields[value_cols[c]];
      if (is_missing_marker(cell)) {
        columns[c].push_back(std::numeric_limits<double>::quiet_NaN());
        missing[c].push_back(1);
      } else {
        columns[c].push_back(io::parse_double(
            cell, where + ", column '" + schema.value_columns[c] + "'"));
        missing[c].push_back(0);
      }
    }
  }

  return TimeSeriesTable(std::move(timestamps), schema.value_columns,
                         std::move(columns), std::move(missing));
}

PriceSeries::PriceSeries(std::vector<std::int64_t> dates,
                         std::vector<double> closes)
    : dates_(std::move(dates)), closes_(std::move(closes)) {
  if (dates_.size() != closes_.size()) {
    throw AlignmentError("price series has " + std::to_string(dates_.size()) +
                         " dates but " + std::to_string(closes_.size()) +
                         " closes");
  }
  if (closes_.empty()) {
    throw DomainError("price series must not be empty");
  }
  for (std::size_t i = 0; i < closes_.size(); ++i) {
    if (!(closes_[i] > 0.0) || !std::isfinite(closes_[i])) {
      throw DomainError("price at index " + std::to_string(i) +
                        " must be a positive real, got " +
                        std::to_string(closes_[i]));
    }
    if (i > 0 && dates_[i] <= dates_[i - 1]) {
      throw DomainError("price dates not strictly increasing at index " +
                        std::to_string(i));
    }
  }
}

std::vector<double> daily_percentage_change(const PriceSeries& prices) {
  if (prices.size() < 2) {
    throw DomainError("percentage change needs at least 2 prices, got " +
                      std::to_string(prices.size()));
  }
  const std::vector<double>& p = prices.closes();
  std::vector<double> eta(p.size() - 1);
  for (std::size_t t = 0; t + 1 < p.size(); ++t) {
    eta[t] = (p[t + 1] - p[t]) / p[t] * 100.0;
  }
  return eta;
}

LabelRule LabelRule::exceeds_threshold(std::string column, double threshold,
                                       std::size_t horizon) {
  if (!std::isfinite(threshold)) {
    throw DomainError("exceedance threshold must be finite");
  }
  if (horizon < 1) {
    throw DomainError("exceedance horizon must be >= 1");
  }
  LabelRule rule;
  rule.kind_ = Kind::kExceedsThreshold;
  rule.column_ = std::move(column);
  rule.threshold_ = threshold;
  rule.horizon_ = horizon;
  return rule;
}

LabelRule LabelRule::down_movement(double level) {
  if (!std::isfinite(level)) {
    throw DomainError("down-movement level must be finite");
  }
  LabelRule rule;
  rule.kind_ = Kind::kDownMovement;
  rule.level_ = level;
  return rule;
}

LabelResult make_labels(const TimeSeriesTable& table, const LabelRule& rule) {
  if (rule.kind() != LabelRule::Kind::kExceedsThreshold) {
    throw DomainError("table labeling requires an exceedance rule");
  }
  const std::vector<double>& col = table.column(rule.column());
  if (col.size() <= rule.horizon()) {
    throw InputError("column '" + rule.column() + "' has " +
                     std::to_string(col.size()) +
                     " rows, not enough for horizon " +
                     std::to_string(rule.horizon()));
  }
  const std::size_t labeled = col.size() - rule.horizon();
  std::vector<std::uint8_t> labels(labeled);
  for (std::size_t t = 0; t < labeled; ++t) {
    const std::size_t target = t + rule.horizon();
    if (table.is_missing(rule.column(), target)) {
      throw InputError("column '" + rule.column() + "' is missing at row " +
                       std::to_string(target + 1) +
                       "; clean or impute before labeling");
    }
    labels[t] = col[target] > rule.threshold() ? 1 : 0;
  }
  return {LabelSeries(std::move(labels)), rule.horizon()};
}

LabelResult make_labels(const std::vector<double>& percent_changes,
                        const LabelRule& rule) {
  if (rule.kind() != LabelRule::Kind::kDownMovement) {
    throw DomainError("series labeling requires a down-movement rule");
  }
  if (percent_changes.empty()) {
    throw DomainError("cannot label an empty change series");
  }
  std::vector<std::uint8_t> labels(percent_changes.size());
  for (std::size_t t = 0; t < percent_changes.size(); ++t) {
    labels[t] = percent_changes[t] < rule.level() ? 1 : 0;
  }
  return {LabelSeries(std::move(labels)), 0};
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (cols_ == 0) {
    throw DomainError("feature matrix needs at least one column");
  }
  if (values_.size() != rows_ * cols_) {
    throw DomainError("feature matrix of " + std::to_string(rows_) + "x" +
                      std::to_string(cols_) + " needs " +
                      std::to_string(rows_ * cols_) + " values, got " +
                      std::to_string(values_.size()));
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) {
      throw DomainError("feature matrix entries must be finite");
    }
  }
}

FeatureMatrix FeatureMatrix::slice_rows(std::size_t begin,
                                        std::size_t end) const {
  if (begin > end || end > rows_) {
    throw DomainError("invalid row slice [" + std::to_string(begin) + ", " +
                      std::to_string(end) + ") of " + std::to_string(rows_) +
                      " rows");
  }
  std::vector<double> values(values_.begin() +
                                 static_cast<std::ptrdiff_t>(begin * cols_),
                             values_.begin() +
                                 static_cast<std::ptrdiff_t>(end * cols_));
  return FeatureMatrix(end - begin, cols_, std::move(values));
}

namespace {

WindowedFeatures window_core(const std::vector<const std::vector<double>*>& cols,
                             const std::vector<const std::vector<std::uint8_t>*>& masks,
                             std::size_t n, std::size_t lookback) {
  if (lookback < 1) {
    throw DomainError("lookback must be >= 1");
  }
  if (n < lookback) {
    throw InputError("no complete feature windows: " + std::to_string(n) +
                     " rows with lookback " + std::to_string(lookback));
  }

  std::vector<double> values;
  std::vector<std::size_t> ends;
  std::size_t dropped = 0;
  const std::size_t width = cols.size() * lookback;
  for (std::size_t end = lookback - 1; end < n; ++end) {
    bool complete = true;
    for (std::size_t c = 0; c < masks.size() && complete; ++c) {
      if (masks[c] == nullptr) continue;
      for (std::size_t t = end + 1 - lookback; t <= end; ++t) {
        if ((*masks[c])[t] != 0) {
          complete = false;
          break;
        }
      }
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t t = end + 1 - lookback; t <= end; ++t) {
        values.push_back((*cols[c])[t]);
      }
    }
    ends.push_back(end);
  }

  if (ends.empty()) {
    throw InputError("no complete feature windows: every window touches a "
                     "missing cell");
  }
  return {FeatureMatrix(ends.size(), width, std::move(values)),
          std::move(ends), dropped};
}

}  // namespace

WindowedFeatures windowed_features(const TimeSeriesTable& table,
                                   std::size_t lookback,
                                   const std::vector<std::string>& columns) {
  if (columns.empty()) {
    throw DomainError("windowed features need at least one column");
  }
  std::vector<const std::vector<double>*> cols;
  std::vector<const std::vector<std::uint8_t>*> masks;
  std::vector<std::vector<std::uint8_t>> mask_storage;
  cols.reserve(columns.size());
  mask_storage.reserve(columns.size());
  for (const std::string& name : columns) {
    cols.push_back(&table.column(name));
    std::vector<std::uint8_t> mask(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
      mask[r] = table.is_missing(name, r) ? 1 : 0;
    }
    mask_storage.push_back(std::move(mask));
  }
  for (const auto& mask : mask_storage) masks.push_back(&mask);
  return window_core(cols, masks, table.rows(), lookback);
}

WindowedFeatures windowed_features(const std::vector<double>& series,
                                   std::size_t lookback) {
  std::vector<const std::vector<double>*> cols = {&series};
  std::vector<const std::vector<std::uint8_t>*> masks = {nullptr};
  return window_core(cols, masks, series.size(), lookback);
}

SplitIndices chronological_split(std::size_t n, double f1, double f2) {
  if (!(f1 > 0.0 && f1 < f2 && f2 < 1.0)) {
    throw DomainError("split fractions must satisfy 0 < f1 < f2 < 1, got " +
                      std::to_string(f1) + ", " + std::to_string(f2));
  }
  SplitIndices s;
  s.train_begin = 0;
  s.train_end = static_cast<std::size_t>(static_cast<double>(n) * f1);
  s.valid_begin = s.train_end;
  s.valid_end = static_cast<std::size_t>(static_cast<double>(n) * f2);
  s.test_begin = s.valid_end;
  s.test_end = n;
  if (s.train_end == s.train_begin) throw SplitError("train split is empty");
  if (s.valid_end == s.valid_begin) throw SplitError("validation split is empty");
  if (s.test_end == s.test_begin) throw SplitError("test split is empty");
  return s;
}

SplitIndices chronological_split(const std::vector<std::int64_t>& timestamps,
                                 std::int64_t t1, std::int64_t t2) {
  if (t1 >= t2) {
    throw DomainError("split timestamps must satisfy t1 < t2");
  }
  SplitIndices s;
  s.train_begin = 0;
  s.train_end = static_cast<std::size_t>(
      std::upper_bound(timestamps.begin(), timestamps.end(), t1) -
      timestamps.begin());
  s.valid_begin = s.train_end;
  s.valid_end = static_cast<std::size_t>(
      std::upper_bound(timestamps.begin(), timestamps.end(), t2) -
      timestamps.begin());
  s.test_begin = s.valid_end;
  s.test_end = timestamps.size();
  if (s.train_end == s.train_begin) throw SplitError("train split is empty");
  if (s.valid_end == s.valid_begin) throw SplitError("validation split is empty");
  if (s.test_end == s.test_begin) throw SplitError("test split is empty");
  return s;
}

Standardizer::Standardizer(std::vector<double> means,
                           std::vector<double> stdevs)
    : means_(std::move(means)), stdevs_(std::move(stdevs)) {
  if (means_.size() != stdevs_.size() || means_.empty()) {
    throw DomainError("standardizer means and stdevs must align and be "
                      "nonempty");
  }
  for (const double s : stdevs_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw DomainError("standardizer scales must be positive");
    }
  }
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  return fit(x, 0, x.rows());
}

Standardizer Standardizer::fit(const FeatureMatrix& x, std::size_t row_begin,
                               std::size_t row_end) {
  if (row_begin >= row_end || row_end > x.rows()) {
    throw DomainError("cannot fit a standardizer on an empty row range");
  }
  const std::size_t n = row_end - row_begin;
  std::vector<double> means(x.cols(), 0.0);
  std::vector<double> stdevs(x.cols(), 0.0);
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const double* row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) means[c] += row[c];
  }
  for (double& m : means) m /= static_cast<double>(n);
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const double* row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = row[c] - means[c];
      stdevs[c] += d * d;
    }
  }
  for (double& s : stdevs) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;  // constant feature: recenter only
  }
  return Standardizer(std::move(means), std::move(stdevs));
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& x) const {
  if (x.cols() != means_.size()) {
    throw AlignmentError("standardizer fit on " +
                         std::to_string(means_.size()) +
                         " features, input has " + std::to_string(x.cols()));
  }
  std::vector<double> values;
  values.reserve(x.values().size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      values.push_back((row[c] - means_[c]) / stdevs_[c]);
    }
  }
  return FeatureMatrix(x.rows(), x.cols(), std::move(values));
}

LabelSeries slice_labels(const LabelSeries& y, std::size_t begin,
                         std::size_t end) {
  if (begin > end || end > y.size()) {
    throw DomainError("invalid label slice [" + std::to_string(begin) + ", " +
                      std::to_string(end) + ") of " + std::to_string(y.size()) +
                      " labels");
  }
  std::vector<std::uint8_t> values(y.values().begin() +
                                       static_cast<std::ptrdiff_t>(begin),
                                   y.values().begin() +
                                       static_cast<std::ptrdiff_t>(end));
  return LabelSeries(std::move(values));
}

}  // namespace vwss
