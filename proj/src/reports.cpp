#include "vwss/reports.hpp"

#include <algorithm>

#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/scores.hpp"

namespace vwss {

nlohmann::json matrix_json(const ConfusionMatrix& m) {
  return {{"tp", m.tp()},
          {"fp", m.fp()},
          {"fn", m.fn()},
          {"tn", m.tn()},
          {"mode", m.mode() == MatrixMode::kQuality ? "quality"
                                                    : "value_weighted"}};
}

nlohmann::json evaluation_json(const EvaluationReport& report) {
  nlohmann::json quality_scores;
  nlohmann::json weighted_scores;
  for (std::size_t i = 0; i < kAllSkillScores.size(); ++i) {
    const std::string name = skill_score_name(kAllSkillScores[i]);
    if (report.quality_scores[i]) {
      quality_scores[name] = *report.quality_scores[i];
    } else {
      quality_scores[name] = nullptr;
    }
    if (report.weighted_scores[i]) {
      weighted_scores["w" + name] = *report.weighted_scores[i];
    } else {
      weighted_scores["w" + name] = nullptr;
    }
  }
  return {{"quality",
           {{"matrix", matrix_json(report.quality)},
            {"scores", quality_scores}}},
          {"value_weighted",
           {{"matrix", matrix_json(report.weighted)},
            {"scores", weighted_scores}}}};
}

void write_weight_report_csv(const std::filesystem::path& path,
                             const WeightReport& report) {
  struct Entry {
    std::size_t index;
    const char* kind;
    double weight;
  };
  std::vector<Entry> entries;
  entries.reserve(report.fp_weights.size() + report.fn_weights.size());
  for (const auto& [i, w] : report.fp_weights) entries.push_back({i, "FP", w});
  for (const auto& [i, w] : report.fn_weights) entries.push_back({i, "FN", w});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });

  std::string out = "index,kind,weight\n";
  for (const Entry& e : entries) {
    out += std::to_string(e.index + 1);  // 1-based in files
    out += ',';
    out += e.kind;
    out += ',';
    out += io::format_double(e.weight);
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

namespace {

void write_indexed_binary(const std::filesystem::path& path,
                          const char* header,
                          const std::vector<std::uint8_t>& values) {
  std::string out = std::string("index,") + header + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += values[i] ? '1' : '0';
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

}  // namespace

void write_predictions_csv(const std::filesystem::path& path,
                           const PredictionSeries& predictions) {
  write_indexed_binary(path, "prediction", predictions.values());
}

void write_labels_csv(const std::filesystem::path& path,
                      const LabelSeries& labels) {
  write_indexed_binary(path, "label", labels.values());
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurvePoint>& curve) {
  std::string out = "tau,score\n";
  for (const CurvePoint& point : curve) {
    out += io::format_double(point.tau);
    out += ',';
    if (point.score) out += io::format_double(*point.score);
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

void write_selected_epochs_csv(const std::filesystem::path& path,
                               const std::vector<EpochSnapshot>& snapshots,
                               const std::vector<std::size_t>& selected) {
  std::string out = "epoch,tau,train_score,valid_score,selected\n";
  for (const EpochSnapshot& s : snapshots) {
    const bool is_selected =
        std::find(selected.begin(), selected.end(), s.epoch_index) !=
        selected.end();
    out += std::to_string(s.epoch_index);
    out += ',';
    if (s.tau_star) out += io::format_double(*s.tau_star);
    out += ',';
    if (s.train_score) out += io::format_double(*s.train_score);
    out += ',';
    if (s.valid_score) out += io::format_double(*s.valid_score);
    out += ',';
    out += is_selected ? '1' : '0';
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

namespace {

// Shared reader for single-series files. Returns the value field of every
// data row; a first row whose value field does not parse is skipped as a
// header.
std::vector<std::string> series_value_fields(const std::filesystem::path& path) {
  const std::vector<std::string> lines =
      io::split_lines(io::read_file_text(path));
  std::vector<std::string> values;
  bool first_data_row = true;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::vector<std::string> fields = io::split_csv_line(lines[ln]);
    if (fields.size() > 2) {
      throw InputError("series file row at " + path.string() + ":" +
                       std::to_string(ln + 1) +
                       " has more than two columns");
    }
    const std::string& value = fields.back();
    if (first_data_row) {
      first_data_row = false;
      // Header detection: a value field that is not a number.
      try {
        io::parse_double(value, "");
      } catch (const InputError&) {
        continue;
      }
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw InputError("series file " + path.string() + " holds no values");
  }
  return values;
}

}  // namespace

std::vector<std::uint8_t> read_binary_series_file(
    const std::filesystem::path& path) {
  const std::vector<std::string> fields = series_value_fields(path);
  std::vector<std::uint8_t> values;
  values.reserve(fields.size());
  for (const std::string& f : fields) {
    const double v = io::parse_double(f, path.string());
    if (v != 0.0 && v != 1.0) {
      throw InputError("binary series " + path.string() +
                       " holds a value other than 0/1: " + f);
    }
    values.push_back(v == 1.0 ? 1 : 0);
  }
  return values;
}

std::vector<double> read_probability_series_file(
    const std::filesystem::path& path) {
  const std::vector<std::string> fields = series_value_fields(path);
  std::vector<double> values;
  values.reserve(fields.size());
  for (const std::string& f : fields) {
    const double v = io::parse_double(f, path.string());
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("probability series " + path.string() +
                       " holds a value outside [0, 1]: " + f);
    }
    values.push_back(v);
  }
  return values;
}

FeatureMatrix read_feature_matrix_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines =
      io::split_lines(io::read_file_text(path));
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool maybe_header = true;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(ln + 1);
    const std::vector<std::string> fields = io::split_csv_line(lines[ln]);
    if (maybe_header) {
      maybe_header = false;
      bool numeric = true;
      for (const std::string& f : fields) {
        try {
          io::parse_double(f, where);
        } catch (const InputError&) {
          numeric = false;
          break;
        }
      }
      if (!numeric) continue;  // header row
    }
    if (cols == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw InputError("row at " + where + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(cols));
    }
    for (const std::string& f : fields) {
      values.push_back(io::parse_double(f, where));
    }
    ++rows;
  }
  if (rows == 0) {
    throw InputError("feature file " + path.string() + " holds no rows");
  }
  return FeatureMatrix(rows, cols, std::move(values));
}

}  // namespace vwss
