#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vwss/backtest.hpp"
#include "vwss/data.hpp"
#include "vwss/demo.hpp"
#include "vwss/ensemble.hpp"
#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/model.hpp"
#include "vwss/reports.hpp"
#include "vwss/scoring.hpp"
#include "vwss/series.hpp"
#include "vwss/thresholding.hpp"
#include "vwss/version.hpp"

namespace {

namespace fs = std::filesystem;

// CLI11 config reader for JSON files whose structure mirrors the flags:
// top-level keys are main-app options, nested objects are subcommand
// sections, arrays feed multi-value options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::FileError(std::string("config file is not valid JSON: ") +
                           e.what());
    }
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const nlohmann::json& v = it.value();
      if (v.is_object()) {
        std::vector<std::string> deeper = parents;
        deeper.push_back(it.key());
        walk(v, std::move(deeper), items);
      } else {
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = it.key();
        if (v.is_array()) {
          for (const auto& e : v) item.inputs.push_back(scalar(e));
        } else {
          item.inputs.push_back(scalar(v));
        }
        items.push_back(std::move(item));
      }
    }
  }
};

const std::vector<std::string> kScoreSelectors = {
    "acc", "tss", "hss", "csi", "wacc", "wtss", "whss", "wcsi"};

vwss::ScoringSpec score_spec_from(std::string selector, int k) {
  vwss::ScoringSpec spec;
  spec.window.k = k;
  if (!selector.empty() && selector[0] == 'w') {
    spec.mode = vwss::MatrixMode::kValueWeighted;
    selector.erase(0, 1);
  }
  if (selector == "acc") {
    spec.kind = vwss::SkillScore::kAcc;
  } else if (selector == "tss") {
    spec.kind = vwss::SkillScore::kTss;
  } else if (selector == "hss") {
    spec.kind = vwss::SkillScore::kHss;
  } else if (selector == "csi") {
    spec.kind = vwss::SkillScore::kCsi;
  } else {
    throw vwss::InputError("unknown score selector '" + selector + "'");
  }
  return spec;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

vwss::PriceSeries read_prices(const fs::path& path, const std::string& date_col,
                              const std::string& close_col) {
  vwss::CsvSchema schema;
  schema.timestamp_column = date_col;
  schema.value_columns = {close_col};
  const vwss::TimeSeriesTable table = vwss::load_csv(path, schema);
  if (table.column_has_missing(close_col)) {
    throw vwss::InputError("prices file " + path.string() +
                           " has missing values in column '" + close_col +
                           "'");
  }
  return vwss::PriceSeries(table.timestamps(), table.column(close_col));
}

vwss::io::RunManifest new_manifest(const std::string& command) {
  vwss::io::RunManifest m;
  m.tool_version = vwss::kVersion;
  m.command = command;
  return m;
}

void print_evaluation(const vwss::EvaluationReport& report) {
  const auto line = [](const char* title, const vwss::ConfusionMatrix& m,
                       const std::array<std::optional<double>, 4>& scores,
                       const char* prefix) {
    std::cout << title << ": tp=" << m.tp() << " fp=" << m.fp()
              << " fn=" << m.fn() << " tn=" << m.tn() << "\n  ";
    for (std::size_t i = 0; i < vwss::kAllSkillScores.size(); ++i) {
      std::cout << (i ? "  " : "") << prefix
                << vwss::skill_score_name(vwss::kAllSkillScores[i]) << "="
                << (scores[i] ? fmt6(*scores[i]) : "undefined");
    }
    std::cout << "\n";
  };
  line("quality", report.quality, report.quality_scores, "");
  line("value-weighted", report.weighted, report.weighted_scores, "w");
}

// --------------------------------------------------------------------- score

struct ScoreOpts {
  std::string labels, predictions, mode = "both", out_dir = ".";
  int k = 3;
};

void cmd_score(const ScoreOpts& o) {
  const vwss::LabelSeries y(vwss::read_binary_series_file(o.labels));
  const vwss::PredictionSeries p(vwss::read_binary_series_file(o.predictions));
  const vwss::WindowConfig window{o.k};

  const vwss::EvaluationReport report = vwss::evaluate(y, p, window);
  nlohmann::json out = vwss::evaluation_json(report);
  if (o.mode == "quality") out.erase("value_weighted");
  if (o.mode == "weighted") out.erase("quality");

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  vwss::io::RunManifest manifest = new_manifest("score");
  manifest.parameters = {{"k", o.k}, {"mode", o.mode}};
  manifest.add_input(o.labels);
  manifest.add_input(o.predictions);

  vwss::io::atomic_write_text(dir / "score_report.json", out.dump(2) + "\n");
  manifest.outputs.push_back("score_report.json");
  if (o.mode != "quality") {
    const auto [matrix, weights] = vwss::weighted_confusion_matrix(y, p, window);
    (void)matrix;
    vwss::write_weight_report_csv(dir / "score_weights.csv", weights);
    manifest.outputs.push_back("score_weights.csv");
  }
  manifest.outputs.push_back("score_manifest.json");
  manifest.write(dir / "score_manifest.json");

  print_evaluation(report);
  std::cout << "report written to " << (dir / "score_report.json").string()
            << "\n";
}

// --------------------------------------------------------------------- curve

struct CurveOpts {
  std::string labels, probs, score = "tss", out_dir = ".";
  int k = 3;
  double a = 0.0, b = 1.0;
};

void cmd_curve(const CurveOpts& o) {
  const vwss::LabelSeries y(vwss::read_binary_series_file(o.labels));
  const vwss::ProbabilitySeries probs(
      vwss::read_probability_series_file(o.probs));

  vwss::ThresholdSearch search;
  search.lo = o.a;
  search.hi = o.b;
  search.spec = score_spec_from(o.score, o.k);
  const std::vector<vwss::CurvePoint> curve =
      vwss::score_curve(y, probs, search);

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  vwss::write_curve_csv(dir / "curve.csv", curve);

  vwss::io::RunManifest manifest = new_manifest("curve");
  manifest.parameters = {
      {"score", o.score}, {"k", o.k}, {"a", o.a}, {"b", o.b}};
  manifest.add_input(o.labels);
  manifest.add_input(o.probs);
  manifest.outputs = {"curve.csv", "curve_manifest.json"};
  manifest.write(dir / "curve_manifest.json");

  const vwss::CurvePoint* best = nullptr;
  for (const vwss::CurvePoint& point : curve) {
    if (point.score && (!best || *point.score > *best->score)) best = &point;
  }
  if (best) {
    std::cout << "best " << o.score << " " << fmt6(*best->score)
              << " at tau=" << vwss::io::format_double(best->tau) << " ("
              << curve.size() << " candidates)\n";
  } else {
    std::cout << "score undefined at every candidate threshold\n";
  }
}

// ------------------------------------------------------------------ ensemble

struct EnsembleOpts {
  std::string snap_train, snap_valid, snap_test;
  std::string train_features, valid_features, test_features;
  std::string train_labels, valid_labels, test_labels;
  std::string score = "tss", out_dir = ".", save_model;
  int k = 3;
  double a = 0.0, b = 1.0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double alpha_rate = std::numeric_limits<double>::quiet_NaN();
  bool fallback_best = false;
  std::vector<std::size_t> hidden = {16, 8};
  std::vector<double> l2;
  std::size_t epochs = 50, batch = 72;
  double lr = 0.001;
  std::uint64_t seed = 1, shuffle_seed = 1;
};

void cmd_ensemble(const EnsembleOpts& o) {
  const bool use_snaps = !o.snap_train.empty() || !o.snap_valid.empty() ||
                         !o.snap_test.empty();
  const bool use_features = !o.train_features.empty() ||
                            !o.valid_features.empty() ||
                            !o.test_features.empty();
  if (use_snaps == use_features) {
    throw vwss::InputError(
        "provide either snapshot files (--snap-train/--snap-valid/"
        "--snap-test) or feature files (--train-features/--valid-features/"
        "--test-features), not both");
  }
  if (use_snaps &&
      (o.snap_train.empty() || o.snap_valid.empty() || o.snap_test.empty())) {
    throw vwss::InputError("all three snapshot files are required");
  }
  if (use_features && (o.train_features.empty() || o.valid_features.empty() ||
                       o.test_features.empty())) {
    throw vwss::InputError("all three feature files are required");
  }
  const bool has_alpha = !std::isnan(o.alpha);
  const bool has_rate = !std::isnan(o.alpha_rate);
  if (has_alpha && has_rate) {
    throw vwss::InputError("--alpha and --alpha-rate are mutually exclusive");
  }
  const vwss::QualityLevel level =
      has_alpha ? vwss::QualityLevel::absolute(o.alpha)
                : vwss::QualityLevel::relative_to_max(has_rate ? o.alpha_rate
                                                               : 0.9);

  const vwss::LabelSeries y_train(
      vwss::read_binary_series_file(o.train_labels));
  const vwss::LabelSeries y_valid(
      vwss::read_binary_series_file(o.valid_labels));
  const vwss::LabelSeries y_test(vwss::read_binary_series_file(o.test_labels));

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  vwss::io::RunManifest manifest = new_manifest("ensemble");
  manifest.add_input(o.train_labels);
  manifest.add_input(o.valid_labels);
  manifest.add_input(o.test_labels);

  vwss::ThresholdSearch search;
  search.lo = o.a;
  search.hi = o.b;
  search.spec = score_spec_from(o.score, o.k);

  std::vector<vwss::EpochSnapshot> snapshots;
  std::map<std::size_t, vwss::ProbabilitySeries> test_probs;

  if (use_snaps) {
    manifest.add_input(o.snap_train);
    manifest.add_input(o.snap_valid);
    manifest.add_input(o.snap_test);
    snapshots = vwss::zip_snapshots(vwss::read_snapshot_file(o.snap_train),
                                    vwss::read_snapshot_file(o.snap_valid));
    test_probs = vwss::probability_map(vwss::read_snapshot_file(o.snap_test));
  } else {
    manifest.add_input(o.train_features);
    manifest.add_input(o.valid_features);
    manifest.add_input(o.test_features);
    const vwss::FeatureMatrix x_train_raw =
        vwss::read_feature_matrix_csv(o.train_features);
    const vwss::FeatureMatrix x_valid_raw =
        vwss::read_feature_matrix_csv(o.valid_features);
    const vwss::FeatureMatrix x_test_raw =
        vwss::read_feature_matrix_csv(o.test_features);
    const vwss::Standardizer standardizer = vwss::Standardizer::fit(x_train_raw);
    const vwss::FeatureMatrix x_train = standardizer.transform(x_train_raw);
    const vwss::FeatureMatrix x_valid = standardizer.transform(x_valid_raw);
    const vwss::FeatureMatrix x_test = standardizer.transform(x_test_raw);

    vwss::MlpConfig mlp_cfg;
    mlp_cfg.layer_sizes.push_back(x_train.cols());
    mlp_cfg.layer_sizes.insert(mlp_cfg.layer_sizes.end(), o.hidden.begin(),
                               o.hidden.end());
    mlp_cfg.layer_sizes.push_back(1);
    mlp_cfg.l2_per_layer = o.l2;
    mlp_cfg.seed = o.seed;
    vwss::TrainConfig train_cfg;
    train_cfg.epochs = o.epochs;
    train_cfg.learning_rate = o.lr;
    train_cfg.batch_size = o.batch;
    train_cfg.shuffle_seed = o.shuffle_seed;

    vwss::TrainRun run = vwss::train_run(x_train, y_train, x_valid, &x_test,
                                         mlp_cfg, train_cfg);
    vwss::SnapshotFile train_file{"train", {}};
    vwss::SnapshotFile valid_file{"valid", {}};
    for (const vwss::EpochSnapshot& s : run.snapshots) {
      train_file.rows.push_back({s.epoch_index, s.train_probs});
      valid_file.rows.push_back({s.epoch_index, s.valid_probs});
    }
    vwss::write_snapshot_file(dir / "snapshots_train.csv", train_file);
    vwss::write_snapshot_file(dir / "snapshots_valid.csv", valid_file);
    vwss::write_snapshot_file(dir / "snapshots_test.csv",
                              vwss::SnapshotFile{"test", run.test_rows});
    manifest.outputs.push_back("snapshots_train.csv");
    manifest.outputs.push_back("snapshots_valid.csv");
    manifest.outputs.push_back("snapshots_test.csv");
    if (!o.save_model.empty()) {
      vwss::save_model_json(o.save_model, run.model, standardizer);
      manifest.outputs.push_back(o.save_model);
    }
    snapshots = std::move(run.snapshots);
    test_probs =
        vwss::probability_map(vwss::SnapshotFile{"test", run.test_rows});
  }

  snapshots = vwss::calibrate_epochs(std::move(snapshots), y_train, search);
  const std::vector<std::size_t> selected = vwss::select_epochs(
      snapshots, y_valid, search.spec, level, o.fallback_best);
  const vwss::EnsembleClassifier clf =
      vwss::make_classifier(snapshots, selected, search.spec);
  const vwss::PredictionSeries pred = clf.predict(test_probs);
  const vwss::EvaluationReport eval =
      vwss::evaluate(y_test, pred, search.spec.window);

  vwss::write_predictions_csv(dir / "ensemble_predictions.csv", pred);
  vwss::write_selected_epochs_csv(dir / "ensemble_selected.csv", snapshots,
                                  selected);

  nlohmann::json report;
  report["score"] = o.score;
  report["quality_level"] =
      has_alpha ? nlohmann::json{{"mode", "absolute"}, {"value", o.alpha}}
                : nlohmann::json{{"mode", "relative_to_max"},
                                 {"value", has_rate ? o.alpha_rate : 0.9}};
  report["selected_epochs"] = selected;
  report["evaluation"] = vwss::evaluation_json(eval);
  vwss::io::atomic_write_text(dir / "ensemble_report.json",
                              report.dump(2) + "\n");

  manifest.parameters = {{"score", o.score},
                         {"k", o.k},
                         {"a", o.a},
                         {"b", o.b},
                         {"alpha", has_alpha ? nlohmann::json(o.alpha)
                                             : nlohmann::json()},
                         {"alpha_rate",
                          has_rate ? nlohmann::json(o.alpha_rate)
                                   : (has_alpha ? nlohmann::json()
                                                : nlohmann::json(0.9))},
                         {"fallback_best", o.fallback_best},
                         {"epochs", o.epochs},
                         {"lr", o.lr},
                         {"batch", o.batch},
                         {"seed", o.seed},
                         {"shuffle_seed", o.shuffle_seed},
                         {"hidden", o.hidden},
                         {"l2", o.l2}};
  manifest.outputs.push_back("ensemble_predictions.csv");
  manifest.outputs.push_back("ensemble_selected.csv");
  manifest.outputs.push_back("ensemble_report.json");
  manifest.outputs.push_back("ensemble_manifest.json");
  manifest.write(dir / "ensemble_manifest.json");

  std::cout << "selected " << selected.size() << " of " << snapshots.size()
            << " epochs\n";
  print_evaluation(eval);
}

// ------------------------------------------------------------------ backtest

struct BacktestOpts {
  std::string prices, predictions, predictions_b, labels, out_dir = ".";
  std::string date_column = "date", close_column = "close";
  double initial_shares = 10.0, sell_qty = 2.0;
  std::size_t rebuy_window = 3;
};

nlohmann::json summary_json(const vwss::StrategySummary& s) {
  return {{"final_value", s.final_value},
          {"max_drawdown", s.max_drawdown},
          {"sales", s.sales},
          {"rebuys", s.rebuys}};
}

void cmd_backtest(const BacktestOpts& o) {
  const vwss::PriceSeries prices =
      read_prices(o.prices, o.date_column, o.close_column);
  const vwss::PredictionSeries pred(
      vwss::read_binary_series_file(o.predictions));
  const vwss::LabelSeries down(vwss::read_binary_series_file(o.labels));
  const vwss::StrategyConfig cfg{o.initial_shares, o.sell_qty, o.rebuy_window};

  const vwss::BacktestResult result =
      vwss::run_backtest(prices, pred, down, cfg);
  const vwss::StrategySummary summary = vwss::summarize(result);

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  vwss::write_trajectory_csv(dir / "backtest_trajectory.csv", result);
  nlohmann::json report = summary_json(summary);
  report["skipped_sales"] = result.skipped_sales;
  report["buy_and_hold_final_value"] =
      o.initial_shares * prices.closes().back();
  vwss::io::atomic_write_text(dir / "backtest_summary.json",
                              report.dump(2) + "\n");

  vwss::io::RunManifest manifest = new_manifest("backtest");
  manifest.parameters = {{"initial_shares", o.initial_shares},
                         {"sell_quantity", o.sell_qty},
                         {"rebuy_window", o.rebuy_window},
                         {"date_column", o.date_column},
                         {"close_column", o.close_column}};
  manifest.add_input(o.prices);
  manifest.add_input(o.predictions);
  manifest.add_input(o.labels);
  manifest.outputs = {"backtest_trajectory.csv", "backtest_summary.json",
                      "backtest_manifest.json"};
  manifest.write(dir / "backtest_manifest.json");

  std::cout << "final value " << fmt6(summary.final_value)
            << " (buy-and-hold " << fmt6(o.initial_shares *
                                         prices.closes().back())
            << "), " << summary.sales << " sales, " << summary.rebuys
            << " rebuys\n";
}

void cmd_compare(const BacktestOpts& o) {
  const vwss::PriceSeries prices =
      read_prices(o.prices, o.date_column, o.close_column);
  const vwss::PredictionSeries pred_a(
      vwss::read_binary_series_file(o.predictions));
  const vwss::PredictionSeries pred_b(
      vwss::read_binary_series_file(o.predictions_b));
  const vwss::LabelSeries down(vwss::read_binary_series_file(o.labels));
  const vwss::StrategyConfig cfg{o.initial_shares, o.sell_qty, o.rebuy_window};

  const vwss::StrategyComparison cmp =
      vwss::compare_strategies(prices, pred_a, pred_b, down, cfg);

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  vwss::write_trajectory_csv(dir / "trajectory_a.csv", cmp.a);
  vwss::write_trajectory_csv(dir / "trajectory_b.csv", cmp.b);
  nlohmann::json report = {{"a", summary_json(cmp.summary_a)},
                           {"b", summary_json(cmp.summary_b)}};
  vwss::io::atomic_write_text(dir / "compare_summary.json",
                              report.dump(2) + "\n");

  vwss::io::RunManifest manifest = new_manifest("compare");
  manifest.parameters = {{"initial_shares", o.initial_shares},
                         {"sell_quantity", o.sell_qty},
                         {"rebuy_window", o.rebuy_window},
                         {"date_column", o.date_column},
                         {"close_column", o.close_column}};
  manifest.add_input(o.prices);
  manifest.add_input(o.predictions);
  manifest.add_input(o.predictions_b);
  manifest.add_input(o.labels);
  manifest.outputs = {"trajectory_a.csv", "trajectory_b.csv",
                      "compare_summary.json", "compare_manifest.json"};
  manifest.write(dir / "compare_manifest.json");

  std::cout << "final values: a " << fmt6(cmp.summary_a.final_value) << ", b "
            << fmt6(cmp.summary_b.final_value) << "\n";
}

// ---------------------------------------------------------------------- demo

void cmd_demo(const std::string& out_dir) {
  const std::vector<fs::path> files = vwss::run_demo(out_dir);
  std::cout << "wrote " << files.size() << " files under " << out_dir << "\n";
  const nlohmann::json report = nlohmann::json::parse(
      vwss::io::read_file_text(fs::path(out_dir) / "demo_report.json"));
  for (const char* name : {"quality", "weighted"}) {
    const auto& e = report.at("ensembles").at(name);
    std::cout << "  " << name << " ensemble (optimizes "
              << e.at("optimized_for").get<std::string>() << "): "
              << e.at("selected_epochs").size() << " epochs selected\n";
  }
  const auto& bt = report.at("backtest");
  std::cout << "  backtest final values: quality "
            << fmt6(bt.at("quality").at("final_value").get<double>())
            << ", weighted "
            << fmt6(bt.at("weighted").at("final_value").get<double>())
            << ", buy-and-hold "
            << fmt6(bt.at("buy_and_hold_final_value").get<double>()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecast verification with value-weighted skill scores, "
               "epoch-ensemble classification, and trading backtests"};
  app.set_version_flag("--version", vwss::kVersion);
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  std::string default_config;
  if (const char* dir = std::getenv("VWSS_CONFIG_DIR")) {
    default_config = (fs::path(dir) / "vwss.json").string();
  }
  app.set_config("--config", default_config,
                 "JSON config file mirroring the flags (sections per "
                 "subcommand)");

  auto score_opts = std::make_shared<ScoreOpts>();
  CLI::App* score = app.add_subcommand(
      "score", "Score a binary prediction series against labels");
  score->add_option("--labels", score_opts->labels, "labels file (0/1 rows)")
      ->required();
  score->add_option("--predictions", score_opts->predictions,
                    "predictions file (0/1 rows)")
      ->required();
  score->add_option("-k,--k", score_opts->k, "error-weighting window half-size")
      ->capture_default_str();
  score->add_option("--mode", score_opts->mode, "matrices to report")
      ->check(CLI::IsMember({"quality", "weighted", "both"}))
      ->capture_default_str();
  score->add_option("-o,--out-dir", score_opts->out_dir, "output directory")
      ->capture_default_str();
  score->callback([score_opts] { cmd_score(*score_opts); });

  auto curve_opts = std::make_shared<CurveOpts>();
  CLI::App* curve = app.add_subcommand(
      "curve", "Score as a function of the decision threshold");
  curve->add_option("--labels", curve_opts->labels, "labels file")->required();
  curve->add_option("--probs", curve_opts->probs, "probability file")
      ->required();
  curve->add_option("--score", curve_opts->score, "score selector")
      ->check(CLI::IsMember(kScoreSelectors))
      ->capture_default_str();
  curve->add_option("-k,--k", curve_opts->k, "error-weighting window half-size")
      ->capture_default_str();
  curve->add_option("-a,--a", curve_opts->a, "threshold interval lower end")
      ->capture_default_str();
  curve->add_option("-b,--b", curve_opts->b, "threshold interval upper end")
      ->capture_default_str();
  curve->add_option("-o,--out-dir", curve_opts->out_dir, "output directory")
      ->capture_default_str();
  curve->callback([curve_opts] { cmd_curve(*curve_opts); });

  auto ens_opts = std::make_shared<EnsembleOpts>();
  CLI::App* ens = app.add_subcommand(
      "ensemble",
      "Calibrate, select, and evaluate an epoch ensemble (from snapshot "
      "files or by training the bundled network on feature files)");
  ens->add_option("--snap-train", ens_opts->snap_train,
                  "train-split snapshot file");
  ens->add_option("--snap-valid", ens_opts->snap_valid,
                  "valid-split snapshot file");
  ens->add_option("--snap-test", ens_opts->snap_test,
                  "test-split snapshot file");
  ens->add_option("--train-features", ens_opts->train_features,
                  "training feature matrix CSV");
  ens->add_option("--valid-features", ens_opts->valid_features,
                  "validation feature matrix CSV");
  ens->add_option("--test-features", ens_opts->test_features,
                  "test feature matrix CSV");
  ens->add_option("--train-labels", ens_opts->train_labels, "training labels")
      ->required();
  ens->add_option("--valid-labels", ens_opts->valid_labels,
                  "validation labels")
      ->required();
  ens->add_option("--test-labels", ens_opts->test_labels, "test labels")
      ->required();
  ens->add_option("--score", ens_opts->score,
                  "score optimized per epoch and used for selection")
      ->check(CLI::IsMember(kScoreSelectors))
      ->capture_default_str();
  ens->add_option("--alpha", ens_opts->alpha,
                  "absolute validation-score cutoff");
  ens->add_option("--alpha-rate", ens_opts->alpha_rate,
                  "cutoff as a fraction of the best validation score "
                  "(default 0.9)");
  ens->add_option("-k,--k", ens_opts->k, "error-weighting window half-size")
      ->capture_default_str();
  ens->add_option("-a,--a", ens_opts->a, "threshold interval lower end")
      ->capture_default_str();
  ens->add_option("-b,--b", ens_opts->b, "threshold interval upper end")
      ->capture_default_str();
  ens->add_flag("--fallback-best", ens_opts->fallback_best,
                "on an empty selection, fall back to the single best epoch");
  ens->add_option("--hidden", ens_opts->hidden,
                  "hidden layer widths (training route)")
      ->capture_default_str();
  ens->add_option("--l2", ens_opts->l2,
                  "per-layer ridge coefficients (training route)");
  ens->add_option("--epochs", ens_opts->epochs, "training epochs")
      ->capture_default_str();
  ens->add_option("--lr", ens_opts->lr, "learning rate")
      ->capture_default_str();
  ens->add_option("--batch", ens_opts->batch, "mini-batch size")
      ->capture_default_str();
  ens->add_option("--seed", ens_opts->seed, "weight initialization seed")
      ->capture_default_str();
  ens->add_option("--shuffle-seed", ens_opts->shuffle_seed,
                  "mini-batch shuffle seed")
      ->capture_default_str();
  ens->add_option("--save-model", ens_opts->save_model,
                  "write the final network to this JSON file");
  ens->add_option("-o,--out-dir", ens_opts->out_dir, "output directory")
      ->capture_default_str();
  ens->callback([ens_opts] { cmd_ensemble(*ens_opts); });

  auto bt_opts = std::make_shared<BacktestOpts>();
  CLI::App* bt = app.add_subcommand(
      "backtest", "Simulate the sell-on-predicted-down strategy");
  CLI::App* cmp = app.add_subcommand(
      "compare", "Simulate two prediction series on the same market");
  for (CLI::App* sub : {bt, cmp}) {
    sub->add_option("--prices", bt_opts->prices, "prices CSV")->required();
    sub->add_option("--labels", bt_opts->labels, "actual down labels (0/1)")
        ->required();
    sub->add_option("--date-column", bt_opts->date_column, "date column name")
        ->capture_default_str();
    sub->add_option("--close-column", bt_opts->close_column,
                    "close column name")
        ->capture_default_str();
    sub->add_option("--initial-shares", bt_opts->initial_shares,
                    "starting share count")
        ->capture_default_str();
    sub->add_option("--sell-qty", bt_opts->sell_qty,
                    "shares sold per predicted down")
        ->capture_default_str();
    sub->add_option("--rebuy-window", bt_opts->rebuy_window,
                    "days an actual down triggers the rebuy")
        ->capture_default_str();
    sub->add_option("-o,--out-dir", bt_opts->out_dir, "output directory")
        ->capture_default_str();
  }
  bt->add_option("--predictions", bt_opts->predictions,
                 "predicted downs (0/1)")
      ->required();
  cmp->add_option("--predictions-a", bt_opts->predictions,
                  "first predicted-down series")
      ->required();
  cmp->add_option("--predictions-b", bt_opts->predictions_b,
                  "second predicted-down series")
      ->required();
  bt->callback([bt_opts] { cmd_backtest(*bt_opts); });
  cmp->callback([bt_opts] { cmd_compare(*bt_opts); });

  auto demo_dir = std::make_shared<std::string>("demo-out");
  CLI::App* demo = app.add_subcommand(
      "demo", "Seeded end-to-end run on a synthetic market");
  demo->add_option("-o,--out-dir", *demo_dir, "output directory")
      ->capture_default_str();
  demo->callback([demo_dir] { cmd_demo(*demo_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const vwss::EmptyEnsembleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const vwss::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const vwss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
