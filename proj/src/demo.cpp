#include "vwss/demo.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "vwss/backtest.hpp"
#include "vwss/data.hpp"
#include "vwss/ensemble.hpp"
#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/model.hpp"
#include "vwss/reports.hpp"
#include "vwss/rng.hpp"
#include "vwss/version.hpp"

namespace vwss {

namespace {

// Two-regime market: mostly calm days with rare clustered turbulent spells,
// so down movements (eta < -1) arrive in bursts that a lookback window can
// anticipate.
constexpr std::size_t kDays = 1260;
constexpr std::uint64_t kMarketSeed = 20240915;
constexpr double kCalmSigma = 0.4;
constexpr double kBurstSigma = 2.9;
constexpr double kDrift = 0.05;
constexpr double kBurstEntry = 0.04;
constexpr double kBurstExit = 1.0 / 6.0;

constexpr std::size_t kLookback = 5;
constexpr double kDownLevel = -1.0;
constexpr double kTrainFraction = 0.6;
constexpr double kValidFraction = 0.8;

constexpr std::uint64_t kInitSeed = 7;
constexpr std::uint64_t kShuffleSeed = 99;
constexpr std::size_t kEpochs = 50;
constexpr double kAlphaRate = 0.9;
constexpr int kWindowK = 3;

PriceSeries synthetic_market() {
  Rng rng(kMarketSeed);
  std::vector<std::int64_t> dates(kDays);
  std::vector<double> closes(kDays);
  const std::int64_t start =
      parse_timestamp("2015-01-02", "synthetic market start");
  double price = 100.0;
  bool burst = false;
  for (std::size_t d = 0; d < kDays; ++d) {
    dates[d] = start + static_cast<std::int64_t>(d) * 86400;
    closes[d] = price;
    // Regime switch, then a daily return drawn from the active regime.
    const double u = rng.next_unit();
    burst = burst ? (u >= kBurstExit) : (u < kBurstEntry);
    const double sigma = burst ? kBurstSigma : kCalmSigma;
    double ret = kDrift + sigma * rng.next_gaussian();
    ret = std::max(ret, -50.0);  // keep prices positive under any draw
    price *= 1.0 + ret / 100.0;
  }
  return PriceSeries(std::move(dates), std::move(closes));
}

nlohmann::json summary_json(const StrategySummary& s) {
  return {{"final_value", s.final_value},
          {"max_drawdown", s.max_drawdown},
          {"sales", s.sales},
          {"rebuys", s.rebuys}};
}

}  // namespace

std::vector<std::filesystem::path> run_demo(
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const auto emit = [&written](std::filesystem::path p) {
    written.push_back(std::move(p));
    return written.back();
  };

  // --- 1. Market, labels, features -----------------------------------------
  const PriceSeries prices = synthetic_market();
  {
    std::string csv = "date,close\n";
    for (std::size_t d = 0; d < prices.size(); ++d) {
      csv += format_timestamp(prices.dates()[d]);
      csv += ',';
      csv += io::format_double(prices.closes()[d]);
      csv += '\n';
    }
    io::atomic_write_text(emit(out_dir / "prices.csv"), csv);
  }

  const std::vector<double> eta = daily_percentage_change(prices);
  const LabelSeries all_labels =
      make_labels(eta, LabelRule::down_movement(kDownLevel)).labels;

  // Feature row r sees eta[r .. r+kLookback-1]; its label is the next
  // change, eta index r+kLookback, which describes the move into day
  // r+kLookback+1. The final window has no following change and is dropped.
  const WindowedFeatures windows = windowed_features(eta, kLookback);
  const std::size_t usable = windows.features.rows() - 1;
  const FeatureMatrix x_all = windows.features.slice_rows(0, usable);
  const LabelSeries y_all = slice_labels(all_labels, kLookback, kLookback + usable);

  const SplitIndices split =
      chronological_split(usable, kTrainFraction, kValidFraction);
  const Standardizer standardizer =
      Standardizer::fit(x_all, split.train_begin, split.train_end);
  const FeatureMatrix x_train = standardizer.transform(
      x_all.slice_rows(split.train_begin, split.train_end));
  const FeatureMatrix x_valid = standardizer.transform(
      x_all.slice_rows(split.valid_begin, split.valid_end));
  const FeatureMatrix x_test = standardizer.transform(
      x_all.slice_rows(split.test_begin, split.test_end));
  const LabelSeries y_train =
      slice_labels(y_all, split.train_begin, split.train_end);
  const LabelSeries y_valid =
      slice_labels(y_all, split.valid_begin, split.valid_end);
  const LabelSeries y_test =
      slice_labels(y_all, split.test_begin, split.test_end);

  // --- 2. Train, snapshot every epoch --------------------------------------
  MlpConfig mlp_cfg;
  mlp_cfg.layer_sizes = {kLookback, 16, 8, 1};
  mlp_cfg.l2_per_layer = {0.01, 0.01, 0.0};
  mlp_cfg.seed = kInitSeed;
  TrainConfig train_cfg;
  train_cfg.epochs = kEpochs;
  train_cfg.shuffle_seed = kShuffleSeed;

  const TrainRun run =
      train_run(x_train, y_train, x_valid, &x_test, mlp_cfg, train_cfg);

  {
    SnapshotFile train_file{"train", {}};
    SnapshotFile valid_file{"valid", {}};
    for (const EpochSnapshot& s : run.snapshots) {
      train_file.rows.push_back({s.epoch_index, s.train_probs});
      valid_file.rows.push_back({s.epoch_index, s.valid_probs});
    }
    write_snapshot_file(emit(out_dir / "snapshots_train.csv"), train_file);
    write_snapshot_file(emit(out_dir / "snapshots_valid.csv"), valid_file);
    write_snapshot_file(emit(out_dir / "snapshots_test.csv"),
                        SnapshotFile{"test", run.test_rows});
  }
  save_model_json(emit(out_dir / "model.json"), run.model, standardizer);
  write_labels_csv(emit(out_dir / "test_labels.csv"), y_test);

  // --- 3. Two ensembles: thresholds tuned for TSS vs weighted TSS ----------
  const std::map<std::size_t, ProbabilitySeries> test_probs =
      probability_map(SnapshotFile{"test", run.test_rows});

  nlohmann::json report;
  report["generator"] = {{"days", kDays},
                         {"market_seed", kMarketSeed},
                         {"init_seed", kInitSeed},
                         {"shuffle_seed", kShuffleSeed},
                         {"epochs", kEpochs},
                         {"lookback", kLookback},
                         {"down_level", kDownLevel},
                         {"alpha_rate", kAlphaRate},
                         {"window_k", kWindowK},
                         {"dropped_windows", windows.dropped_windows}};

  struct Variant {
    const char* name;
    MatrixMode mode;
  };
  const Variant variants[] = {{"quality", MatrixMode::kQuality},
                              {"weighted", MatrixMode::kValueWeighted}};

  std::vector<PredictionSeries> predictions;
  for (const Variant& v : variants) {
    ThresholdSearch search;
    search.spec.kind = SkillScore::kTss;
    search.spec.mode = v.mode;
    search.spec.window.k = kWindowK;

    std::vector<EpochSnapshot> snapshots =
        calibrate_epochs(run.snapshots, y_train, search);
    const std::vector<std::size_t> selected =
        select_epochs(snapshots, y_valid, search.spec,
                      QualityLevel::relative_to_max(kAlphaRate));
    const EnsembleClassifier clf =
        make_classifier(snapshots, selected, search.spec);
    const PredictionSeries pred = clf.predict(test_probs);
    const EvaluationReport eval = evaluate(y_test, pred, search.spec.window);

    const std::string suffix = v.name;
    write_selected_epochs_csv(emit(out_dir / ("selected_" + suffix + ".csv")),
                              snapshots, selected);
    write_predictions_csv(emit(out_dir / ("predictions_" + suffix + ".csv")),
                          pred);
    report["ensembles"][v.name] = {
        {"optimized_for", v.mode == MatrixMode::kQuality ? "TSS" : "wTSS"},
        {"selected_epochs", selected},
        {"evaluation", evaluation_json(eval)}};
    predictions.push_back(pred);
  }

  // --- 4. Trading simulation on the test period ----------------------------
  // Feature row r maps to day r + kLookback + 1 (the predicted day), so the
  // test rows cover a contiguous block of days.
  const std::size_t day_begin = split.test_begin + kLookback + 1;
  const std::size_t day_end = split.test_end + kLookback + 1;
  const PriceSeries test_prices(
      std::vector<std::int64_t>(prices.dates().begin() + day_begin,
                                prices.dates().begin() + day_end),
      std::vector<double>(prices.closes().begin() + day_begin,
                          prices.closes().begin() + day_end));

  const StrategyConfig strategy;
  const StrategyComparison cmp = compare_strategies(
      test_prices, predictions[0], predictions[1], y_test, strategy);
  write_trajectory_csv(emit(out_dir / "trajectory_quality.csv"), cmp.a);
  write_trajectory_csv(emit(out_dir / "trajectory_weighted.csv"), cmp.b);
  report["backtest"] = {
      {"initial_shares", strategy.initial_shares},
      {"sell_quantity", strategy.sell_quantity},
      {"rebuy_window", strategy.rebuy_window},
      {"quality", summary_json(cmp.summary_a)},
      {"weighted", summary_json(cmp.summary_b)},
      {"buy_and_hold_final_value",
       strategy.initial_shares * test_prices.closes().back()}};

  io::atomic_write_text(emit(out_dir / "demo_report.json"),
                        report.dump(2) + "\n");

  io::RunManifest manifest;
  manifest.tool_version = kVersion;
  manifest.command = "demo";
  manifest.parameters = report["generator"];
  for (const std::filesystem::path& p : written) {
    manifest.outputs.push_back(p.filename().string());
  }
  manifest.outputs.push_back("demo_manifest.json");
  manifest.write(emit(out_dir / "demo_manifest.json"));

  return written;
}

}  // namespace vwss
