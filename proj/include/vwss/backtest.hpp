#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vwss/data.hpp"
#include "vwss/series.hpp"

namespace vwss {

/// Sell-on-predicted-down strategy parameters. A prediction of "down" for
/// day N (issued at day N-1) sells sell_quantity shares at day N-1's close;
/// the proceeds rebuy at the close of the first actual down day within the
/// next rebuy_window days, or unconditionally one day after the window.
struct StrategyConfig {
  double initial_shares = 10.0;
  double sell_quantity = 2.0;
  std::size_t rebuy_window = 3;
};

/// End-of-day portfolio state; value marks shares to that day's close.
struct DayRecord {
  std::int64_t date = 0;
  double shares = 0.0;
  double cash = 0.0;
  double value = 0.0;
};

struct BacktestResult {
  std::vector<DayRecord> history;
  /// Days where a predicted down could not trigger a sale (no shares left).
  std::vector<std::size_t> skipped_sales;
  std::size_t sales = 0;
  std::size_t rebuys = 0;

  double final_value() const { return history.back().value; }
};

/// Day-by-day deterministic simulation. predictions[d] means "down expected
/// on day d" and is acted on at day d-1's close, so predictions[0] is never
/// used. actual_down[d] marks days that really went down. All three series
/// must have equal length. Sales overlapping an open rebuy pool add to it;
/// the pooled cash rebuys once, on the earliest of the open deadlines. If
/// the series ends before a deadline, the rebuy executes at the final close
/// so the run never ends holding cash.
BacktestResult run_backtest(const PriceSeries& prices,
                            const PredictionSeries& predictions,
                            const LabelSeries& actual_down,
                            const StrategyConfig& cfg);

struct StrategySummary {
  double final_value = 0.0;
  double max_drawdown = 0.0;  // worst peak-to-trough fraction of peak value
  std::size_t sales = 0;
  std::size_t rebuys = 0;
};

StrategySummary summarize(const BacktestResult& result);

/// Two prediction series against the same market, for side-by-side
/// trajectory comparisons.
struct StrategyComparison {
  BacktestResult a;
  BacktestResult b;
  StrategySummary summary_a;
  StrategySummary summary_b;
};

StrategyComparison compare_strategies(const PriceSeries& prices,
                                      const PredictionSeries& predictions_a,
                                      const PredictionSeries& predictions_b,
                                      const LabelSeries& actual_down,
                                      const StrategyConfig& cfg);

/// CSV trajectory (date,shares,cash,value), one row per day.
void write_trajectory_csv(const std::filesystem::path& path,
                          const BacktestResult& result);

}  // namespace vwss
