#include "vwss/backtest.hpp"

#include <algorithm>
#include <string>

#include "vwss/errors.hpp"
#include "vwss/io.hpp"

namespace vwss {

namespace {

void check_config(const StrategyConfig& cfg) {
  if (!(cfg.initial_shares >= 0.0)) {
    throw DomainError("initial shares must be nonnegative");
  }
  if (!(cfg.sell_quantity > 0.0)) {
    throw DomainError("sell quantity must be positive");
  }
  if (cfg.sell_quantity > cfg.initial_shares) {
    throw DomainError("sell quantity " + std::to_string(cfg.sell_quantity) +
                      " exceeds initial shares " +
                      std::to_string(cfg.initial_shares));
  }
  if (cfg.rebuy_window < 1) {
    throw DomainError("rebuy window must be >= 1");
  }
}

// Cash pool from one or more sales awaiting a rebuy. The window and deadline
// stay those of the FIRST sale in the pool; later sales only add cash.
struct RebuyPool {
  bool open = false;
  std::size_t window_start = 0;  // first day an actual down triggers the buy
  std::size_t window_end = 0;    // last such day
  std::size_t deadline = 0;  // unconditional buy day (clamped to the run end)
};

}  // namespace

BacktestResult run_backtest(const PriceSeries& prices,
                            const PredictionSeries& predictions,
                            const LabelSeries& actual_down,
                            const StrategyConfig& cfg) {
  check_config(cfg);
  const std::size_t n = prices.size();
  if (predictions.size() != n || actual_down.size() != n) {
    throw AlignmentError(
        "prices, predictions, and down labels must have equal length, got " +
        std::to_string(n) + ", " + std::to_string(predictions.size()) + ", " +
        std::to_string(actual_down.size()));
  }

  const std::vector<double>& close = prices.closes();
  BacktestResult result;
  result.history.reserve(n);

  double shares = cfg.initial_shares;
  double cash = 0.0;
  RebuyPool pool;

  for (std::size_t d = 0; d < n; ++d) {
    // Rebuy before any same-day sale: an expiring pool must not swallow the
    // proceeds of a sale executed this very close.
    if (pool.open && cash > 0.0) {
      const bool down_hit = d >= pool.window_start && d <= pool.window_end &&
                            actual_down.values()[d] != 0;
      if (down_hit || d >= pool.deadline) {
        shares += cash / close[d];
        cash = 0.0;
        pool.open = false;
        ++result.rebuys;
      }
    }

    // A down movement predicted for tomorrow sells at today's close.
    if (d + 1 < n && predictions.values()[d + 1] != 0) {
      if (shares > 0.0) {
        const double quantity = std::min(cfg.sell_quantity, shares);
        shares -= quantity;
        cash += quantity * close[d];
        ++result.sales;
        if (!pool.open) {
          pool = RebuyPool{true, d + 1, d + cfg.rebuy_window,
                           std::min(d + cfg.rebuy_window + 1, n - 1)};
        }
      } else {
        result.skipped_sales.push_back(d);
      }
    }

    result.history.push_back(
        {prices.dates()[d], shares, cash, shares * close[d] + cash});
  }
  return result;
}

StrategySummary summarize(const BacktestResult& result) {
  StrategySummary s;
  s.final_value = result.final_value();
  s.sales = result.sales;
  s.rebuys = result.rebuys;
  double peak = 0.0;
  for (const DayRecord& day : result.history) {
    peak = std::max(peak, day.value);
    if (peak > 0.0) {
      s.max_drawdown = std::max(s.max_drawdown, (peak - day.value) / peak);
    }
  }
  return s;
}

StrategyComparison compare_strategies(const PriceSeries& prices,
                                      const PredictionSeries& predictions_a,
                                      const PredictionSeries& predictions_b,
                                      const LabelSeries& actual_down,
                                      const StrategyConfig& cfg) {
  StrategyComparison cmp{run_backtest(prices, predictions_a, actual_down, cfg),
                         run_backtest(prices, predictions_b, actual_down, cfg),
                         {},
                         {}};
  cmp.summary_a = summarize(cmp.a);
  cmp.summary_b = summarize(cmp.b);
  return cmp;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const BacktestResult& result) {
  std::string out = "date,shares,cash,value\n";
  for (const DayRecord& day : result.history) {
    out += format_timestamp(day.date);
    out += ',';
    out += io::format_double(day.shares);
    out += ',';
    out += io::format_double(day.cash);
    out += ',';
    out += io::format_double(day.value);
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

}  // namespace vwss
