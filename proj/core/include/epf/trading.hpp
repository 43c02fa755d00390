#pragma once

#include "epf/backtest.hpp"
#include "epf/dataset.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epf {

struct StrategyParams {
  double efficiency = 0.9;
  double threshold = 50.0;

  void validate() const;
};

/// Charge hour `charge` < discharge hour `discharge` (0-based) and the
/// efficiency-adjusted spread eta * P[discharge] - P[charge] / eta.
struct HourPair {
  int charge = 0;
  int discharge = 1;
  double spread = 0.0;
};

struct TradeDecision {
  bool traded = false;
  HourPair pair;
};

using DayPrices = std::span<const double, kHoursPerDay>;

/// Pair with the largest spread; ties go to the earliest charge hour, then
/// the earliest discharge hour.
HourPair choose_pair(DayPrices forecast, const StrategyParams& params);

/// Trade iff the forecast spread reaches the threshold (inclusive).
TradeDecision decide(DayPrices forecast, const StrategyParams& params);

/// Realized profit at actual prices for the pre-committed hours; 0 if no trade.
double realize(DayPrices actual, const TradeDecision& decision, const StrategyParams& params);

struct CrystalBallDay {
  TradeDecision decision;
  double profit = 0.0;
};

/// Perfect-foresight benchmark: decides on the actual prices.
CrystalBallDay crystal_ball(DayPrices actual, const StrategyParams& params);

struct TradeDay {
  Date date;
  bool traded = false;
  int charge = 0;
  int discharge = 1;
  double predicted_spread = 0.0;
  double profit = 0.0;
};

struct TradeLedger {
  std::string label;
  std::vector<TradeDay> days;
};

TradeLedger trade_ledger(const ForecastRun& run, const HourlyPanel& panel, const StrategyParams& params);
TradeLedger crystal_ball_ledger(const HourlyPanel& panel, DayRange days, const StrategyParams& params);

struct YearEcon {
  int year = 0;
  double total_profit = 0.0;
  std::size_t trades = 0;
  std::optional<double> profit_per_trade;
  std::optional<double> sharpe;
};

struct EconReport {
  std::string label;
  std::vector<YearEcon> years;
};

/// Per calendar year: total profit, trade count, profit per trade and the
/// Sharpe ratio PPT / sd, sd being the sample standard deviation of the
/// profits on traded days. PPT needs one trade; SR needs two and sd > 0.
EconReport econ_report(const TradeLedger& ledger);

}  // namespace epf
