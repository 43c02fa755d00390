#include "epf/trading.hpp"

#include "epf/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace epf {

void StrategyParams::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("efficiency must lie in (0, 1]");
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) throw ConfigError("threshold must be finite and >= 0");
}

HourPair choose_pair(DayPrices forecast, const StrategyParams& params) {
  const double eta = params.efficiency;
  HourPair best{0, 1, eta * forecast[1] - forecast[0] / eta};
  for (int h1 = 0; h1 < kHoursPerDay; ++h1) {
    const double cost = forecast[static_cast<std::size_t>(h1)] / eta;
    for (int h2 = h1 + 1; h2 < kHoursPerDay; ++h2) {
      const double spread = eta * forecast[static_cast<std::size_t>(h2)] - cost;
      if (spread > best.spread) best = {h1, h2, spread};
    }
  }
  return best;
}

TradeDecision decide(DayPrices forecast, const StrategyParams& params) {
  const auto pair = choose_pair(forecast, params);
  return {pair.spread >= params.threshold, pair};
}

double realize(DayPrices actual, const TradeDecision& decision, const StrategyParams& params) {
  if (!decision.traded) return 0.0;
  const double eta = params.efficiency;
  return eta * actual[static_cast<std::size_t>(decision.pair.discharge)] -
         actual[static_cast<std::size_t>(decision.pair.charge)] / eta;
}

CrystalBallDay crystal_ball(DayPrices actual, const StrategyParams& params) {
  CrystalBallDay out;
  out.decision = decide(actual, params);
  out.profit = realize(actual, out.decision, params);
  return out;
}

namespace {

DayPrices row_span(const HourMatrix& m, std::size_t row) {
  return DayPrices(m.row(static_cast<Eigen::Index>(row)).data(), kHoursPerDay);
}

TradeDay to_trade_day(Date date, const TradeDecision& decision, double profit) {
  return {date, decision.traded, decision.pair.charge, decision.pair.discharge, decision.pair.spread, profit};
}

}  // namespace

TradeLedger trade_ledger(const ForecastRun& run, const HourlyPanel& panel, const StrategyParams& params) {
  params.validate();
  if (run.days.end > panel.n_days()) throw ConfigError(run.label + ": forecast run extends beyond the panel");
  TradeLedger ledger;
  ledger.label = run.label;
  for (std::size_t i = 0; i < run.days.size(); ++i) {
    const auto d = run.days.begin + i;
    const auto decision = decide(row_span(run.forecasts, i), params);
    const double profit = realize(row_span(panel.prices, d), decision, params);
    ledger.days.push_back(to_trade_day(panel.days[d], decision, profit));
  }
  return ledger;
}

TradeLedger crystal_ball_ledger(const HourlyPanel& panel, DayRange days, const StrategyParams& params) {
  params.validate();
  TradeLedger ledger;
  ledger.label = "Crystal ball";
  for (std::size_t d = days.begin; d < days.end; ++d) {
    const auto day = crystal_ball(row_span(panel.prices, d), params);
    ledger.days.push_back(to_trade_day(panel.days[d], day.decision, day.profit));
  }
  return ledger;
}

EconReport econ_report(const TradeLedger& ledger) {
  std::map<int, std::vector<const TradeDay*>> by_year;
  for (const auto& day : ledger.days) {
    by_year[static_cast<int>(std::chrono::year_month_day{day.date}.year())].push_back(&day);
  }
  EconReport report;
  report.label = ledger.label;
  for (const auto& [year, days] : by_year) {
    YearEcon econ;
    econ.year = year;
    std::vector<double> profits;
    for (const auto* day : days) {
      if (!day->traded) continue;
      profits.push_back(day->profit);
      econ.total_profit += day->profit;
    }
    econ.trades = profits.size();
    if (econ.trades > 0) econ.profit_per_trade = econ.total_profit / static_cast<double>(econ.trades);
    if (econ.trades > 1) {
      double mean = 0.0;
      for (double p : profits) mean += p;
      mean /= static_cast<double>(profits.size());
      double ss = 0.0;
      for (double p : profits) ss += (p - mean) * (p - mean);
      const double sd = std::sqrt(ss / static_cast<double>(profits.size() - 1));
      const auto [lo, hi] = std::minmax_element(profits.begin(), profits.end());
      if (*lo != *hi && sd > 0.0) econ.sharpe = *econ.profit_per_trade / sd;
    }
    report.years.push_back(econ);
  }
  return report;
}

}  // namespace epf
