#pragma once

#include "epf/backtest.hpp"
#include "epf/trading.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace epf {

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

// Forecasts: long format `method,date,hour,forecast,actual`, hour 1-24.
void write_forecasts_csv(std::span<const ForecastRun> runs, const HourlyPanel& panel, std::ostream& out);
/// Reads forecasts back and aligns them with the panel. Each method must
/// cover a contiguous block of days with all 24 hours.
std::vector<ForecastRun> read_forecasts_csv(std::istream& in, const HourlyPanel& panel);
/// Forecast matrices without timings, so that reruns are byte-identical.
void write_runs_json(std::span<const ForecastRun> runs, const HourlyPanel& panel, std::ostream& out);
/// Wall-clock seconds per run; the only non-deterministic output.
void write_timings_json(std::span<const ForecastRun> runs, std::ostream& out);

// RMSE: `method,year,rmse,cells`; the whole test range is year `all`.
void write_rmse_csv(std::span<const ErrorReport> reports, std::ostream& out);
std::vector<ErrorReport> read_rmse_csv(std::istream& in);
void write_rmse_json(std::span<const ErrorReport> reports, std::ostream& out);

// Trading: `method,date,traded,charge_hour,discharge_hour,predicted_spread,profit`.
void write_ledger_csv(std::span<const TradeLedger> ledgers, std::ostream& out);
std::vector<TradeLedger> read_ledger_csv(std::istream& in);
// `method,year,total_profit,trades,profit_per_trade,sharpe`; undefined values are NA.
void write_econ_csv(std::span<const EconReport> reports, std::ostream& out);
std::vector<EconReport> read_econ_csv(std::istream& in);
void write_econ_json(std::span<const EconReport> reports, std::ostream& out);

void write_ksweep_csv(std::span<const KSweepPoint> points, std::ostream& out);
std::vector<KSweepPoint> read_ksweep_csv(std::istream& in);

/// Relative change (value - reference) / |reference| of one method-year
/// against a reference method; plot input for statistical-vs-economic
/// comparisons.
struct RelativeChange {
  std::string label;
  int year = 0;
  std::optional<double> rmse;
  std::optional<double> total_profit;
  std::optional<double> profit_per_trade;
  std::optional<double> sharpe;
};

std::vector<RelativeChange> relative_changes(std::span<const ErrorReport> errors, std::span<const EconReport> econ,
                                             const std::string& reference);
void write_relative_csv(std::span<const RelativeChange> rows, std::ostream& out);

/// Plain-text tables: methods as rows, calendar years as columns.
std::string format_rmse_table(std::span<const ErrorReport> reports);
std::string format_econ_table(std::span<const EconReport> reports);

}  // namespace epf
