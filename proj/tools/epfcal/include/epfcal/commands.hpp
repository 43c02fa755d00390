#pragma once

#include "epfcal/config.hpp"

#include <iosfwd>

namespace epf::cli {

// Each command validates the configuration and its inputs completely before
// it creates the output directory or writes any file. Errors are thrown.

/// Writes <out>/panel.csv and <out>/regimes.csv.
void cmd_synth(const RunConfig& config, std::ostream& log);
/// Writes forecasts.csv, runs.json, timings.json, rmse_by_year.csv and
/// rmse_by_year.json; prints the per-year RMSE table.
void cmd_backtest(const RunConfig& config, std::ostream& log);
/// Writes ksweep.csv.
void cmd_ksweep(const RunConfig& config, std::ostream& log);
/// Reads the forecast file; writes ledger.csv, econ.csv and econ.json,
/// including the crystal-ball row; prints the per-year economic table.
void cmd_trade_eval(const RunConfig& config, std::ostream& log);
/// Reads rmse_by_year.csv and econ.csv from the output directory and writes
/// relative.csv against the reference method.
void cmd_report(const RunConfig& config, std::ostream& log);

void run_command(Command command, const RunConfig& config, std::ostream& log);

}  // namespace epf::cli
