#include "epfcal/commands.hpp"

#include <epf/error.hpp>
#include <epf/io.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace epf::cli {

namespace fs = std::filesystem;

namespace {

/// Output files rendered in memory, written only once every step succeeded.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::ostream& add(std::string name) {
    files_.emplace_back(std::move(name), std::ostringstream{});
    return files_.back().second;
  }

  void commit(std::ostream& log) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    for (auto& [name, body] : files_) {
      const auto path = dir_ / name;
      std::ofstream out(path, std::ios::binary);
      out << body.str();
      out.close();
      if (!out) throw DataError("cannot write '" + path.string() + "'");
      log << "wrote " << path.string() << '\n';
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::ostringstream>> files_;
};

HourlyPanel read_panel(const RunConfig& config) {
  if (!fs::is_regular_file(config.panel)) throw DataError("panel file '" + config.panel.string() + "' does not exist");
  return load_panel(config.panel, config.profile);
}

std::string span_text(const HourlyPanel& panel, std::size_t first, std::size_t last) {
  return format_date(panel.days[first]) + ".." + format_date(panel.days[last]);
}

/// Restricts a run read from disk to the test range; throws if days are missing.
ForecastRun restrict_to(const ForecastRun& run, DayRange test, const HourlyPanel& panel) {
  if (run.days.begin > test.begin || run.days.end < test.end) {
    std::string gap;
    if (run.days.begin > test.begin) gap = span_text(panel, test.begin, std::min(run.days.begin, test.end) - 1);
    if (run.days.end < test.end) {
      if (!gap.empty()) gap += " and ";
      gap += span_text(panel, std::max(run.days.end, test.begin), test.end - 1);
    }
    throw DataError(run.label + ": forecasts cover " + span_text(panel, run.days.begin, run.days.end - 1) +
                    " but the test range is " + span_text(panel, test.begin, test.end - 1) + "; missing " + gap);
  }
  ForecastRun out = run;
  out.days = test;
  out.forecasts = run.forecasts.middleRows(static_cast<Eigen::Index>(test.begin - run.days.begin),
                                           static_cast<Eigen::Index>(test.size()));
  out.dates.assign(panel.days.begin() + static_cast<std::ptrdiff_t>(test.begin),
                   panel.days.begin() + static_cast<std::ptrdiff_t>(test.end));
  return out;
}

template <typename Reader>
auto read_file(const fs::path& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return reader(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

void cmd_synth(const RunConfig& config, std::ostream& log) {
  config.validate(Command::kSynth);
  const auto synth = config.synth_config();
  const auto generated = generate_panel(synth);
  Outputs outputs(config.out);
  write_panel_csv(generated.panel, outputs.add("panel.csv"));
  write_regime_sidecar(generated, synth, outputs.add("regimes.csv"));
  outputs.commit(log);
  log << "generated " << generated.panel.n_days() << " days (" << format_date(generated.panel.days.front()) << " to "
      << format_date(generated.panel.days.back()) << "), " << synth.regimes.size() << " regime(s), seed "
      << synth.seed << '\n';
}

void cmd_backtest(const RunConfig& config, std::ostream& log) {
  config.validate(Command::kBacktest);
  const auto methods = config.method_configs();
  const auto panel = read_panel(config);
  const auto split = make_split(panel, config.split());
  const auto spec = ModelSpec::for_profile(config.profile);

  const auto runs = run_backtest(panel, spec, methods, split, {config.workers});
  std::vector<ErrorReport> reports;
  for (const auto& run : runs) reports.push_back(rmse_by_year(run, panel));

  Outputs outputs(config.out);
  write_forecasts_csv(runs, panel, outputs.add("forecasts.csv"));
  write_runs_json(runs, panel, outputs.add("runs.json"));
  write_timings_json(runs, outputs.add("timings.json"));
  write_rmse_csv(reports, outputs.add("rmse_by_year.csv"));
  write_rmse_json(reports, outputs.add("rmse_by_year.json"));
  outputs.commit(log);

  log << "\nRMSE by year, test days " << span_text(panel, split.test().begin, split.test().end - 1) << "\n"
      << format_rmse_table(reports);
  for (const auto& run : runs) log << run.label << ": " << run.seconds << " s\n";
}

void cmd_ksweep(const RunConfig& config, std::ostream& log) {
  config.validate(Command::kKSweep);
  const auto grid = config.resolved_k_grid();
  const auto panel = read_panel(config);
  const auto split = make_split(panel, config.split());
  const auto spec = ModelSpec::for_profile(config.profile);

  const auto points = k_sweep(panel, spec, split, grid, {config.workers});
  Outputs outputs(config.out);
  write_ksweep_csv(points, outputs.add("ksweep.csv"));
  outputs.commit(log);

  const auto best = std::min_element(points.begin(), points.end(),
                                     [](const auto& a, const auto& b) { return a.rmse < b.rmse; });
  log << points.size() << " values of k; lowest RMSE " << best->rmse << " at k = " << best->k << '\n';
}

void cmd_trade_eval(const RunConfig& config, std::ostream& log) {
  config.validate(Command::kTradeEval);
  const auto params = config.strategy();
  const auto panel = read_panel(config);
  const auto split = make_split(panel, config.split());
  const auto runs =
      read_file(config.forecasts_path(), [&](std::istream& in) { return read_forecasts_csv(in, panel); });
  if (runs.empty()) throw DataError("'" + config.forecasts_path().string() + "' holds no forecasts");

  std::vector<TradeLedger> ledgers;
  for (const auto& run : runs) ledgers.push_back(trade_ledger(restrict_to(run, split.test(), panel), panel, params));
  ledgers.push_back(crystal_ball_ledger(panel, split.test(), params));
  std::vector<EconReport> reports;
  for (const auto& ledger : ledgers) reports.push_back(econ_report(ledger));

  Outputs outputs(config.out);
  write_ledger_csv(ledgers, outputs.add("ledger.csv"));
  write_econ_csv(reports, outputs.add("econ.csv"));
  write_econ_json(reports, outputs.add("econ.json"));
  outputs.commit(log);

  log << "\nBattery arbitrage, efficiency " << params.efficiency << ", threshold " << params.threshold << "\n"
      << format_econ_table(reports);
}

void cmd_report(const RunConfig& config, std::ostream& log) {
  config.validate(Command::kReport);
  const auto rmse_path = config.out / "rmse_by_year.csv";
  const auto econ_path = config.out / "econ.csv";
  const bool has_rmse = fs::is_regular_file(rmse_path);
  const bool has_econ = fs::is_regular_file(econ_path);
  if (!has_rmse && !has_econ) {
    throw DataError("neither '" + rmse_path.string() + "' nor '" + econ_path.string() +
                    "' exists; run backtest and trade-eval first");
  }
  std::vector<ErrorReport> errors;
  std::vector<EconReport> econ;
  if (has_rmse) errors = read_file(rmse_path, [](std::istream& in) { return read_rmse_csv(in); });
  if (has_econ) econ = read_file(econ_path, [](std::istream& in) { return read_econ_csv(in); });
  const auto rows = relative_changes(errors, econ, config.reference);

  Outputs outputs(config.out);
  write_relative_csv(rows, outputs.add("relative.csv"));
  outputs.commit(log);
  log << rows.size() << " method-year rows relative to " << config.reference << '\n';
}

void run_command(Command command, const RunConfig& config, std::ostream& log) {
  switch (command) {
    case Command::kSynth:
      return cmd_synth(config, log);
    case Command::kBacktest:
      return cmd_backtest(config, log);
    case Command::kKSweep:
      return cmd_ksweep(config, log);
    case Command::kTradeEval:
      return cmd_trade_eval(config, log);
    case Command::kReport:
      return cmd_report(config, log);
  }
}

}  // namespace epf::cli
