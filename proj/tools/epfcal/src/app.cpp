#include "epfcal/app.hpp"

#include "epfcal/commands.hpp"

#include <epf/error.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>

namespace epf::cli {

namespace {

/// Raw flag values; only flags given on the command line override the config file.
struct Flags {
  std::string config;
  std::string panel;
  std::string profile;
  std::string methods;
  std::size_t calib = 0;
  std::size_t valid = 0;
  std::string test_first;
  std::string test_last;
  std::string kgrid;
  double threshold = 0.0;
  double efficiency = 0.0;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string forecasts;
  std::string reference;
  std::string preset;
  std::size_t days = 0;
  double noise_scale = 0.0;
};

struct Options {
  CLI::Option* config = nullptr;
  CLI::Option* panel = nullptr;
  CLI::Option* profile = nullptr;
  CLI::Option* methods = nullptr;
  CLI::Option* calib = nullptr;
  CLI::Option* valid = nullptr;
  CLI::Option* test_first = nullptr;
  CLI::Option* test_last = nullptr;
  CLI::Option* kgrid = nullptr;
  CLI::Option* threshold = nullptr;
  CLI::Option* efficiency = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* forecasts = nullptr;
  CLI::Option* reference = nullptr;
  CLI::Option* preset = nullptr;
  CLI::Option* days = nullptr;
  CLI::Option* noise_scale = nullptr;
};

Options add_options(CLI::App& sub, Flags& f, Command command) {
  Options o;
  o.config = sub.add_option("--config", f.config, "JSON configuration file; flags override its values");
  o.out = sub.add_option("--out", f.out, "Output directory (default: out)");
  o.workers = sub.add_option("--workers", f.workers, "Worker threads (default: 1)");
  o.profile = sub.add_option("--profile", f.profile, "Market profile: eu or isone (default: eu)");
  if (command == Command::kSynth) {
    o.seed = sub.add_option("--seed", f.seed, "Generator seed (default: 42)");
    o.preset = sub.add_option("--preset", f.preset, "Regime preset: two, single or custom (default: two)");
    o.days = sub.add_option("--days", f.days, "Number of days to generate");
    o.noise_scale = sub.add_option("--noise-scale", f.noise_scale, "Noise multiplier for the two-regime preset");
  }
  if (command == Command::kReport) {
    o.reference = sub.add_option("--reference", f.reference, "Reference method label (default: Win(728))");
  }
  if (command == Command::kBacktest || command == Command::kKSweep || command == Command::kTradeEval) {
    o.panel = sub.add_option("--panel", f.panel, "Panel CSV file");
    o.calib = sub.add_option("--calib", f.calib, "Calibration window length in days (default: 728)");
    o.valid = sub.add_option("--valid", f.valid, "Validation window length in days (default: 728)");
    o.test_first = sub.add_option("--test-first", f.test_first, "First test day, YYYY-MM-DD");
    o.test_last = sub.add_option("--test-last", f.test_last, "Last test day, YYYY-MM-DD");
  }
  if (command == Command::kBacktest) {
    o.methods = sub.add_option("--methods", f.methods,
                               "Comma-separated methods: win:N, avg6, avgall, avg:N/M/..., arhnn:K, arhnn, wls");
  }
  if (command == Command::kBacktest || command == Command::kKSweep) {
    o.kgrid = sub.add_option("--kgrid", f.kgrid, "k grid as first:last:step or a comma list (default: 28:calib:7)");
  }
  if (command == Command::kTradeEval) {
    o.forecasts = sub.add_option("--forecasts", f.forecasts, "Forecast CSV (default: <out>/forecasts.csv)");
    o.threshold = sub.add_option("--threshold", f.threshold, "Minimum predicted spread to trade (default: 50)");
    o.efficiency = sub.add_option("--efficiency", f.efficiency, "One-way battery efficiency (default: 0.9)");
  }
  return o;
}

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

RunConfig build_config(const Flags& f, const Options& o) {
  RunConfig c = given(o.config) ? load_config(f.config) : RunConfig{};
  if (given(o.panel)) c.panel = f.panel;
  if (given(o.profile)) c.profile = parse_profile(f.profile);
  if (given(o.methods)) c.methods = split_list(f.methods);
  if (given(o.calib)) c.calibration_len = f.calib;
  if (given(o.valid)) c.validation_len = f.valid;
  if (given(o.test_first)) c.test_first = parse_config_date(f.test_first, "--test-first");
  if (given(o.test_last)) c.test_last = parse_config_date(f.test_last, "--test-last");
  if (given(o.kgrid)) c.k_grid = parse_k_grid(f.kgrid);
  if (given(o.threshold)) c.threshold = f.threshold;
  if (given(o.efficiency)) c.efficiency = f.efficiency;
  if (given(o.workers)) c.workers = f.workers;
  if (given(o.seed)) c.seed = f.seed;
  if (given(o.out)) c.out = f.out;
  if (given(o.forecasts)) c.forecasts = f.forecasts;
  if (given(o.reference)) c.reference = f.reference;
  if (given(o.preset)) c.synth.preset = f.preset;
  if (given(o.days)) c.synth.days = f.days;
  if (given(o.noise_scale)) c.synth.noise_scale = f.noise_scale;
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Day-ahead electricity price forecasting with calibration sample selection", "epfcal"};
  app.require_subcommand(1);

  const std::vector<std::pair<Command, std::string>> commands{
      {Command::kSynth, "Generate a seeded synthetic panel with a regime sidecar"},
      {Command::kBacktest, "Rolling day-ahead backtest and RMSE per year"},
      {Command::kKSweep, "RMSE of ARHNN(k) over a grid of k"},
      {Command::kTradeEval, "Battery-arbitrage evaluation of forecast files"},
      {Command::kReport, "Relative changes against a reference method"}};
  Flags flags;
  std::vector<std::pair<CLI::App*, Options>> subs;
  for (const auto& [command, help] : commands) {
    auto* sub = app.add_subcommand(std::string(to_string(command)), help);
    subs.emplace_back(sub, add_options(*sub, flags, command));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i].first->parsed()) continue;
    const auto command = commands[i].first;
    try {
      const auto config = build_config(flags, subs[i].second);
      run_command(command, config, out);
      return 0;
    } catch (const ConfigError& e) {
      err << "epfcal " << to_string(command) << ": invalid configuration: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "epfcal " << to_string(command) << ": error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}

}  // namespace epf::cli
