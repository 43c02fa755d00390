#pragma once

#include <epf/backtest.hpp>
#include <epf/dataset.hpp>
#include <epf/strategies.hpp>
#include <epf/synth.hpp>
#include <epf/trading.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epf::cli {

enum class Command { kSynth, kBacktest, kKSweep, kTradeEval, kReport };

Command parse_command(std::string_view name);
std::string_view to_string(Command command);

/// Synthetic generator settings. `preset` is "two" (two alternating
/// regimes), "single" (one regime) or "custom" (regimes listed in the
/// config file).
struct SynthSettings {
  std::string preset = "two";
  std::optional<std::size_t> days;
  std::optional<std::size_t> regime_period;
  std::optional<Date> start;
  double noise_scale = 1.0;
  double noise_sd = 5.0;
  std::optional<double> daily_volatility;
  std::vector<RegimeSpec> regimes;
};

struct RunConfig {
  std::filesystem::path panel;
  Profile profile = Profile::kEu;
  std::size_t calibration_len = 728;
  std::size_t validation_len = 728;
  std::optional<Date> test_first;
  std::optional<Date> test_last;
  std::vector<std::string> methods{"win:728", "avg6", "avgall", "arhnn:182", "arhnn:364", "arhnn", "wls"};
  /// Grid for full ARHNN and for ksweep; empty means 28, 35, ..., calibration length.
  std::vector<std::size_t> k_grid;
  double threshold = 50.0;
  double efficiency = 0.9;
  std::size_t workers = 1;
  std::uint64_t seed = 42;
  std::filesystem::path out = "out";
  /// Forecast file read by trade-eval; empty means <out>/forecasts.csv.
  std::filesystem::path forecasts;
  /// Method label that report compares against.
  std::string reference = "Win(728)";
  SynthSettings synth;

  std::vector<std::size_t> resolved_k_grid() const;
  std::vector<MethodConfig> method_configs() const;
  StrategyParams strategy() const;
  SplitConfig split() const;
  SynthConfig synth_config() const;
  std::filesystem::path forecasts_path() const;

  /// Checks everything the command needs that does not require reading
  /// input files. Throws ConfigError.
  void validate(Command command) const;
};

/// "win:728", "avg6", "avgall", "avg:56/84/112", "arhnn:182", "arhnn", "wls".
MethodConfig parse_method(std::string_view token, const std::vector<std::size_t>& k_grid,
                          std::size_t calibration_len);
/// ISO date from configuration input; malformed text is a ConfigError.
Date parse_config_date(std::string_view text, std::string_view what);
/// Comma-separated tokens.
std::vector<std::string> split_list(std::string_view text);
/// "first:last:step" (inclusive) or a comma-separated list.
std::vector<std::size_t> parse_k_grid(std::string_view text);

/// Reads a JSON config file on top of the defaults. Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view json_text, RunConfig base = {});

}  // namespace epf::cli
