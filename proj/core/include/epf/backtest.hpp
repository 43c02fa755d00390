#pragma once

#include "epf/dataset.hpp"
#include "epf/design.hpp"
#include "epf/strategies.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace epf {

/// Forecasts of one method over a test range, on the original price scale.
struct ForecastRun {
  std::string label;
  MethodConfig method;
  DayRange days;
  std::vector<Date> dates;
  HourMatrix forecasts;
  double seconds = 0.0;
};

struct BacktestOptions {
  std::size_t workers = 1;
};

/// Rolling one-day-ahead forecasts for every test day, hour and method.
/// A failing cell aborts the run; the error names method, date and hour.
std::vector<ForecastRun> run_backtest(const HourlyPanel& panel, const ModelSpec& spec,
                                      std::span<const MethodConfig> methods, const SplitGeometry& split,
                                      BacktestOptions options = {});

struct YearRmse {
  int year = 0;
  double rmse = 0.0;
  std::size_t cells = 0;
};

struct ErrorReport {
  std::string label;
  std::vector<YearRmse> years;
  double overall = 0.0;
};

double rmse(std::span<const double> forecast, std::span<const double> actual);

/// RMSE over all (day, hour) cells of each calendar year in the run.
ErrorReport rmse_by_year(const ForecastRun& run, const HourlyPanel& panel);

struct KSweepPoint {
  std::size_t k = 0;
  double rmse = 0.0;
};

/// One ARHNN(k) backtest per k; RMSE over the whole test range.
std::vector<KSweepPoint> k_sweep(const HourlyPanel& panel, const ModelSpec& spec, const SplitGeometry& split,
                                 std::span<const std::size_t> k_values, BacktestOptions options = {});

}  // namespace epf
