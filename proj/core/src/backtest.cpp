#include "epf/backtest.hpp"

#include "epf/error.hpp"
#include "epf/parallel.hpp"

#include <chrono>
#include <cmath>
#include <map>

namespace epf {

std::vector<ForecastRun> run_backtest(const HourlyPanel& panel, const ModelSpec& spec,
                                      std::span<const MethodConfig> methods, const SplitGeometry& split,
                                      BacktestOptions options) {
  const auto calib = split.calibration_len();
  const auto valid = split.validation_len();
  for (const auto& m : methods) m.validate(spec, calib, valid);
  const auto test = split.test();
  if (test.empty() || test.end > panel.n_days() || test.begin < split.required_history()) {
    throw ConfigError("test range does not fit the panel");
  }

  const Forecaster forecaster(panel, spec, calib, valid);
  std::vector<ForecastRun> runs;
  runs.reserve(methods.size());
  for (const auto& method : methods) {
    ForecastRun run;
    run.label = method.label();
    run.method = method;
    run.days = test;
    run.dates.assign(panel.days.begin() + static_cast<std::ptrdiff_t>(test.begin),
                     panel.days.begin() + static_cast<std::ptrdiff_t>(test.end));
    run.forecasts = HourMatrix::Zero(static_cast<Eigen::Index>(test.size()), kHoursPerDay);
    const auto lookback = method.lookback(calib, valid);

    const auto start = std::chrono::steady_clock::now();
    parallel_for(test.size(), options.workers, [&](std::size_t i) {
      const auto d = test.begin + i;
      int hour = 0;
      try {
        const auto stats = forecaster.stats_for(d);
        for (; hour < kHoursPerDay; ++hour) {
          const auto design = forecaster.design(d, hour, lookback, stats);
          const double value = forecast(design, method, calib, valid);
          if (!std::isfinite(value)) throw SingularDesignError("non-finite forecast");
          run.forecasts(static_cast<Eigen::Index>(i), hour) = value;
        }
      } catch (const std::exception& e) {
        throw Error(run.label + ", " + format_date(panel.days[d]) + ", hour " + std::to_string(hour + 1) + ": " +
                    e.what());
      }
    });
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    runs.push_back(std::move(run));
  }
  return runs;
}

double rmse(std::span<const double> forecast, std::span<const double> actual) {
  if (forecast.size() != actual.size() || forecast.empty()) throw ConfigError("RMSE needs equal, non-empty inputs");
  double ss = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double e = forecast[i] - actual[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(forecast.size()));
}

ErrorReport rmse_by_year(const ForecastRun& run, const HourlyPanel& panel) {
  if (run.days.end > panel.n_days() || static_cast<std::size_t>(run.forecasts.rows()) != run.days.size()) {
    throw ConfigError(run.label + ": forecast run does not match the panel");
  }
  struct Acc {
    double ss = 0.0;
    std::size_t n = 0;
  };
  std::map<int, Acc> by_year;
  Acc total;
  for (std::size_t i = 0; i < run.days.size(); ++i) {
    const auto d = run.days.begin + i;
    auto& acc = by_year[panel.year(d)];
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double e = run.forecasts(static_cast<Eigen::Index>(i), h) - panel.prices(static_cast<Eigen::Index>(d), h);
      acc.ss += e * e;
      ++acc.n;
      total.ss += e * e;
      ++total.n;
    }
  }
  ErrorReport report;
  report.label = run.label;
  for (const auto& [year, acc] : by_year) {
    report.years.push_back({year, std::sqrt(acc.ss / static_cast<double>(acc.n)), acc.n});
  }
  report.overall = std::sqrt(total.ss / static_cast<double>(total.n));
  return report;
}

std::vector<KSweepPoint> k_sweep(const HourlyPanel& panel, const ModelSpec& spec, const SplitGeometry& split,
                                 std::span<const std::size_t> k_values, BacktestOptions options) {
  std::vector<MethodConfig> methods;
  for (auto k : k_values) methods.push_back(MethodConfig::arhnn_k(k));
  for (const auto& m : methods) m.validate(spec, split.calibration_len(), split.validation_len());
  std::vector<KSweepPoint> out;
  for (const auto& m : methods) {
    const auto runs = run_backtest(panel, spec, std::span(&m, 1), split, options);
    out.push_back({m.k, rmse_by_year(runs.front(), panel).overall});
  }
  return out;
}

}  // namespace epf
