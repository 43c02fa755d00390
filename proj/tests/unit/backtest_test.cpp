#include "epf/backtest.hpp"
#include "epf/error.hpp"
#include "epf/synth.hpp"

#include "../support/panels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace epf;

namespace {

const HourlyPanel& panel() {
  static const HourlyPanel p = generate_panel(single_regime_config(5, 3.0, 420)).panel;
  return p;
}

const ModelSpec& spec() {
  static const ModelSpec s = ModelSpec::for_profile(Profile::kEu);
  return s;
}

ForecastRun shifted_run(const HourlyPanel& p, DayRange days, double shift) {
  ForecastRun run;
  run.label = "shifted";
  run.days = days;
  run.forecasts = p.prices.middleRows(static_cast<Eigen::Index>(days.begin), static_cast<Eigen::Index>(days.size()));
  run.forecasts.array() += shift;
  return run;
}

}  // namespace

TEST(RunBacktest, OneDayOneMethod) {
  const SplitGeometry split(120, 0, DayRange{300, 301});
  const std::vector<MethodConfig> methods{MethodConfig::win(120)};
  const auto runs = run_backtest(panel(), spec(), methods, split);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].forecasts.rows(), 1);
  EXPECT_EQ(runs[0].forecasts.size(), 24);
  EXPECT_TRUE(runs[0].forecasts.allFinite());
  EXPECT_EQ(runs[0].dates.front(), panel().days[300]);
  EXPECT_GE(runs[0].seconds, 0.0);
}

TEST(RunBacktest, MatchesForecasterCellByCell) {
  const SplitGeometry split(120, 10, DayRange{300, 304});
  const std::vector<MethodConfig> methods{MethodConfig::arhnn_k(60), MethodConfig::arhnn({28, 60, 120})};
  const auto runs = run_backtest(panel(), spec(), methods, split);
  const Forecaster f(panel(), spec(), 120, 10);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t d = 300; d < 304; ++d) {
      for (int h = 0; h < 24; h += 7) {
        EXPECT_EQ(runs[m].forecasts(static_cast<Eigen::Index>(d - 300), h), f.forecast(methods[m], d, h));
      }
    }
  }
}

TEST(RunBacktest, DeterministicAndWorkerInvariant) {
  const SplitGeometry split(150, 14, DayRange{360, 372});
  const std::vector<MethodConfig> methods{MethodConfig::win(150), MethodConfig::avg({56, 150}),
                                          MethodConfig::arhnn_k(60), MethodConfig::arhnn({28, 91, 150}),
                                          MethodConfig::wls()};
  const auto a = run_backtest(panel(), spec(), methods, split, {.workers = 1});
  const auto b = run_backtest(panel(), spec(), methods, split, {.workers = 1});
  const auto c = run_backtest(panel(), spec(), methods, split, {.workers = 4});
  for (std::size_t m = 0; m < methods.size(); ++m) {
    EXPECT_EQ(a[m].forecasts, b[m].forecasts) << methods[m].label();
    EXPECT_EQ(a[m].forecasts, c[m].forecasts) << methods[m].label();
  }
}

TEST(RunBacktest, InvalidMethodRejectedBeforeWork) {
  const SplitGeometry split(120, 0, DayRange{300, 310});
  const std::vector<MethodConfig> methods{MethodConfig::win(120), MethodConfig::win(121)};
  EXPECT_THROW(run_backtest(panel(), spec(), methods, split), ConfigError);
}

TEST(RunBacktest, FailureNamesMethodDateAndHour) {
  // Identical daily series make the design rank deficient.
  const auto p = epf::testing::make_panel(
      200, Profile::kEu,
      [](std::string_view, std::size_t d, int h) { return std::sin(0.3 * static_cast<double>(d * 24 + h)) * 10 + 40; },
      [](std::string_view, std::size_t d) { return std::cos(0.7 * static_cast<double>(d)) + 5; });
  const SplitGeometry split(60, 0, DayRange{150, 152});
  const std::vector<MethodConfig> methods{MethodConfig::win(60)};
  try {
    run_backtest(p, spec(), methods, split);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("Win(60)"), std::string::npos) << msg;
    EXPECT_NE(msg.find(format_date(p.days[150])), std::string::npos) << msg;
    EXPECT_NE(msg.find("hour 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("singular"), std::string::npos) << msg;
  }
}

TEST(RunBacktest, NoLookAhead) {
  const std::size_t d = 380;
  const SplitGeometry split(150, 14, DayRange{d, d + 1});
  const std::vector<MethodConfig> methods{MethodConfig::win(150), MethodConfig::avg({56, 150}),
                                          MethodConfig::arhnn_k(60), MethodConfig::arhnn({28, 91, 150}),
                                          MethodConfig::wls()};
  const auto before = run_backtest(panel(), spec(), methods, split);
  auto altered = panel();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-300, 300);
  for (auto i = static_cast<Eigen::Index>(d); i < altered.prices.rows(); ++i) {
    for (int h = 0; h < 24; ++h) altered.prices(i, h) = u(rng);
  }
  for (auto& [name, v] : altered.daily) {
    for (std::size_t i = d; i < v.size(); ++i) v[i] = u(rng);
  }
  for (auto& [name, m] : altered.hourly) {
    for (auto i = static_cast<Eigen::Index>(d + 1); i < m.rows(); ++i) {
      for (int h = 0; h < 24; ++h) m(i, h) = u(rng);
    }
  }
  const auto after = run_backtest(altered, spec(), methods, split);
  for (std::size_t m = 0; m < methods.size(); ++m) EXPECT_EQ(before[m].forecasts, after[m].forecasts);
}

TEST(Rmse, HandExample) {
  const std::vector<double> f{3, 4};
  const std::vector<double> a{0, 0};
  EXPECT_NEAR(rmse(f, a), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(rmse(f, a), 3.5355, 1e-4);
}

TEST(RmseByYear, PerfectForecastIsZero) {
  const auto p = epf::testing::random_panel(800, Profile::kEu, 2);
  const auto report = rmse_by_year(shifted_run(p, DayRange{10, 800}, 0.0), p);
  ASSERT_EQ(report.years.size(), 3u);
  for (const auto& y : report.years) EXPECT_EQ(y.rmse, 0.0);
}

TEST(RmseByYear, ConstantBias) {
  const auto p = epf::testing::random_panel(800, Profile::kEu, 2);
  const auto report = rmse_by_year(shifted_run(p, DayRange{10, 800}, 2.0), p);
  for (const auto& y : report.years) EXPECT_NEAR(y.rmse, 2.0, 1e-12);
  EXPECT_NEAR(report.overall, 2.0, 1e-12);
}

TEST(RmseByYear, YearsPartitionTheRange) {
  const auto p = epf::testing::random_panel(800, Profile::kEu, 2);
  const DayRange days{300, 790};
  const auto report = rmse_by_year(shifted_run(p, days, 1.0), p);
  std::size_t cells = 0;
  for (const auto& y : report.years) cells += y.cells;
  EXPECT_EQ(cells, days.size() * 24);
  EXPECT_EQ(report.years.front().year, p.year(300));
  EXPECT_EQ(report.years.back().year, p.year(789));
}

TEST(RmseByYear, SingleYearEqualsDirectFormula) {
  const auto p = epf::testing::random_panel(200, Profile::kEu, 3);
  auto run = shifted_run(p, DayRange{20, 120}, 0.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 5.0);
  std::vector<double> f;
  std::vector<double> a;
  for (Eigen::Index i = 0; i < run.forecasts.rows(); ++i) {
    for (int h = 0; h < 24; ++h) {
      run.forecasts(i, h) += n(rng);
      f.push_back(run.forecasts(i, h));
      a.push_back(p.prices(i + 20, h));
    }
  }
  const auto report = rmse_by_year(run, p);
  ASSERT_EQ(report.years.size(), 1u);
  EXPECT_NEAR(report.years[0].rmse, rmse(f, a), 1e-12);
}

TEST(KSweep, FullCalibrationEqualsWindow) {
  const SplitGeometry split(120, 0, DayRange{380, 390});
  const std::vector<std::size_t> ks{120};
  const auto sweep = k_sweep(panel(), spec(), split, ks);
  const std::vector<MethodConfig> win{MethodConfig::win(120)};
  const auto runs = run_backtest(panel(), spec(), win, split);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].rmse, rmse_by_year(runs[0], panel()).overall);
}

TEST(KSweep, OneRowPerK) {
  const SplitGeometry split(120, 0, DayRange{380, 383});
  const std::vector<std::size_t> ks{30, 60, 90, 120};
  const auto sweep = k_sweep(panel(), spec(), split, ks);
  ASSERT_EQ(sweep.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(sweep[i].k, ks[i]);
  EXPECT_THROW(k_sweep(panel(), spec(), split, std::vector<std::size_t>{200}), ConfigError);
}

TEST(KSweep, TwoRegimeOptimumBelowCalibration) {
  const auto synthetic = generate_panel(two_regime_config(42));
  const SplitGeometry split(728, 0, DayRange{1100, 1130});
  const std::vector<std::size_t> ks{182, 364, 546, 728};
  const auto sweep = k_sweep(synthetic.panel, spec(), split, ks);
  const auto best = std::min_element(sweep.begin(), sweep.end(),
                                     [](const auto& a, const auto& b) { return a.rmse < b.rmse; });
  EXPECT_LT(best->k, 728u);
}
