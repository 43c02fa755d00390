#include "epf/design.hpp"

#include "epf/error.hpp"

#include <algorithm>
#include <cmath>

namespace epf {

ModelSpec ModelSpec::for_profile(Profile profile) {
  ModelSpec spec;
  spec.profile = profile;
  if (profile == Profile::kEu) {
    spec.exogenous = {{series::kResidualLoad, true}, {series::kCoal, false}, {series::kGas, false}, {series::kEua, false}};
  } else {
    spec.exogenous = {{series::kLoad, true}, {series::kGas, false}, {series::kTemperature, true}};
  }
  return spec;
}

std::vector<std::string> ModelSpec::column_names() const {
  std::vector<std::string> names{"D_mon", "D_tue", "D_wed", "D_thu", "D_fri", "D_sat", "D_sun",
                                 "P_lag1", "P_lag2", "P_lag7", "P_prev_last", "P_prev_min", "P_prev_max"};
  for (const auto& term : exogenous) names.emplace_back(term.name);
  return names;
}

std::vector<std::size_t> ModelSpec::similarity_columns() const {
  std::vector<std::size_t> cols{layout::kLag1, layout::kLastHour, layout::kMin, layout::kMax};
  for (std::size_t i = 0; i < exogenous.size(); ++i) cols.push_back(layout::kExog + i);
  return cols;
}

void fill_row(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec, const NormStats& stats,
              std::span<double> out) {
  if (spec.dummy_count != 7) throw ConfigError("only 7 day-of-week dummies are supported");
  if (d < kMaxLag) {
    throw HistoryError("day " + std::to_string(d) + " has no lag-" + std::to_string(kMaxLag) + " price");
  }
  if (d >= panel.n_days()) throw HistoryError("day " + std::to_string(d) + " is beyond the panel");
  if (hour < 0 || hour >= kHoursPerDay) throw ConfigError("hour out of range: " + std::to_string(hour));
  if (out.size() != spec.regressor_count()) throw ConfigError("row buffer has the wrong size");

  std::fill(out.begin(), out.begin() + 7, 0.0);
  out[static_cast<std::size_t>(panel.dow[d])] = 1.0;

  const auto& p = panel.prices;
  const auto prev = static_cast<Eigen::Index>(d - 1);
  const auto& price_stats = stats.at(series::kPrice);
  auto norm_price = [&](double v) { return (v - price_stats.mean) / price_stats.sd; };

  out[layout::kLag1] = norm_price(p(prev, hour));
  out[layout::kLag2] = norm_price(p(static_cast<Eigen::Index>(d - 2), hour));
  out[layout::kLag7] = norm_price(p(static_cast<Eigen::Index>(d - 7), hour));
  out[layout::kLastHour] = norm_price(p(prev, kHoursPerDay - 1));
  out[layout::kMin] = norm_price(p.row(prev).minCoeff());
  out[layout::kMax] = norm_price(p.row(prev).maxCoeff());

  for (std::size_t i = 0; i < spec.exogenous.size(); ++i) {
    const auto& term = spec.exogenous[i];
    const double raw = term.hourly ? panel.hourly_series(term.name)(static_cast<Eigen::Index>(d), hour)
                                   : panel.daily_known_before(term.name, d);
    out[layout::kExog + i] = stats.normalize(term.name, raw);
  }
}

RegressorRow build_row(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec,
                       const NormStats& stats) {
  RegressorRow row;
  row.x.resize(static_cast<Eigen::Index>(spec.regressor_count()));
  fill_row(panel, d, hour, spec, stats, std::span<double>(row.x.data(), static_cast<std::size_t>(row.x.size())));
  row.target = panel.prices(static_cast<Eigen::Index>(d), hour);
  return row;
}

Design build_design(const HourlyPanel& panel, std::span<const std::size_t> days, int hour, const ModelSpec& spec,
                    const NormStats& stats) {
  const auto p = static_cast<Eigen::Index>(spec.regressor_count());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X(static_cast<Eigen::Index>(days.size()), p);
  Design out;
  out.y.resize(static_cast<Eigen::Index>(days.size()));
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    try {
      fill_row(panel, days[i], hour, spec, stats, std::span<double>(X.row(r).data(), static_cast<std::size_t>(p)));
    } catch (const Error& e) {
      throw HistoryError("design row for day " + std::to_string(days[i]) + ": " + e.what());
    }
    out.y(r) = panel.prices(static_cast<Eigen::Index>(days[i]), hour);
  }
  out.X = X;
  return out;
}

Eigen::VectorXd build_similarity(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec,
                                 const NormStats& stats) {
  const auto row = build_row(panel, d, hour, spec, stats);
  const auto cols = spec.similarity_columns();
  Eigen::VectorXd v(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) v(static_cast<Eigen::Index>(i)) = row.x(static_cast<Eigen::Index>(cols[i]));
  return v;
}

}  // namespace epf
