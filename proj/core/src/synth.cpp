#include "epf/synth.hpp"

#include "epf/error.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>

namespace epf {

namespace {

double daily_shape(int hour) { return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (hour - 3) / 24.0); }

std::vector<double> calm_coefficients(Profile profile) {
  std::vector<double> c{10, 10, 10, 10, 10, 6, 4, 0.35, 0.10, 0.10, 0.05, 0.05, 0.05};
  if (profile == Profile::kEu) {
    c.insert(c.end(), {0.5, 0.05, 0.4, 0.15});
  } else {
    c.insert(c.end(), {0.4, 0.8, -0.2});
  }
  return c;
}

std::vector<double> crisis_coefficients(Profile profile) {
  std::vector<double> c{-20, -20, -20, -20, -20, -28, -32, 0.25, 0.05, 0.05, 0.05, 0.0, 0.10};
  if (profile == Profile::kEu) {
    c.insert(c.end(), {2.0, 0.2, 1.2, 0.5});
  } else {
    c.insert(c.end(), {1.5, 2.0, -0.8});
  }
  return c;
}

}  // namespace

void SynthConfig::validate() const {
  const auto spec = ModelSpec::for_profile(profile);
  if (days < kMaxLag + 1) throw ConfigError("synthetic panel needs more than " + std::to_string(kMaxLag) + " days");
  if (regime_period == 0) throw ConfigError("regime period must be positive");
  if (regimes.empty()) throw ConfigError("at least one regime is required");
  if (!(daily_volatility >= 0.0)) throw ConfigError("daily volatility must be non-negative");
  for (const auto& r : regimes) {
    if (r.coefficients.size() != spec.regressor_count()) {
      throw ConfigError("regime '" + r.name + "' has " + std::to_string(r.coefficients.size()) +
                        " coefficients, expected " + std::to_string(spec.regressor_count()));
    }
    double ar = 0.0;
    for (std::size_t j = layout::kLag1; j <= layout::kMax; ++j) ar += std::abs(r.coefficients[j]);
    if (ar >= 1.0) throw ConfigError("regime '" + r.name + "' has explosive price lags (sum |coef| >= 1)");
    if (!(r.noise_sd >= 0.0)) throw ConfigError("regime '" + r.name + "' has negative noise");
    for (auto name : profile_columns(profile).daily) {
      if (!r.daily_levels.count(name)) {
        throw ConfigError("regime '" + r.name + "' lacks a level for '" + std::string(name) + "'");
      }
    }
  }
}

SyntheticPanel generate_panel(const SynthConfig& config) {
  config.validate();
  const auto spec = ModelSpec::for_profile(config.profile);
  const auto& cols = profile_columns(config.profile);
  const auto n = static_cast<Eigen::Index>(config.days);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.2, 1.0);

  SyntheticPanel out;
  auto& panel = out.panel;
  panel.market_id = config.market_id;
  panel.profile = config.profile;
  panel.prices = HourMatrix::Zero(n, kHoursPerDay);
  for (auto name : cols.hourly) panel.hourly.emplace(std::string(name), HourMatrix::Zero(n, kHoursPerDay));
  for (auto name : cols.daily) panel.daily.emplace(std::string(name), std::vector<double>(config.days));
  panel.repairs.assign(config.days, kRepairNone);

  std::map<std::string, double, std::less<>> fuel_state;
  for (auto name : cols.daily) fuel_state[std::string(name)] = 0.0;
  double wind_level = 0.0;

  for (std::size_t d = 0; d < config.days; ++d) {
    const auto date = config.start + std::chrono::days{static_cast<long>(d)};
    panel.days.push_back(date);
    const int dow = static_cast<int>(std::chrono::weekday{date}.iso_encoding()) - 1;
    panel.dow.push_back(dow);
    const int regime = static_cast<int>((d / config.regime_period) % config.regimes.size());
    out.regime.push_back(regime);
    const auto& spec_r = config.regimes[static_cast<std::size_t>(regime)];
    const auto row = static_cast<Eigen::Index>(d);
    const double season = std::sin(2.0 * std::numbers::pi * static_cast<double>(d) / 365.0);

    wind_level = 0.7 * wind_level + 4.0 * normal(rng);
    const double cloud = uniform(rng);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double load = 45.0 + 10.0 * daily_shape(h) - (dow >= 5 ? 4.0 : 0.0) + 3.0 * season + 1.5 * normal(rng);
      panel.hourly.find(series::kLoad)->second(row, h) = load;
      if (config.profile == Profile::kEu) {
        const double wind = std::max(0.0, 10.0 + wind_level + normal(rng));
        const double sun = (h >= 5 && h <= 19) ? std::sin(std::numbers::pi * (h - 5) / 14.0) : 0.0;
        panel.hourly.find(series::kWind)->second(row, h) = wind;
        panel.hourly.find(series::kSolar)->second(row, h) = 12.0 * cloud * std::max(0.0, sun);
      } else {
        const double temp = 10.0 - 12.0 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(d) - 15.0) / 365.0) +
                            4.0 * std::sin(2.0 * std::numbers::pi * (h - 9) / 24.0) + 1.5 * normal(rng);
        panel.hourly.find(series::kTemperature)->second(row, h) = temp;
      }
    }
    for (auto name : cols.daily) {
      auto& z = fuel_state.find(name)->second;
      z = 0.9 * z + config.daily_volatility * normal(rng);
      panel.daily.find(name)->second[d] = spec_r.daily_levels.find(name)->second * (1.0 + z);
    }
  }
  if (config.profile == Profile::kEu) panel = derive_residual_load(panel);

  const auto identity = NormStats::identity();
  std::vector<double> x(spec.regressor_count());
  for (std::size_t d = 0; d < config.days; ++d) {
    const auto& r = config.regimes[static_cast<std::size_t>(out.regime[d])];
    const auto row = static_cast<Eigen::Index>(d);
    for (int h = 0; h < kHoursPerDay; ++h) {
      double price = 0.0;
      if (d < kMaxLag) {
        price = 40.0 + 15.0 * daily_shape(h);
      } else {
        fill_row(panel, d, h, spec, identity, x);
        for (std::size_t j = 0; j < x.size(); ++j) price += r.coefficients[j] * x[j];
      }
      panel.prices(row, h) = price + r.noise_sd * normal(rng);
    }
  }
  panel.check_invariants();
  return out;
}

SynthConfig two_regime_config(std::uint64_t seed, double noise_scale, Profile profile) {
  SynthConfig config;
  config.profile = profile;
  config.market_id = "synthetic_two_regime";
  config.days = 1200;
  config.regime_period = 90;
  config.seed = seed;
  RegimeSpec calm{"calm", calm_coefficients(profile), {}, 5.0 * noise_scale};
  RegimeSpec crisis{"crisis", crisis_coefficients(profile), {}, 15.0 * noise_scale};
  const std::map<std::string_view, std::pair<double, double>> levels{
      {series::kCoal, {10.0, 25.0}}, {series::kGas, {20.0, 80.0}}, {series::kEua, {25.0, 60.0}}};
  for (auto name : profile_columns(profile).daily) {
    const auto [calm_level, crisis_level] = levels.at(name);
    calm.daily_levels[std::string(name)] = calm_level;
    crisis.daily_levels[std::string(name)] = crisis_level;
  }
  config.regimes = {calm, crisis};
  return config;
}

SynthConfig single_regime_config(std::uint64_t seed, double noise_sd, std::size_t days, Profile profile) {
  SynthConfig config;
  config.profile = profile;
  config.market_id = "synthetic_single";
  config.days = days;
  config.regime_period = days;
  config.seed = seed;
  RegimeSpec only{"base", calm_coefficients(profile), {}, noise_sd};
  for (auto name : profile_columns(profile).daily) {
    only.daily_levels[std::string(name)] = name == series::kGas ? 20.0 : (name == series::kCoal ? 10.0 : 25.0);
  }
  config.regimes = {only};
  return config;
}

void write_regime_sidecar(const SyntheticPanel& synthetic, const SynthConfig& config, std::ostream& out) {
  out << "date,regime,name\n";
  for (std::size_t d = 0; d < synthetic.panel.n_days(); ++d) {
    const auto r = synthetic.regime[d];
    out << format_date(synthetic.panel.days[d]) << ',' << r << ',' << config.regimes[static_cast<std::size_t>(r)].name
        << '\n';
  }
}

}  // namespace epf
