#pragma once

#include "epf/dataset.hpp"
#include "epf/design.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace epf {

/// One data-generating regime: ARX coefficients on the raw (unnormalized)
/// regressor layout of ModelSpec, plus the levels of the daily fuel series.
struct RegimeSpec {
  std::string name;
  std::vector<double> coefficients;
  std::map<std::string, double, std::less<>> daily_levels;
  double noise_sd = 0.0;
};

struct SynthConfig {
  Profile profile = Profile::kEu;
  std::string market_id = "synthetic";
  Date start = Date{std::chrono::year{2017} / 1 / 1};
  std::size_t days = 1200;
  /// Regimes switch every `regime_period` days, cycling through `regimes`.
  std::size_t regime_period = 90;
  std::vector<RegimeSpec> regimes;
  /// Relative day-to-day volatility of the daily fuel series.
  double daily_volatility = 0.02;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticPanel {
  HourlyPanel panel;
  std::vector<int> regime;
};

SyntheticPanel generate_panel(const SynthConfig& config);

/// A calm and a high-price regime alternating every 90 days over 1200 days.
SynthConfig two_regime_config(std::uint64_t seed = 42, double noise_scale = 1.0, Profile profile = Profile::kEu);
/// One regime; `noise_sd` = 0 yields prices that follow the ARX equation exactly.
SynthConfig single_regime_config(std::uint64_t seed, double noise_sd, std::size_t days = 900,
                                 Profile profile = Profile::kEu);

/// Sidecar listing `date,regime,name` for each generated day.
void write_regime_sidecar(const SyntheticPanel& synthetic, const SynthConfig& config, std::ostream& out);

}  // namespace epf
