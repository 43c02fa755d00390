#pragma once

#include "epf/dataset.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epf {

/// One exogenous regressor and whether it varies by hour.
struct ExogTerm {
  std::string_view name;
  bool hourly = false;
};

/// Regressor layout of the per-hour ARX model.
///
/// Columns, in order: 7 day-of-week dummies (Monday first, no separate
/// intercept), P(d-1,h), P(d-2,h), P(d-7,h), P(d-1,24), min P(d-1,.),
/// max P(d-1,.), then the profile's exogenous block. The similarity vector
/// used for nearest-neighbour search is P(d-1,h), P(d-1,24), min, max and
/// the exogenous block.
struct ModelSpec {
  Profile profile = Profile::kEu;
  std::size_t dummy_count = 7;
  std::vector<ExogTerm> exogenous;

  static ModelSpec for_profile(Profile profile);

  std::size_t regressor_count() const { return dummy_count + 6 + exogenous.size(); }
  std::size_t similarity_dim() const { return 4 + exogenous.size(); }
  std::vector<std::string> column_names() const;
  /// Row positions that make up the similarity vector.
  std::vector<std::size_t> similarity_columns() const;
};

namespace layout {
inline constexpr std::size_t kLag1 = 7;
inline constexpr std::size_t kLag2 = 8;
inline constexpr std::size_t kLag7 = 9;
inline constexpr std::size_t kLastHour = 10;
inline constexpr std::size_t kMin = 11;
inline constexpr std::size_t kMax = 12;
inline constexpr std::size_t kExog = 13;
}  // namespace layout

struct RegressorRow {
  Eigen::VectorXd x;
  std::optional<double> target;
};

/// Writes the regressors of (d, hour) into `out` (size regressor_count()).
/// `hour` is 0-based. Prices enter only up to day d-1; exogenous forecasts
/// are taken for day d and daily series as published before day d.
void fill_row(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec, const NormStats& stats,
              std::span<double> out);

RegressorRow build_row(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec,
                       const NormStats& stats);

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

/// Stacks rows for `days` in the given order; y is on the original price scale.
Design build_design(const HourlyPanel& panel, std::span<const std::size_t> days, int hour, const ModelSpec& spec,
                    const NormStats& stats);

Eigen::VectorXd build_similarity(const HourlyPanel& panel, std::size_t d, int hour, const ModelSpec& spec,
                                 const NormStats& stats);

}  // namespace epf
