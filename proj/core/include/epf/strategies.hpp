#pragma once

#include "epf/dataset.hpp"
#include "epf/design.hpp"
#include "epf/estimation.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace epf {

/// Shortest calibration window any method may use.
inline constexpr std::size_t kMinWindow = 56;

enum class Method { kWin, kAvg, kArhnnK, kArhnn, kWls };

struct MethodConfig {
  Method method = Method::kWin;
  std::size_t window = 728;
  std::vector<std::size_t> windows;
  std::size_t k = 182;
  std::vector<std::size_t> k_grid;

  static MethodConfig win(std::size_t window);
  static MethodConfig avg(std::vector<std::size_t> windows);
  /// {56, 84, 112, 714, 721, 728}
  static MethodConfig avg6();
  /// Every window from 56 to `longest`.
  static MethodConfig avg_all(std::size_t longest = 728);
  static MethodConfig arhnn_k(std::size_t k);
  static MethodConfig arhnn(std::vector<std::size_t> k_grid);
  static MethodConfig wls();

  std::string label() const;
  /// Days of history before the target that the method reads.
  std::size_t lookback(std::size_t calibration_len, std::size_t validation_len) const;
  void validate(const ModelSpec& spec, std::size_t calibration_len, std::size_t validation_len) const;
};

/// 28, 35, ..., up to the calibration length.
std::vector<std::size_t> default_k_grid(std::size_t calibration_len = 728);

/// Regressor rows, targets and similarity vectors of one delivery hour for
/// the target day and the `lookback` days before it, normalized with one
/// set of statistics. The target day's price is never stored. At the last
/// hour the duplicate P(d-1,24) regressor is zeroed (and so dropped from the
/// fit); similarity vectors keep both entries.
class HourDesign {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  HourDesign(const HourlyPanel& panel, const ModelSpec& spec, const NormStats& stats, std::size_t target, int hour,
             std::size_t lookback);

  /// Design from precomputed arrays covering days [first, first + rows).
  /// The last row is the target; `y` holds the targets of the other rows.
  static HourDesign from_parts(const ModelSpec& spec, std::size_t first, int hour, RowMatrix rows,
                               RowMatrix similarity, Vector y);

  std::size_t target() const { return target_; }
  int hour() const { return hour_; }
  std::size_t first_day() const { return first_; }
  const ModelSpec& spec() const { return spec_; }
  const NormStats& stats() const { return stats_; }

  auto row(std::size_t day) const { return rows_.row(offset(day)); }
  auto similarity(std::size_t day) const { return sims_.row(offset(day)); }
  auto similarity_block(DayRange days) const {
    return sims_.middleRows(offset(days.begin), static_cast<Eigen::Index>(days.size()));
  }
  /// Observed price; only defined for days before the target.
  double actual(std::size_t day) const;

  /// Regressors and targets of `days` (ascending) as a dense design.
  Design gather(std::span<const std::size_t> days) const;

 private:
  HourDesign() = default;
  Eigen::Index offset(std::size_t day) const;

  ModelSpec spec_;
  NormStats stats_;
  std::size_t target_ = 0;
  int hour_ = 0;
  std::size_t first_ = 0;
  RowMatrix rows_;
  RowMatrix sims_;
  Vector y_;
};

struct KSelectionRecord {
  std::size_t day = 0;
  int hour = 0;
  std::size_t k = 0;
  double abs_error = 0.0;
};

/// OLS on the `window` most recent days before the target.
double forecast_win(const HourDesign& design, std::size_t window);

/// Mean of forecast_win over a window set.
double forecast_avg(const HourDesign& design, std::span<const std::size_t> windows);

/// OLS on the k nearest days (by similarity) of the calibration window
/// preceding `day`, evaluated at `day`. `day` may be any day of the design
/// with a full calibration window behind it.
double forecast_knn_at(const HourDesign& design, std::size_t day, std::size_t k, std::size_t calibration_len);

double forecast_arhnn_k(const HourDesign& design, std::size_t k, std::size_t calibration_len);

/// For each day of the validation window, the grid value whose k-NN
/// forecast had the smallest absolute error (ties go to the smaller k).
std::vector<KSelectionRecord> validate_k(const HourDesign& design, std::span<const std::size_t> k_grid,
                                         std::size_t validation_len, std::size_t calibration_len);

/// Forecasts for each distinct selected k, averaged with each validation
/// day contributing one vote.
double forecast_arhnn(const HourDesign& design, std::span<const std::size_t> k_grid, std::size_t validation_len,
                      std::size_t calibration_len, std::vector<KSelectionRecord>* records = nullptr);

/// Inverse-distance weighted least squares over the calibration window.
double forecast_wls(const HourDesign& design, std::size_t calibration_len);

double forecast(const HourDesign& design, const MethodConfig& method, std::size_t calibration_len,
                std::size_t validation_len);

/// Binds a panel and window lengths; builds designs on demand. The panel
/// must outlive the forecaster.
class Forecaster {
 public:
  Forecaster(const HourlyPanel& panel, ModelSpec spec, std::size_t calibration_len, std::size_t validation_len);

  const HourlyPanel& panel() const { return panel_; }
  const ModelSpec& spec() const { return spec_; }
  std::size_t calibration_len() const { return calibration_len_; }
  std::size_t validation_len() const { return validation_len_; }

  /// Normalization fit on the training days [d - calib - valid, d).
  NormStats stats_for(std::size_t d) const;
  HourDesign design(std::size_t d, int hour, std::size_t lookback) const;
  HourDesign design(std::size_t d, int hour, std::size_t lookback, const NormStats& stats) const;

  double win(std::size_t d, int hour, std::size_t window) const;
  double avg(std::size_t d, int hour, std::span<const std::size_t> windows) const;
  double arhnn_k(std::size_t d, int hour, std::size_t k) const;
  std::vector<KSelectionRecord> validate_k(std::size_t d, int hour, std::span<const std::size_t> k_grid) const;
  double arhnn(std::size_t d, int hour, std::span<const std::size_t> k_grid) const;
  double wls(std::size_t d, int hour) const;
  double forecast(const MethodConfig& method, std::size_t d, int hour) const;

 private:
  void check_history(std::size_t d) const;

  const HourlyPanel& panel_;
  ModelSpec spec_;
  std::size_t calibration_len_;
  std::size_t validation_len_;
};

}  // namespace epf
