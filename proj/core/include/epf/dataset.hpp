#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epf {

inline constexpr int kHoursPerDay = 24;
/// Deepest autoregressive lag in days.
inline constexpr std::size_t kMaxLag = 7;

using Date = std::chrono::sys_days;
using HourMatrix = Eigen::Matrix<double, Eigen::Dynamic, kHoursPerDay, Eigen::RowMajor>;

/// Market profile: decides which exogenous series a panel carries.
enum class Profile { kEu, kIsone };

Profile parse_profile(std::string_view text);
std::string_view to_string(Profile profile);

Date parse_date(std::string_view text);
std::string format_date(Date date);

namespace series {
inline constexpr std::string_view kPrice = "price";
inline constexpr std::string_view kLoad = "load_fc";
inline constexpr std::string_view kWind = "wind_fc";
inline constexpr std::string_view kSolar = "solar_fc";
inline constexpr std::string_view kResidualLoad = "residual_load";
inline constexpr std::string_view kTemperature = "temp_fc";
inline constexpr std::string_view kCoal = "coal";
inline constexpr std::string_view kGas = "gas";
inline constexpr std::string_view kEua = "eua";

/// Short market symbol used in messages, e.g. "G" for gas.
std::string_view symbol(std::string_view name);
}  // namespace series

/// Columns of the panel CSV after `date,hour,price`, in schema order.
struct ProfileColumns {
  std::vector<std::string_view> order;
  std::vector<std::string_view> hourly;
  std::vector<std::string_view> daily;
};
const ProfileColumns& profile_columns(Profile profile);

/// Series that enter the regression for a profile and therefore need
/// normalization statistics.
std::span<const std::string_view> regressor_series(Profile profile);

enum RepairFlag : std::uint8_t {
  kRepairNone = 0,
  kRepairMissingHour = 1,    // 23-hour day, one slot interpolated
  kRepairDuplicateHour = 2,  // 25-hour day, duplicated slot averaged
  kRepairForwardFill = 4,    // at least one daily series forward-filled
};

/// Aligned day x 24-hour market panel. Immutable once built by the loader.
struct HourlyPanel {
  std::string market_id;
  Profile profile = Profile::kEu;
  std::vector<Date> days;
  HourMatrix prices;
  std::map<std::string, HourMatrix, std::less<>> hourly;
  std::map<std::string, std::vector<double>, std::less<>> daily;
  std::vector<int> dow;  // 0 = Monday ... 6 = Sunday
  std::vector<std::uint8_t> repairs;

  std::size_t n_days() const { return days.size(); }
  bool has_hourly(std::string_view name) const;
  bool has_daily(std::string_view name) const;
  const HourMatrix& hourly_series(std::string_view name) const;
  const std::vector<double>& daily_series(std::string_view name) const;

  /// Value of a daily series that is known at the auction for day `d`:
  /// the last value published strictly before `d`.
  double daily_known_before(std::string_view name, std::size_t d) const;

  int year(std::size_t d) const;
  std::optional<std::size_t> index_of(Date date) const;

  /// Days [first, first + count) as a new panel.
  HourlyPanel slice(std::size_t first, std::size_t count) const;

  /// Throws DataError when any structural invariant is violated.
  void check_invariants() const;
};

HourlyPanel parse_panel_csv(std::istream& in, Profile profile, std::string market_id = "market");
HourlyPanel load_panel(const std::filesystem::path& path, Profile profile);

/// Writes the panel back in the loader's schema, 24 rows per day,
/// shortest round-trip decimal representation.
void write_panel_csv(const HourlyPanel& panel, std::ostream& out);
void save_panel(const HourlyPanel& panel, const std::filesystem::path& path);

/// Adds `residual_load` = load - (wind + solar) cell by cell.
HourlyPanel derive_residual_load(const HourlyPanel& panel);

/// Half-open range of day indices.
struct DayRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(std::size_t d) const { return d >= begin && d < end; }
};

struct SeriesStats {
  double mean = 0.0;
  double sd = 1.0;
  bool constant = false;
};

enum class ConstantSeries {
  kReject,      // constant series is an error
  kCenterOnly,  // constant series maps to exactly zero
};

/// Per-series z-score parameters.
class NormStats {
 public:
  static NormStats identity();

  void set(std::string name, SeriesStats stats);
  bool is_identity() const { return identity_; }
  const SeriesStats& at(std::string_view name) const;
  double normalize(std::string_view name, double value) const;
  double denormalize(std::string_view name, double value) const;
  const std::map<std::string, SeriesStats, std::less<>>& entries() const { return stats_; }

 private:
  std::map<std::string, SeriesStats, std::less<>> stats_;
  bool identity_ = false;
};

NormStats fit_norm_stats(const HourlyPanel& panel, DayRange range,
                         std::span<const std::string_view> names,
                         ConstantSeries policy = ConstantSeries::kReject);
NormStats fit_norm_stats(const HourlyPanel& panel, DayRange range,
                         ConstantSeries policy = ConstantSeries::kReject);

struct SplitConfig {
  std::size_t calibration_len = 728;
  std::size_t validation_len = 728;
  std::optional<Date> test_first;
  std::optional<Date> test_last;
};

/// Index windows that belong to one target day.
struct DayWindows {
  std::size_t target = 0;
  DayRange calibration;
  DayRange validation;
  /// All training days touched for this target; normalization is fit here.
  DayRange training;
};

class SplitGeometry {
 public:
  SplitGeometry() = default;
  SplitGeometry(std::size_t calibration_len, std::size_t validation_len, DayRange test);

  std::size_t calibration_len() const { return calibration_len_; }
  std::size_t validation_len() const { return validation_len_; }
  DayRange test() const { return test_; }
  std::size_t test_days() const { return test_.size(); }
  std::size_t required_history() const { return calibration_len_ + validation_len_ + kMaxLag; }
  DayWindows windows(std::size_t d) const;

 private:
  std::size_t calibration_len_ = 0;
  std::size_t validation_len_ = 0;
  DayRange test_;
};

SplitGeometry make_split(const HourlyPanel& panel, const SplitConfig& config);

}  // namespace epf
