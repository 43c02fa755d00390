#include "epf/strategies.hpp"

#include "epf/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace epf {

namespace {

constexpr FitOptions kForecastFit{.drop_empty_columns = true};
// Above this many windows, Avg reuses one incremental factorization.
constexpr std::size_t kDirectAvgLimit = 8;

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> values) {
  std::vector<std::size_t> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> day_sequence(std::size_t first, std::size_t count) {
  std::vector<std::size_t> days(count);
  for (std::size_t i = 0; i < count; ++i) days[i] = first + i;
  return days;
}

double fit_and_predict(const HourDesign& design, std::span<const std::size_t> days, std::size_t at) {
  const auto data = design.gather(days);
  const auto coef = ols_fit(data.X, data.y, kForecastFit);
  return coef.predict(design.row(at).transpose());
}

void require_calibration(const HourDesign& design, std::size_t day, std::size_t calibration_len) {
  if (day < design.first_day() + calibration_len || day > design.target()) {
    throw HistoryError("day " + std::to_string(day) + " lacks a " + std::to_string(calibration_len) +
                       "-day calibration window in the design");
  }
}

}  // namespace

MethodConfig MethodConfig::win(std::size_t window) {
  MethodConfig m;
  m.method = Method::kWin;
  m.window = window;
  return m;
}

MethodConfig MethodConfig::avg(std::vector<std::size_t> windows) {
  MethodConfig m;
  m.method = Method::kAvg;
  m.windows = std::move(windows);
  return m;
}

MethodConfig MethodConfig::avg6() { return avg({56, 84, 112, 714, 721, 728}); }

MethodConfig MethodConfig::avg_all(std::size_t longest) {
  std::vector<std::size_t> windows;
  for (std::size_t w = kMinWindow; w <= longest; ++w) windows.push_back(w);
  return avg(std::move(windows));
}

MethodConfig MethodConfig::arhnn_k(std::size_t k) {
  MethodConfig m;
  m.method = Method::kArhnnK;
  m.k = k;
  return m;
}

MethodConfig MethodConfig::arhnn(std::vector<std::size_t> k_grid) {
  MethodConfig m;
  m.method = Method::kArhnn;
  m.k_grid = std::move(k_grid);
  return m;
}

MethodConfig MethodConfig::wls() {
  MethodConfig m;
  m.method = Method::kWls;
  return m;
}

std::string MethodConfig::label() const {
  switch (method) {
    case Method::kWin:
      return "Win(" + std::to_string(window) + ")";
    case Method::kAvg: {
      const auto sorted = sorted_unique(windows);
      if (sorted == sorted_unique(avg6().windows)) return "Avg(6)";
      if (sorted == avg_all(sorted.empty() ? 0 : sorted.back()).windows && sorted.back() == 728) return "Avg(All)";
      std::ostringstream os;
      os << "Avg(";
      for (std::size_t i = 0; i < sorted.size(); ++i) os << (i ? "/" : "") << sorted[i];
      os << ")";
      return os.str();
    }
    case Method::kArhnnK:
      return "ARHNN(" + std::to_string(k) + ")";
    case Method::kArhnn:
      return "ARHNN";
    case Method::kWls:
      return "WLS";
  }
  return "?";
}

std::size_t MethodConfig::lookback(std::size_t calibration_len, std::size_t validation_len) const {
  switch (method) {
    case Method::kWin:
      return window;
    case Method::kAvg:
      return windows.empty() ? 0 : *std::max_element(windows.begin(), windows.end());
    case Method::kArhnn:
      return calibration_len + validation_len;
    case Method::kArhnnK:
    case Method::kWls:
      return calibration_len;
  }
  return calibration_len;
}

void MethodConfig::validate(const ModelSpec& spec, std::size_t calibration_len, std::size_t validation_len) const {
  const auto min_k = spec.regressor_count() + 4;
  auto check_window = [&](std::size_t w) {
    if (w < kMinWindow || w > calibration_len) {
      throw ConfigError(label() + ": window " + std::to_string(w) + " outside [" + std::to_string(kMinWindow) + ", " +
                        std::to_string(calibration_len) + "]");
    }
  };
  auto check_k = [&](std::size_t k_value) {
    if (k_value < min_k || k_value > calibration_len) {
      throw ConfigError(label() + ": k = " + std::to_string(k_value) + " outside [" + std::to_string(min_k) + ", " +
                        std::to_string(calibration_len) + "]");
    }
  };
  switch (method) {
    case Method::kWin:
      check_window(window);
      break;
    case Method::kAvg:
      if (windows.empty()) throw ConfigError("Avg needs at least one window");
      if (sorted_unique(windows).size() != windows.size()) throw ConfigError(label() + ": duplicate windows");
      for (auto w : windows) check_window(w);
      break;
    case Method::kArhnnK:
      check_k(k);
      break;
    case Method::kArhnn:
      if (k_grid.empty()) throw ConfigError("ARHNN needs a non-empty k grid");
      for (auto k_value : k_grid) check_k(k_value);
      if (validation_len == 0) throw ConfigError("ARHNN needs a validation window");
      break;
    case Method::kWls:
      if (calibration_len < min_k) throw ConfigError("WLS: calibration window shorter than the regressor count");
      break;
  }
}

std::vector<std::size_t> default_k_grid(std::size_t calibration_len) {
  std::vector<std::size_t> grid;
  for (std::size_t k = 28; k <= calibration_len; k += 7) grid.push_back(k);
  return grid;
}

HourDesign::HourDesign(const HourlyPanel& panel, const ModelSpec& spec, const NormStats& stats, std::size_t target,
                       int hour, std::size_t lookback)
    : spec_(spec), stats_(stats), target_(target), hour_(hour) {
  if (target < lookback + kMaxLag) {
    throw HistoryError("day " + std::to_string(target) + " has fewer than " + std::to_string(lookback + kMaxLag) +
                       " days of history");
  }
  if (target >= panel.n_days()) throw HistoryError("day " + std::to_string(target) + " is beyond the panel");
  first_ = target - lookback;
  const auto n = static_cast<Eigen::Index>(lookback + 1);
  const auto p = static_cast<Eigen::Index>(spec.regressor_count());
  const auto sim_cols = spec.similarity_columns();
  rows_.resize(n, p);
  sims_.resize(n, static_cast<Eigen::Index>(sim_cols.size()));
  y_.resize(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto day = first_ + static_cast<std::size_t>(i);
    fill_row(panel, day, hour, spec, stats, std::span<double>(rows_.row(i).data(), static_cast<std::size_t>(p)));
    for (std::size_t j = 0; j < sim_cols.size(); ++j) {
      sims_(i, static_cast<Eigen::Index>(j)) = rows_(i, static_cast<Eigen::Index>(sim_cols[j]));
    }
    if (day < target) y_(i) = panel.prices(static_cast<Eigen::Index>(day), hour);
  }
  // At the last hour P(d-1,h) and P(d-1,24) coincide; keep one copy in the fit.
  if (hour == kHoursPerDay - 1) rows_.col(static_cast<Eigen::Index>(layout::kLastHour)).setZero();
}

HourDesign HourDesign::from_parts(const ModelSpec& spec, std::size_t first, int hour, RowMatrix rows,
                                  RowMatrix similarity, Vector y) {
  if (rows.rows() < 1 || similarity.rows() != rows.rows() || y.size() != rows.rows() - 1) {
    throw ConfigError("design parts disagree in row count");
  }
  if (rows.cols() != static_cast<Eigen::Index>(spec.regressor_count()) ||
      similarity.cols() != static_cast<Eigen::Index>(spec.similarity_dim())) {
    throw ConfigError("design parts do not match the model layout");
  }
  HourDesign design;
  design.spec_ = spec;
  design.stats_ = NormStats::identity();
  design.first_ = first;
  design.hour_ = hour;
  design.target_ = first + static_cast<std::size_t>(rows.rows() - 1);
  design.rows_ = std::move(rows);
  design.sims_ = std::move(similarity);
  design.y_ = std::move(y);
  return design;
}

Eigen::Index HourDesign::offset(std::size_t day) const {
  if (day < first_ || day > target_) {
    throw HistoryError("day " + std::to_string(day) + " outside the design range [" + std::to_string(first_) + ", " +
                       std::to_string(target_) + "]");
  }
  return static_cast<Eigen::Index>(day - first_);
}

double HourDesign::actual(std::size_t day) const {
  if (day >= target_) throw HistoryError("the target day's price is not available to a forecast");
  return y_(offset(day));
}

Design HourDesign::gather(std::span<const std::size_t> days) const {
  Design out;
  out.X.resize(static_cast<Eigen::Index>(days.size()), rows_.cols());
  out.y.resize(static_cast<Eigen::Index>(days.size()));
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.X.row(r) = row(days[i]);
    out.y(r) = actual(days[i]);
  }
  return out;
}

double forecast_win(const HourDesign& design, std::size_t window) {
  require_calibration(design, design.target(), window);
  const auto days = day_sequence(design.target() - window, window);
  return fit_and_predict(design, days, design.target());
}

double forecast_avg(const HourDesign& design, std::span<const std::size_t> windows) {
  const auto sorted = sorted_unique(windows);
  if (sorted.empty()) throw ConfigError("Avg needs at least one window");
  require_calibration(design, design.target(), sorted.back());
  double sum = 0.0;
  if (sorted.size() <= kDirectAvgLimit) {
    for (auto w : sorted) sum += forecast_win(design, w);
    return sum / static_cast<double>(sorted.size());
  }
  // Windows are nested suffixes of the history: grow one factorization
  // backwards in time and read off each window's forecast on the way.
  const auto target = design.target();
  const auto x_target = design.row(target).transpose();
  IncrementalLeastSquares ls(static_cast<Eigen::Index>(design.spec().regressor_count()));
  std::size_t next = 0;
  for (std::size_t n = 1; n <= sorted.back(); ++n) {
    const auto day = target - n;
    ls.add_row(design.row(day).transpose(), design.actual(day));
    if (n == sorted[next]) {
      sum += ls.solve().dot(x_target);
      ++next;
    }
  }
  return sum / static_cast<double>(sorted.size());
}

double forecast_knn_at(const HourDesign& design, std::size_t day, std::size_t k, std::size_t calibration_len) {
  require_calibration(design, day, calibration_len);
  const DayRange candidates{day - calibration_len, day};
  const auto dist = distances(design.similarity(day).transpose(), design.similarity_block(candidates));
  auto chosen = knn_select(dist, k);
  for (auto& idx : chosen) idx += candidates.begin;
  return fit_and_predict(design, chosen, day);
}

double forecast_arhnn_k(const HourDesign& design, std::size_t k, std::size_t calibration_len) {
  return forecast_knn_at(design, design.target(), k, calibration_len);
}

std::vector<KSelectionRecord> validate_k(const HourDesign& design, std::span<const std::size_t> k_grid,
                                         std::size_t validation_len, std::size_t calibration_len) {
  const auto grid = sorted_unique(k_grid);
  if (grid.empty()) throw ConfigError("k grid is empty");
  if (grid.back() > calibration_len) throw ConfigError("k grid exceeds the calibration window");
  const auto target = design.target();
  if (validation_len == 0 || target < validation_len) throw ConfigError("validation window is empty");
  require_calibration(design, target - validation_len, calibration_len);

  const auto p = static_cast<Eigen::Index>(design.spec().regressor_count());
  std::vector<KSelectionRecord> records;
  records.reserve(validation_len);
  for (std::size_t t = target - validation_len; t < target; ++t) {
    const DayRange candidates{t - calibration_len, t};
    const auto dist = distances(design.similarity(t).transpose(), design.similarity_block(candidates));
    const auto order = rank_by_distance(dist);
    const Vector x_t = design.row(t).transpose();
    const double y_t = design.actual(t);

    // The k-NN samples for increasing k are prefixes of one ordering, so a
    // single growing factorization yields every grid forecast.
    IncrementalLeastSquares ls(p);
    KSelectionRecord best{t, design.hour(), grid.front(), 0.0};
    bool have_best = false;
    std::size_t next = 0;
    for (std::size_t n = 0; n < grid.back(); ++n) {
      const auto day = candidates.begin + order[n];
      ls.add_row(design.row(day).transpose(), design.actual(day));
      if (n + 1 != grid[next]) continue;
      const double err = std::abs(ls.solve().dot(x_t) - y_t);
      if (!have_best || err < best.abs_error) {
        best.k = grid[next];
        best.abs_error = err;
        have_best = true;
      }
      ++next;
    }
    records.push_back(best);
  }
  return records;
}

double forecast_arhnn(const HourDesign& design, std::span<const std::size_t> k_grid, std::size_t validation_len,
                      std::size_t calibration_len, std::vector<KSelectionRecord>* records) {
  auto selected = validate_k(design, k_grid, validation_len, calibration_len);
  std::map<std::size_t, std::size_t> votes;
  for (const auto& r : selected) ++votes[r.k];
  // Vote shares rather than a sum divided at the end, so that a unanimous
  // vote returns the member forecast bit for bit.
  double mean = 0.0;
  for (const auto& [k, count] : votes) {
    const double share = static_cast<double>(count) / static_cast<double>(validation_len);
    mean += share * forecast_arhnn_k(design, k, calibration_len);
  }
  if (records) *records = std::move(selected);
  return mean;
}

double forecast_wls(const HourDesign& design, std::size_t calibration_len) {
  const auto target = design.target();
  require_calibration(design, target, calibration_len);
  const DayRange candidates{target - calibration_len, target};
  const auto dist = distances(design.similarity(target).transpose(), design.similarity_block(candidates));
  const auto weights = inv_dist_weights(dist);
  const auto days = day_sequence(candidates.begin, calibration_len);
  const auto data = design.gather(days);
  const auto coef = wls_fit(data.X, data.y, weights, kForecastFit);
  return coef.predict(design.row(target).transpose());
}

double forecast(const HourDesign& design, const MethodConfig& method, std::size_t calibration_len,
                std::size_t validation_len) {
  switch (method.method) {
    case Method::kWin:
      return forecast_win(design, method.window);
    case Method::kAvg:
      return forecast_avg(design, method.windows);
    case Method::kArhnnK:
      return forecast_arhnn_k(design, method.k, calibration_len);
    case Method::kArhnn:
      return forecast_arhnn(design, method.k_grid, validation_len, calibration_len);
    case Method::kWls:
      return forecast_wls(design, calibration_len);
  }
  throw ConfigError("unknown method");
}

Forecaster::Forecaster(const HourlyPanel& panel, ModelSpec spec, std::size_t calibration_len,
                       std::size_t validation_len)
    : panel_(panel), spec_(std::move(spec)), calibration_len_(calibration_len), validation_len_(validation_len) {
  if (calibration_len_ == 0) throw ConfigError("calibration length must be positive");
}

void Forecaster::check_history(std::size_t d) const {
  const auto required = calibration_len_ + validation_len_ + kMaxLag;
  if (d < required) {
    throw HistoryError("day " + std::to_string(d) + " has " + std::to_string(d) + " days of history, " +
                       std::to_string(required) + " required");
  }
  if (d >= panel_.n_days()) throw HistoryError("day " + std::to_string(d) + " is beyond the panel");
}

NormStats Forecaster::stats_for(std::size_t d) const {
  check_history(d);
  return fit_norm_stats(panel_, DayRange{d - calibration_len_ - validation_len_, d}, ConstantSeries::kCenterOnly);
}

HourDesign Forecaster::design(std::size_t d, int hour, std::size_t lookback) const {
  return design(d, hour, lookback, stats_for(d));
}

HourDesign Forecaster::design(std::size_t d, int hour, std::size_t lookback, const NormStats& stats) const {
  check_history(d);
  return HourDesign(panel_, spec_, stats, d, hour, lookback);
}

double Forecaster::win(std::size_t d, int hour, std::size_t window) const {
  return forecast_win(design(d, hour, window), window);
}

double Forecaster::avg(std::size_t d, int hour, std::span<const std::size_t> windows) const {
  if (windows.empty()) throw ConfigError("Avg needs at least one window");
  return forecast_avg(design(d, hour, *std::max_element(windows.begin(), windows.end())), windows);
}

double Forecaster::arhnn_k(std::size_t d, int hour, std::size_t k) const {
  return forecast_arhnn_k(design(d, hour, calibration_len_), k, calibration_len_);
}

std::vector<KSelectionRecord> Forecaster::validate_k(std::size_t d, int hour,
                                                     std::span<const std::size_t> k_grid) const {
  return epf::validate_k(design(d, hour, calibration_len_ + validation_len_), k_grid, validation_len_,
                         calibration_len_);
}

double Forecaster::arhnn(std::size_t d, int hour, std::span<const std::size_t> k_grid) const {
  return forecast_arhnn(design(d, hour, calibration_len_ + validation_len_), k_grid, validation_len_,
                        calibration_len_);
}

double Forecaster::wls(std::size_t d, int hour) const {
  return forecast_wls(design(d, hour, calibration_len_), calibration_len_);
}

double Forecaster::forecast(const MethodConfig& method, std::size_t d, int hour) const {
  return epf::forecast(design(d, hour, method.lookback(calibration_len_, validation_len_)), method, calibration_len_,
                       validation_len_);
}

}  // namespace epf
