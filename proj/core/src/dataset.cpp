#include "epf/dataset.hpp"

#include "epf/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace epf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct RawRow {
  int hour = 0;
  std::size_t line = 0;
  double price = 0.0;
  std::vector<double> hourly;
  std::vector<double> daily;
};

[[noreturn]] void fail_cell(std::size_t line, std::string_view column, std::string_view text) {
  std::ostringstream msg;
  msg << "row " << line << ", column '" << column << "': cannot parse value '" << text << "'";
  throw DataError(msg.str());
}

// Collapses the rows of one calendar day into 24 slots.
std::uint8_t repair_day(Date date, std::vector<RawRow>& rows, std::array<const RawRow*, kHoursPerDay>& slots,
                        std::vector<RawRow>& synthesized) {
  std::array<std::vector<const RawRow*>, kHoursPerDay> by_hour;
  for (const auto& row : rows) by_hour[static_cast<std::size_t>(row.hour - 1)].push_back(&row);

  std::vector<int> missing;
  std::vector<int> duplicated;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const auto count = by_hour[static_cast<std::size_t>(h)].size();
    if (count == 0) missing.push_back(h);
    if (count == 2) duplicated.push_back(h);
    if (count > 2) {
      throw DataError("date " + format_date(date) + ": hour " + std::to_string(h + 1) + " appears " +
                      std::to_string(count) + " times");
    }
  }
  if (missing.size() + duplicated.size() > 1) {
    throw DataError("date " + format_date(date) + " has " + std::to_string(rows.size()) +
                    " hourly rows; only a single DST gap or duplicate can be repaired");
  }

  std::uint8_t flag = kRepairNone;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const auto& entries = by_hour[static_cast<std::size_t>(h)];
    if (entries.size() == 1) slots[static_cast<std::size_t>(h)] = entries.front();
  }

  auto blend = [&](const RawRow& a, const RawRow& b, int hour) {
    RawRow out = a;
    out.hour = hour;
    out.price = 0.5 * (a.price + b.price);
    for (std::size_t i = 0; i < out.hourly.size(); ++i) out.hourly[i] = 0.5 * (a.hourly[i] + b.hourly[i]);
    return out;
  };

  if (!duplicated.empty()) {
    const int h = duplicated.front();
    const auto& entries = by_hour[static_cast<std::size_t>(h)];
    synthesized.push_back(blend(*entries[0], *entries[1], h + 1));
    flag = kRepairDuplicateHour;
  }
  if (!missing.empty()) {
    const int h = missing.front();
    const RawRow* before = h > 0 ? slots[static_cast<std::size_t>(h - 1)] : nullptr;
    const RawRow* after = h + 1 < kHoursPerDay ? slots[static_cast<std::size_t>(h + 1)] : nullptr;
    if (before && after) {
      synthesized.push_back(blend(*before, *after, h + 1));
    } else {
      RawRow copy = before ? *before : *after;
      copy.hour = h + 1;
      synthesized.push_back(std::move(copy));
    }
    flag = kRepairMissingHour;
  }
  if (!synthesized.empty()) {
    const auto& row = synthesized.back();
    slots[static_cast<std::size_t>(row.hour - 1)] = &row;
  }
  return flag;
}

}  // namespace

Profile parse_profile(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "eu" || lower == "eu-style" || lower == "epex" || lower == "omie") return Profile::kEu;
  if (lower == "isone" || lower == "isone-style" || lower == "iso-ne") return Profile::kIsone;
  throw ConfigError("unknown market profile '" + std::string(text) + "' (expected eu or isone)");
}

std::string_view to_string(Profile profile) { return profile == Profile::kEu ? "eu" : "isone"; }

Date parse_date(std::string_view text) {
  text = trim(text);
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    if (pos + len > text.size()) return std::nullopt;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
    return v;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("invalid ISO-8601 date '" + std::string(text) + "'");
  }
  const auto y = number(0, 4);
  const auto m = number(5, 2);
  const auto d = number(8, 2);
  if (!y || !m || !d) throw DataError("invalid ISO-8601 date '" + std::string(text) + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string_view series::symbol(std::string_view name) {
  if (name == kPrice) return "P";
  if (name == kLoad) return "L";
  if (name == kWind) return "W";
  if (name == kSolar) return "S";
  if (name == kResidualLoad) return "RL";
  if (name == kTemperature) return "T";
  if (name == kCoal) return "C";
  if (name == kGas) return "G";
  if (name == kEua) return "EUA";
  return name;
}

const ProfileColumns& profile_columns(Profile profile) {
  static const ProfileColumns eu{
      {series::kLoad, series::kWind, series::kSolar, series::kCoal, series::kGas, series::kEua},
      {series::kLoad, series::kWind, series::kSolar},
      {series::kCoal, series::kGas, series::kEua}};
  static const ProfileColumns isone{{series::kLoad, series::kGas, series::kTemperature},
                                    {series::kLoad, series::kTemperature},
                                    {series::kGas}};
  return profile == Profile::kEu ? eu : isone;
}

std::span<const std::string_view> regressor_series(Profile profile) {
  static constexpr std::array<std::string_view, 5> eu{series::kPrice, series::kResidualLoad, series::kCoal,
                                                      series::kGas, series::kEua};
  static constexpr std::array<std::string_view, 4> isone{series::kPrice, series::kLoad, series::kGas,
                                                         series::kTemperature};
  if (profile == Profile::kEu) return eu;
  return isone;
}

bool HourlyPanel::has_hourly(std::string_view name) const { return hourly.find(name) != hourly.end(); }
bool HourlyPanel::has_daily(std::string_view name) const { return daily.find(name) != daily.end(); }

const HourMatrix& HourlyPanel::hourly_series(std::string_view name) const {
  if (name == series::kPrice) return prices;
  const auto it = hourly.find(name);
  if (it == hourly.end()) {
    throw DataError("panel has no hourly series '" + std::string(name) + "' (" + std::string(series::symbol(name)) +
                    ")");
  }
  return it->second;
}

const std::vector<double>& HourlyPanel::daily_series(std::string_view name) const {
  const auto it = daily.find(name);
  if (it == daily.end()) {
    throw DataError("panel has no daily series '" + std::string(name) + "' (" + std::string(series::symbol(name)) +
                    ")");
  }
  return it->second;
}

double HourlyPanel::daily_known_before(std::string_view name, std::size_t d) const {
  if (d == 0) throw HistoryError("no daily value published before the first panel day");
  return daily_series(name)[d - 1];
}

int HourlyPanel::year(std::size_t d) const {
  return static_cast<int>(std::chrono::year_month_day{days.at(d)}.year());
}

std::optional<std::size_t> HourlyPanel::index_of(Date date) const {
  if (days.empty()) return std::nullopt;
  const auto offset = (date - days.front()).count();
  if (offset < 0 || static_cast<std::size_t>(offset) >= days.size()) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

HourlyPanel HourlyPanel::slice(std::size_t first, std::size_t count) const {
  if (first + count > n_days()) throw DataError("panel slice out of range");
  HourlyPanel out;
  out.market_id = market_id;
  out.profile = profile;
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(first + count);
  out.days.assign(days.begin() + b, days.begin() + e);
  out.dow.assign(dow.begin() + b, dow.begin() + e);
  out.repairs.assign(repairs.begin() + b, repairs.begin() + e);
  out.prices = prices.middleRows(b, e - b);
  for (const auto& [name, m] : hourly) out.hourly.emplace(name, m.middleRows(b, e - b));
  for (const auto& [name, v] : daily) out.daily.emplace(name, std::vector<double>(v.begin() + b, v.begin() + e));
  return out;
}

void HourlyPanel::check_invariants() const {
  const auto n = n_days();
  if (static_cast<std::size_t>(prices.rows()) != n || dow.size() != n || repairs.size() != n) {
    throw DataError("panel '" + market_id + "': inconsistent series lengths");
  }
  for (std::size_t d = 1; d < n; ++d) {
    if (days[d] - days[d - 1] != std::chrono::days{1}) {
      throw DataError("panel '" + market_id + "': missing date " + format_date(days[d - 1] + std::chrono::days{1}));
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (dow[d] != static_cast<int>(std::chrono::weekday{days[d]}.iso_encoding()) - 1) {
      throw DataError("panel '" + market_id + "': day-of-week mismatch on " + format_date(days[d]));
    }
  }
  const auto& cols = profile_columns(profile);
  for (auto name : cols.hourly) {
    if (static_cast<std::size_t>(hourly_series(name).rows()) != n) throw DataError("bad length for " + std::string(name));
  }
  for (auto name : cols.daily) {
    if (daily_series(name).size() != n) throw DataError("bad length for " + std::string(name));
  }
  if (!prices.allFinite()) throw DataError("panel '" + market_id + "': non-finite price");
  for (const auto& [name, m] : hourly) {
    if (!m.allFinite()) throw DataError("panel '" + market_id + "': non-finite value in " + name);
  }
  for (const auto& [name, v] : daily) {
    for (double x : v) {
      if (!std::isfinite(x)) throw DataError("panel '" + market_id + "': non-finite value in " + name);
    }
  }
}

HourlyPanel parse_panel_csv(std::istream& in, Profile profile, std::string market_id) {
  const auto& cols = profile_columns(profile);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty panel file");
  const auto header = split_csv(line);

  auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto require_column = [&](std::string_view name) {
    const auto idx = find_column(name);
    if (!idx) {
      throw DataError("missing column '" + std::string(name) + "' (" + std::string(series::symbol(name)) +
                      ") required by the " + std::string(to_string(profile)) + " profile");
    }
    return *idx;
  };

  const auto date_col = require_column("date");
  const auto hour_col = require_column("hour");
  const auto price_col = require_column(series::kPrice);
  std::vector<std::size_t> hourly_cols;
  std::vector<std::size_t> daily_cols;
  for (auto name : cols.hourly) hourly_cols.push_back(require_column(name));
  for (auto name : cols.daily) daily_cols.push_back(require_column(name));

  std::map<Date, std::vector<RawRow>> by_date;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    Date date;
    try {
      date = parse_date(fields[date_col]);
    } catch (const DataError& e) {
      throw DataError("row " + std::to_string(line_no) + ", column 'date': " + e.what());
    }
    RawRow row;
    row.line = line_no;
    {
      int hour = 0;
      const auto f = fields[hour_col];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), hour);
      if (ec != std::errc{} || ptr != f.data() + f.size() || hour < 1 || hour > kHoursPerDay) {
        fail_cell(line_no, "hour", f);
      }
      row.hour = hour;
    }
    const auto price = parse_double(fields[price_col]);
    if (!price) fail_cell(line_no, series::kPrice, fields[price_col]);
    row.price = *price;
    for (std::size_t i = 0; i < hourly_cols.size(); ++i) {
      const auto v = parse_double(fields[hourly_cols[i]]);
      if (!v) fail_cell(line_no, cols.hourly[i], fields[hourly_cols[i]]);
      row.hourly.push_back(*v);
    }
    for (std::size_t i = 0; i < daily_cols.size(); ++i) {
      const auto f = fields[daily_cols[i]];
      if (f.empty() || f == "NA" || f == "NaN") {
        row.daily.push_back(kNaN);
        continue;
      }
      const auto v = parse_double(f);
      if (!v) fail_cell(line_no, cols.daily[i], f);
      row.daily.push_back(*v);
    }
    by_date[date].push_back(std::move(row));
  }
  if (by_date.empty()) throw DataError("panel file has no data rows");

  HourlyPanel panel;
  panel.market_id = std::move(market_id);
  panel.profile = profile;
  const auto n = by_date.size();
  panel.prices.resize(static_cast<Eigen::Index>(n), kHoursPerDay);
  for (auto name : cols.hourly) panel.hourly.emplace(std::string(name), HourMatrix(static_cast<Eigen::Index>(n), kHoursPerDay));
  for (auto name : cols.daily) panel.daily.emplace(std::string(name), std::vector<double>(n, kNaN));

  std::size_t d = 0;
  for (auto& [date, rows] : by_date) {
    if (d > 0 && date - panel.days.back() != std::chrono::days{1}) {
      throw DataError("gap in dates: missing date " + format_date(panel.days.back() + std::chrono::days{1}));
    }
    panel.days.push_back(date);
    panel.dow.push_back(static_cast<int>(std::chrono::weekday{date}.iso_encoding()) - 1);

    std::array<const RawRow*, kHoursPerDay> slots{};
    std::vector<RawRow> synthesized;
    synthesized.reserve(2);
    auto flag = repair_day(date, rows, slots, synthesized);

    const auto row_idx = static_cast<Eigen::Index>(d);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const RawRow& r = *slots[static_cast<std::size_t>(h)];
      panel.prices(row_idx, h) = r.price;
      for (std::size_t i = 0; i < cols.hourly.size(); ++i) {
        panel.hourly.find(cols.hourly[i])->second(row_idx, h) = r.hourly[i];
      }
    }
    for (std::size_t i = 0; i < cols.daily.size(); ++i) {
      double value = kNaN;
      for (const auto& r : rows) {
        const double v = r.daily[i];
        if (std::isnan(v)) continue;
        if (std::isnan(value)) {
          value = v;
        } else if (v != value) {
          throw DataError("row " + std::to_string(r.line) + ", column '" + std::string(cols.daily[i]) +
                          "': daily value differs within " + format_date(date));
        }
      }
      auto& out = panel.daily.find(cols.daily[i])->second;
      if (std::isnan(value)) {
        if (d == 0) {
          throw DataError("column '" + std::string(cols.daily[i]) + "' (" +
                          std::string(series::symbol(cols.daily[i])) + "): no observation on or before " +
                          format_date(date));
        }
        value = out[d - 1];
        flag |= kRepairForwardFill;
      }
      out[d] = value;
    }
    panel.repairs.push_back(flag);
    ++d;
  }
  if (profile == Profile::kEu) panel = derive_residual_load(panel);
  panel.check_invariants();
  return panel;
}

HourlyPanel load_panel(const std::filesystem::path& path, Profile profile) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel file '" + path.string() + "'");
  return parse_panel_csv(in, profile, path.stem().string());
}

void write_panel_csv(const HourlyPanel& panel, std::ostream& out) {
  const auto& cols = profile_columns(panel.profile);
  out << "date,hour,price";
  for (auto name : cols.order) out << ',' << name;
  out << '\n';
  for (std::size_t d = 0; d < panel.n_days(); ++d) {
    const auto date = format_date(panel.days[d]);
    const auto row = static_cast<Eigen::Index>(d);
    for (int h = 0; h < kHoursPerDay; ++h) {
      out << date << ',' << (h + 1) << ',' << format_double(panel.prices(row, h));
      for (auto name : cols.order) {
        out << ',';
        if (panel.has_hourly(name)) {
          out << format_double(panel.hourly_series(name)(row, h));
        } else {
          out << format_double(panel.daily_series(name)[d]);
        }
      }
      out << '\n';
    }
  }
}

void save_panel(const HourlyPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write panel file '" + path.string() + "'");
  write_panel_csv(panel, out);
}

HourlyPanel derive_residual_load(const HourlyPanel& panel) {
  for (auto name : {series::kLoad, series::kWind, series::kSolar}) {
    if (!panel.has_hourly(name)) {
      throw DataError("residual load needs '" + std::string(name) + "' (" + std::string(series::symbol(name)) + ")");
    }
  }
  HourlyPanel out = panel;
  const auto& load = panel.hourly_series(series::kLoad);
  const auto& wind = panel.hourly_series(series::kWind);
  const auto& solar = panel.hourly_series(series::kSolar);
  out.hourly.insert_or_assign(std::string(series::kResidualLoad), HourMatrix(load - (wind + solar)));
  return out;
}

NormStats NormStats::identity() {
  NormStats s;
  s.identity_ = true;
  return s;
}

void NormStats::set(std::string name, SeriesStats stats) { stats_.insert_or_assign(std::move(name), stats); }

const SeriesStats& NormStats::at(std::string_view name) const {
  static const SeriesStats unit{};
  if (identity_) return unit;
  const auto it = stats_.find(name);
  if (it == stats_.end()) throw DataError("no normalization statistics for '" + std::string(name) + "'");
  return it->second;
}

double NormStats::normalize(std::string_view name, double value) const {
  const auto& s = at(name);
  return (value - s.mean) / s.sd;
}

double NormStats::denormalize(std::string_view name, double value) const {
  const auto& s = at(name);
  return value * s.sd + s.mean;
}

NormStats fit_norm_stats(const HourlyPanel& panel, DayRange range, std::span<const std::string_view> names,
                         ConstantSeries policy) {
  if (range.empty() || range.end > panel.n_days()) throw DataError("normalization range is empty or out of bounds");
  NormStats stats;
  std::vector<double> values;
  for (auto name : names) {
    values.clear();
    if (name == series::kPrice || panel.has_hourly(name)) {
      const auto& m = panel.hourly_series(name);
      const auto block = m.middleRows(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()));
      values.assign(block.data(), block.data() + block.size());
    } else {
      const auto& v = panel.daily_series(name);
      values.assign(v.begin() + static_cast<std::ptrdiff_t>(range.begin),
                    v.begin() + static_cast<std::ptrdiff_t>(range.end));
    }
    if (values.size() < 2) {
      throw DataError("normalization of '" + std::string(name) + "' needs at least two observations");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
      if (policy == ConstantSeries::kReject) {
        throw DataError("series '" + std::string(name) + "' (" + std::string(series::symbol(name)) +
                        ") is constant over the normalization range");
      }
      stats.set(std::string(name), SeriesStats{*lo, 1.0, true});
      continue;
    }
    double mean = 0.0;
    for (double x : values) mean += x;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    stats.set(std::string(name), SeriesStats{mean, sd, false});
  }
  return stats;
}

NormStats fit_norm_stats(const HourlyPanel& panel, DayRange range, ConstantSeries policy) {
  return fit_norm_stats(panel, range, regressor_series(panel.profile), policy);
}

SplitGeometry::SplitGeometry(std::size_t calibration_len, std::size_t validation_len, DayRange test)
    : calibration_len_(calibration_len), validation_len_(validation_len), test_(test) {}

DayWindows SplitGeometry::windows(std::size_t d) const {
  if (d < required_history()) throw HistoryError("day " + std::to_string(d) + " lacks required history");
  DayWindows w;
  w.target = d;
  w.calibration = {d - calibration_len_, d};
  w.validation = {d - validation_len_, d};
  w.training = {d - calibration_len_ - validation_len_, d};
  return w;
}

SplitGeometry make_split(const HourlyPanel& panel, const SplitConfig& config) {
  if (config.calibration_len == 0) throw ConfigError("calibration length must be positive");
  const auto required = config.calibration_len + config.validation_len + kMaxLag;
  if (panel.n_days() <= required) {
    throw HistoryError("insufficient history: calibration " + std::to_string(config.calibration_len) +
                       " + validation " + std::to_string(config.validation_len) + " + lag " +
                       std::to_string(kMaxLag) + " requires " + std::to_string(required + 1) +
                       " days, panel provides " + std::to_string(panel.n_days()));
  }
  std::size_t first = required;
  std::size_t last = panel.n_days() - 1;
  if (config.test_first) {
    const auto idx = panel.index_of(*config.test_first);
    if (!idx) throw ConfigError("test start " + format_date(*config.test_first) + " is outside the panel");
    first = *idx;
  }
  if (config.test_last) {
    const auto idx = panel.index_of(*config.test_last);
    if (!idx) throw ConfigError("test end " + format_date(*config.test_last) + " is outside the panel");
    last = *idx;
  }
  if (first < required) {
    throw HistoryError("insufficient history before " + format_date(panel.days[first]) + ": requires " +
                       std::to_string(required) + " prior days, available " + std::to_string(first));
  }
  if (first > last) throw ConfigError("test interval is empty");
  return SplitGeometry(config.calibration_len, config.validation_len, DayRange{first, last + 1});
}

}  // namespace epf
