#include "epf/io.hpp"

#include "epf/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace epf {

namespace {

using json = nlohmann::json;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> expected, std::string what)
      : in_(in), what_(std::move(what)) {
    std::string line;
    if (!std::getline(in_, line)) throw DataError(what_ + ": empty file");
    if (split(line) != expected) throw DataError(what_ + ": unexpected header '" + line + "'");
    columns_ = expected.size();
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line.empty() || line == "\r") continue;
      fields = split(line);
      if (fields.size() != columns_) fail("wrong field count");
      return true;
    }
    return false;
  }

  double number(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad number '" + s + "'");
    return v;
  }

  std::optional<double> optional_number(const std::string& s) const {
    if (s == "NA") return std::nullopt;
    return number(s);
  }

  long integer(const std::string& s) const {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(what_ + ", row " + std::to_string(line_ + 1) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::string what_;
  std::size_t columns_ = 0;
  std::size_t line_ = 1;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> relative(std::optional<double> value, std::optional<double> reference) {
  if (!value || !reference || *reference == 0.0) return std::nullopt;
  return (*value - *reference) / std::abs(*reference);
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

template <typename Report, typename Cell>
std::string format_table(std::span<const Report> reports, Cell cell) {
  std::set<int> years;
  for (const auto& r : reports) {
    for (const auto& y : r.years) years.insert(y.year);
  }
  std::size_t width = 4;
  for (const auto& r : reports) width = std::max(width, r.label.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "Year";
  for (int y : years) os << " | " << std::right << std::setw(10) << y;
  os << '\n';
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(width)) << r.label;
    for (int y : years) {
      const auto it = std::find_if(r.years.begin(), r.years.end(), [&](const auto& e) { return e.year == y; });
      os << " | " << std::right << std::setw(10) << (it == r.years.end() ? std::string("-") : cell(*it));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& value) { return value ? format_number(*value) : "NA"; }

void write_forecasts_csv(std::span<const ForecastRun> runs, const HourlyPanel& panel, std::ostream& out) {
  out << "method,date,hour,forecast,actual\n";
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.days.size(); ++i) {
      const auto d = run.days.begin + i;
      const auto date = format_date(panel.days.at(d));
      for (int h = 0; h < kHoursPerDay; ++h) {
        out << run.label << ',' << date << ',' << (h + 1) << ','
            << format_number(run.forecasts(static_cast<Eigen::Index>(i), h)) << ','
            << format_number(panel.prices(static_cast<Eigen::Index>(d), h)) << '\n';
      }
    }
  }
}

std::vector<ForecastRun> read_forecasts_csv(std::istream& in, const HourlyPanel& panel) {
  CsvReader reader(in, {"method", "date", "hour", "forecast", "actual"}, "forecast file");
  std::vector<std::string> order;
  std::map<std::string, std::map<std::size_t, std::array<std::optional<double>, kHoursPerDay>>> cells;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto idx = panel.index_of(parse_date(f[1]));
    if (!idx) reader.fail("date " + f[1] + " is outside the panel");
    const auto hour = reader.integer(f[2]);
    if (hour < 1 || hour > kHoursPerDay) reader.fail("hour out of range");
    if (!cells.count(f[0])) order.push_back(f[0]);
    auto& slot = cells[f[0]][*idx][static_cast<std::size_t>(hour - 1)];
    if (slot) reader.fail("duplicate forecast for " + f[0] + " " + f[1] + " hour " + f[2]);
    slot = reader.number(f[3]);
  }
  std::vector<ForecastRun> runs;
  for (const auto& label : order) {
    const auto& days = cells[label];
    ForecastRun run;
    run.label = label;
    run.days = {days.begin()->first, days.rbegin()->first + 1};
    run.forecasts.resize(static_cast<Eigen::Index>(run.days.size()), kHoursPerDay);
    for (std::size_t d = run.days.begin; d < run.days.end; ++d) {
      const auto it = days.find(d);
      if (it == days.end()) throw DataError(label + ": no forecasts for " + format_date(panel.days[d]));
      for (int h = 0; h < kHoursPerDay; ++h) {
        const auto& v = it->second[static_cast<std::size_t>(h)];
        if (!v) {
          throw DataError(label + ": missing forecast for " + format_date(panel.days[d]) + " hour " +
                          std::to_string(h + 1));
        }
        run.forecasts(static_cast<Eigen::Index>(d - run.days.begin), h) = *v;
      }
      run.dates.push_back(panel.days[d]);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

void write_runs_json(std::span<const ForecastRun> runs, const HourlyPanel& panel, std::ostream& out) {
  json doc = json::array();
  for (const auto& run : runs) {
    json forecasts = json::array();
    for (Eigen::Index i = 0; i < run.forecasts.rows(); ++i) {
      forecasts.push_back(std::vector<double>(run.forecasts.row(i).data(), run.forecasts.row(i).data() + kHoursPerDay));
    }
    doc.push_back({{"method", run.label},
                   {"first_date", format_date(panel.days.at(run.days.begin))},
                   {"last_date", format_date(panel.days.at(run.days.end - 1))},
                   {"days", run.days.size()},
                   {"forecasts", std::move(forecasts)}});
  }
  out << json{{"market", panel.market_id}, {"runs", std::move(doc)}}.dump(2) << '\n';
}

void write_timings_json(std::span<const ForecastRun> runs, std::ostream& out) {
  json doc = json::array();
  for (const auto& run : runs) doc.push_back({{"method", run.label}, {"days", run.days.size()}, {"seconds", run.seconds}});
  out << doc.dump(2) << '\n';
}

void write_rmse_csv(std::span<const ErrorReport> reports, std::ostream& out) {
  out << "method,year,rmse,cells\n";
  for (const auto& r : reports) {
    std::size_t total = 0;
    for (const auto& y : r.years) {
      out << r.label << ',' << y.year << ',' << format_number(y.rmse) << ',' << y.cells << '\n';
      total += y.cells;
    }
    out << r.label << ",all," << format_number(r.overall) << ',' << total << '\n';
  }
}

std::vector<ErrorReport> read_rmse_csv(std::istream& in) {
  CsvReader reader(in, {"method", "year", "rmse", "cells"}, "rmse file");
  std::vector<ErrorReport> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (out.empty() || out.back().label != f[0]) out.push_back(ErrorReport{f[0], {}, 0.0});
    const double value = reader.number(f[2]);
    if (f[1] == "all") {
      out.back().overall = value;
    } else {
      out.back().years.push_back(
          {static_cast<int>(reader.integer(f[1])), value, static_cast<std::size_t>(reader.integer(f[3]))});
    }
  }
  return out;
}

void write_rmse_json(std::span<const ErrorReport> reports, std::ostream& out) {
  json doc = json::array();
  for (const auto& r : reports) {
    json years = json::array();
    for (const auto& y : r.years) years.push_back({{"year", y.year}, {"rmse", y.rmse}, {"cells", y.cells}});
    doc.push_back({{"method", r.label}, {"overall", r.overall}, {"years", std::move(years)}});
  }
  out << doc.dump(2) << '\n';
}

void write_ledger_csv(std::span<const TradeLedger> ledgers, std::ostream& out) {
  out << "method,date,traded,charge_hour,discharge_hour,predicted_spread,profit\n";
  for (const auto& ledger : ledgers) {
    for (const auto& d : ledger.days) {
      out << ledger.label << ',' << format_date(d.date) << ',' << (d.traded ? 1 : 0) << ',' << (d.charge + 1) << ','
          << (d.discharge + 1) << ',' << format_number(d.predicted_spread) << ',' << format_number(d.profit) << '\n';
    }
  }
}

std::vector<TradeLedger> read_ledger_csv(std::istream& in) {
  CsvReader reader(in, {"method", "date", "traded", "charge_hour", "discharge_hour", "predicted_spread", "profit"},
                   "ledger file");
  std::vector<TradeLedger> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (out.empty() || out.back().label != f[0]) out.push_back(TradeLedger{f[0], {}});
    TradeDay day;
    day.date = parse_date(f[1]);
    day.traded = reader.integer(f[2]) != 0;
    day.charge = static_cast<int>(reader.integer(f[3])) - 1;
    day.discharge = static_cast<int>(reader.integer(f[4])) - 1;
    day.predicted_spread = reader.number(f[5]);
    day.profit = reader.number(f[6]);
    out.back().days.push_back(day);
  }
  return out;
}

void write_econ_csv(std::span<const EconReport> reports, std::ostream& out) {
  out << "method,year,total_profit,trades,profit_per_trade,sharpe\n";
  for (const auto& r : reports) {
    for (const auto& y : r.years) {
      out << r.label << ',' << y.year << ',' << format_number(y.total_profit) << ',' << y.trades << ','
          << format_optional(y.profit_per_trade) << ',' << format_optional(y.sharpe) << '\n';
    }
  }
}

std::vector<EconReport> read_econ_csv(std::istream& in) {
  CsvReader reader(in, {"method", "year", "total_profit", "trades", "profit_per_trade", "sharpe"}, "econ file");
  std::vector<EconReport> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (out.empty() || out.back().label != f[0]) out.push_back(EconReport{f[0], {}});
    YearEcon y;
    y.year = static_cast<int>(reader.integer(f[1]));
    y.total_profit = reader.number(f[2]);
    y.trades = static_cast<std::size_t>(reader.integer(f[3]));
    y.profit_per_trade = reader.optional_number(f[4]);
    y.sharpe = reader.optional_number(f[5]);
    out.back().years.push_back(y);
  }
  return out;
}

void write_econ_json(std::span<const EconReport> reports, std::ostream& out) {
  json doc = json::array();
  for (const auto& r : reports) {
    json years = json::array();
    for (const auto& y : r.years) {
      years.push_back({{"year", y.year},
                       {"total_profit", y.total_profit},
                       {"trades", y.trades},
                       {"profit_per_trade", optional_json(y.profit_per_trade)},
                       {"sharpe", optional_json(y.sharpe)}});
    }
    doc.push_back({{"method", r.label}, {"years", std::move(years)}});
  }
  out << doc.dump(2) << '\n';
}

void write_ksweep_csv(std::span<const KSweepPoint> points, std::ostream& out) {
  out << "k,rmse\n";
  for (const auto& p : points) out << p.k << ',' << format_number(p.rmse) << '\n';
}

std::vector<KSweepPoint> read_ksweep_csv(std::istream& in) {
  CsvReader reader(in, {"k", "rmse"}, "k-sweep file");
  std::vector<KSweepPoint> out;
  std::vector<std::string> f;
  while (reader.next(f)) out.push_back({static_cast<std::size_t>(reader.integer(f[0])), reader.number(f[1])});
  return out;
}

std::vector<RelativeChange> relative_changes(std::span<const ErrorReport> errors, std::span<const EconReport> econ,
                                             const std::string& reference) {
  auto find_error = [&](const std::string& label) {
    return std::find_if(errors.begin(), errors.end(), [&](const auto& r) { return r.label == label; });
  };
  auto find_econ = [&](const std::string& label) {
    return std::find_if(econ.begin(), econ.end(), [&](const auto& r) { return r.label == label; });
  };
  const auto ref_err = find_error(reference);
  const auto ref_econ = find_econ(reference);
  if (ref_err == errors.end() && ref_econ == econ.end()) {
    throw ConfigError("reference method '" + reference + "' not found in the reports");
  }

  auto rmse_of = [](auto it, auto end, int year) -> std::optional<double> {
    if (it == end) return std::nullopt;
    for (const auto& y : it->years) {
      if (y.year == year) return y.rmse;
    }
    return std::nullopt;
  };
  auto econ_of = [](auto it, auto end, int year) -> const YearEcon* {
    if (it == end) return nullptr;
    for (const auto& y : it->years) {
      if (y.year == year) return &y;
    }
    return nullptr;
  };

  std::vector<std::string> labels;
  for (const auto& r : errors) labels.push_back(r.label);
  for (const auto& r : econ) {
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
  }
  std::vector<RelativeChange> rows;
  for (const auto& label : labels) {
    if (label == reference) continue;
    const auto err = find_error(label);
    const auto ec = find_econ(label);
    std::set<int> years;
    if (err != errors.end()) {
      for (const auto& y : err->years) years.insert(y.year);
    }
    if (ec != econ.end()) {
      for (const auto& y : ec->years) years.insert(y.year);
    }
    for (int year : years) {
      RelativeChange row;
      row.label = label;
      row.year = year;
      row.rmse = relative(rmse_of(err, errors.end(), year), rmse_of(ref_err, errors.end(), year));
      const auto* mine = econ_of(ec, econ.end(), year);
      const auto* ref = econ_of(ref_econ, econ.end(), year);
      if (mine && ref) {
        row.total_profit = relative(mine->total_profit, ref->total_profit);
        row.profit_per_trade = relative(mine->profit_per_trade, ref->profit_per_trade);
        row.sharpe = relative(mine->sharpe, ref->sharpe);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_relative_csv(std::span<const RelativeChange> rows, std::ostream& out) {
  out << "method,year,rmse,total_profit,profit_per_trade,sharpe\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.year << ',' << format_optional(r.rmse) << ',' << format_optional(r.total_profit) << ','
        << format_optional(r.profit_per_trade) << ',' << format_optional(r.sharpe) << '\n';
  }
}

std::string format_rmse_table(std::span<const ErrorReport> reports) {
  return format_table(reports, [](const YearRmse& y) { return fixed(y.rmse, 4); });
}

std::string format_econ_table(std::span<const EconReport> reports) {
  std::ostringstream os;
  os << "Total profit\n"
     << format_table(reports, [](const YearEcon& y) { return fixed(y.total_profit, 0); }) << "\nProfit per trade\n"
     << format_table(reports,
                     [](const YearEcon& y) { return y.profit_per_trade ? fixed(*y.profit_per_trade, 1) : "NA"; })
     << "\nSharpe ratio\n"
     << format_table(reports, [](const YearEcon& y) { return y.sharpe ? fixed(*y.sharpe, 2) : "NA"; });
  return os.str();
}

}  // namespace epf
