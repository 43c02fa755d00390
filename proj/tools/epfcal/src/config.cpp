#include "epfcal/config.hpp"

#include <epf/error.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace epf::cli {

namespace {

using json = nlohmann::json;

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T get(const json& j, std::string_view key) {
  if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
  }
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

std::vector<std::string> string_list(const json& j, std::string_view key) {
  if (j.is_string()) return split_list(j.get<std::string>());
  return get<std::vector<std::string>>(j, key);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

RegimeSpec parse_regime(const json& j) {
  check_keys(j, {"name", "coefficients", "daily_levels", "noise_sd"}, "regime");
  RegimeSpec r;
  if (j.contains("name")) r.name = get<std::string>(j["name"], "name");
  if (j.contains("coefficients")) r.coefficients = get<std::vector<double>>(j["coefficients"], "coefficients");
  if (j.contains("daily_levels")) {
    for (const auto& [k, v] : j["daily_levels"].items()) r.daily_levels[k] = get<double>(v, "daily_levels");
  }
  if (j.contains("noise_sd")) r.noise_sd = get<double>(j["noise_sd"], "noise_sd");
  return r;
}

void parse_synth(const json& j, SynthSettings& s) {
  check_keys(j, {"preset", "days", "regime_period", "start", "noise_scale", "noise_sd", "daily_volatility", "regimes"},
             "synth");
  if (j.contains("preset")) s.preset = get<std::string>(j["preset"], "preset");
  if (j.contains("days")) s.days = get<std::size_t>(j["days"], "days");
  if (j.contains("regime_period")) s.regime_period = get<std::size_t>(j["regime_period"], "regime_period");
  if (j.contains("start")) s.start = parse_config_date(get<std::string>(j["start"], "start"), "start");
  if (j.contains("noise_scale")) s.noise_scale = get<double>(j["noise_scale"], "noise_scale");
  if (j.contains("noise_sd")) s.noise_sd = get<double>(j["noise_sd"], "noise_sd");
  if (j.contains("daily_volatility")) s.daily_volatility = get<double>(j["daily_volatility"], "daily_volatility");
  if (j.contains("regimes")) {
    s.regimes.clear();
    for (const auto& r : j["regimes"]) s.regimes.push_back(parse_regime(r));
  }
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "synth") return Command::kSynth;
  if (name == "backtest") return Command::kBacktest;
  if (name == "ksweep") return Command::kKSweep;
  if (name == "trade-eval") return Command::kTradeEval;
  if (name == "report") return Command::kReport;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kSynth:
      return "synth";
    case Command::kBacktest:
      return "backtest";
    case Command::kKSweep:
      return "ksweep";
    case Command::kTradeEval:
      return "trade-eval";
    case Command::kReport:
      return "report";
  }
  return "?";
}

Date parse_config_date(std::string_view text, std::string_view what) {
  try {
    return parse_date(text);
  } catch (const DataError&) {
    throw ConfigError(std::string(what) + ": invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : text) {
    if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(trim(cell));
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

std::vector<std::size_t> parse_k_grid(std::string_view text) {
  const auto t = trim(text);
  if (t.empty()) throw ConfigError("k grid is empty");
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cell;
    std::istringstream is(t);
    while (std::getline(is, cell, ':')) parts.push_back(trim(cell));
    if (parts.size() != 3) throw ConfigError("k grid range must be first:last:step, got '" + t + "'");
    const auto first = parse_size(parts[0], "k grid");
    const auto last = parse_size(parts[1], "k grid");
    const auto step = parse_size(parts[2], "k grid");
    if (step == 0 || first > last) throw ConfigError("k grid range '" + t + "' is empty");
    std::vector<std::size_t> grid;
    for (auto k = first; k <= last; k += step) grid.push_back(k);
    return grid;
  }
  std::vector<std::size_t> grid;
  for (const auto& tok : split_list(t)) grid.push_back(parse_size(tok, "k grid"));
  if (grid.empty()) throw ConfigError("k grid is empty");
  return grid;
}

MethodConfig parse_method(std::string_view token, const std::vector<std::size_t>& k_grid,
                          std::size_t calibration_len) {
  const auto t = trim(token);
  const auto colon = t.find(':');
  const auto name = t.substr(0, colon);
  const auto arg = colon == std::string::npos ? std::string{} : t.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw ConfigError("method '" + t + "' needs an argument, e.g. " + name + ":182");
  };
  auto no_arg = [&] {
    if (colon != std::string::npos) throw ConfigError("method '" + name + "' takes no argument");
  };
  if (name == "win") {
    need_arg();
    return MethodConfig::win(parse_size(arg, "win"));
  }
  if (name == "avg6") {
    no_arg();
    return MethodConfig::avg6();
  }
  if (name == "avgall") {
    no_arg();
    return MethodConfig::avg_all(calibration_len);
  }
  if (name == "avg") {
    need_arg();
    std::vector<std::size_t> windows;
    std::string cell;
    std::istringstream is(arg);
    while (std::getline(is, cell, '/')) windows.push_back(parse_size(trim(cell), "avg"));
    return MethodConfig::avg(std::move(windows));
  }
  if (name == "arhnn") {
    if (colon == std::string::npos) return MethodConfig::arhnn(k_grid);
    need_arg();
    return MethodConfig::arhnn_k(parse_size(arg, "arhnn"));
  }
  if (name == "wls") {
    no_arg();
    return MethodConfig::wls();
  }
  throw ConfigError("unknown method '" + t + "' (expected win:N, avg6, avgall, avg:N/M/..., arhnn:K, arhnn, wls)");
}

std::vector<std::size_t> RunConfig::resolved_k_grid() const {
  return k_grid.empty() ? default_k_grid(calibration_len) : k_grid;
}

std::vector<MethodConfig> RunConfig::method_configs() const {
  const auto grid = resolved_k_grid();
  std::vector<MethodConfig> out;
  for (const auto& token : methods) out.push_back(parse_method(token, grid, calibration_len));
  return out;
}

StrategyParams RunConfig::strategy() const { return {efficiency, threshold}; }

SplitConfig RunConfig::split() const { return {calibration_len, validation_len, test_first, test_last}; }

SynthConfig RunConfig::synth_config() const {
  SynthConfig c;
  if (synth.preset == "two") {
    c = two_regime_config(seed, synth.noise_scale, profile);
  } else if (synth.preset == "single") {
    c = single_regime_config(seed, synth.noise_sd, synth.days.value_or(900), profile);
  } else if (synth.preset == "custom") {
    c.profile = profile;
    c.market_id = "synthetic_custom";
    c.seed = seed;
    c.regimes = synth.regimes;
  } else {
    throw ConfigError("unknown synth preset '" + synth.preset + "' (expected two, single or custom)");
  }
  if (synth.days) c.days = *synth.days;
  if (synth.regime_period) {
    c.regime_period = *synth.regime_period;
  } else if (synth.preset == "single") {
    c.regime_period = c.days;
  }
  if (synth.start) c.start = *synth.start;
  if (synth.daily_volatility) c.daily_volatility = *synth.daily_volatility;
  return c;
}

std::filesystem::path RunConfig::forecasts_path() const {
  return forecasts.empty() ? out / "forecasts.csv" : forecasts;
}

void RunConfig::validate(Command command) const {
  if (out.empty()) throw ConfigError("output directory is empty");
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (command == Command::kSynth) {
    if (synth.noise_scale < 0.0) throw ConfigError("noise scale must be non-negative");
    synth_config().validate();
    return;
  }
  if (command == Command::kReport) {
    if (reference.empty()) throw ConfigError("reference method is empty");
    return;
  }
  if (panel.empty()) throw ConfigError("no panel file given (--panel)");
  if (calibration_len == 0) throw ConfigError("calibration length must be positive");
  if (test_first && test_last && *test_first > *test_last) throw ConfigError("test start is after test end");
  const auto spec = ModelSpec::for_profile(profile);
  switch (command) {
    case Command::kBacktest: {
      const auto configs = method_configs();
      if (configs.empty()) throw ConfigError("no methods given");
      std::set<std::string> labels;
      for (const auto& m : configs) {
        m.validate(spec, calibration_len, validation_len);
        if (!labels.insert(m.label()).second) throw ConfigError("method " + m.label() + " listed twice");
      }
      break;
    }
    case Command::kKSweep: {
      const auto grid = resolved_k_grid();
      if (std::set<std::size_t>(grid.begin(), grid.end()).size() != grid.size()) {
        throw ConfigError("k grid has duplicate values");
      }
      for (auto k : grid) MethodConfig::arhnn_k(k).validate(spec, calibration_len, validation_len);
      break;
    }
    case Command::kTradeEval:
      strategy().validate();
      break;
    default:
      break;
  }
}

RunConfig parse_config(std::string_view json_text, RunConfig c) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"panel", "profile", "calib", "valid", "test_first", "test_last", "methods", "kgrid", "threshold",
              "efficiency", "workers", "seed", "out", "forecasts", "reference", "synth"},
             "config");
  if (j.contains("panel")) c.panel = get<std::string>(j["panel"], "panel");
  if (j.contains("profile")) c.profile = parse_profile(get<std::string>(j["profile"], "profile"));
  if (j.contains("calib")) c.calibration_len = get<std::size_t>(j["calib"], "calib");
  if (j.contains("valid")) c.validation_len = get<std::size_t>(j["valid"], "valid");
  if (j.contains("test_first")) c.test_first = parse_config_date(get<std::string>(j["test_first"], "test_first"), "test_first");
  if (j.contains("test_last")) c.test_last = parse_config_date(get<std::string>(j["test_last"], "test_last"), "test_last");
  if (j.contains("methods")) c.methods = string_list(j["methods"], "methods");
  if (j.contains("kgrid")) {
    c.k_grid = j["kgrid"].is_string() ? parse_k_grid(j["kgrid"].get<std::string>())
                                      : get<std::vector<std::size_t>>(j["kgrid"], "kgrid");
  }
  if (j.contains("threshold")) c.threshold = get<double>(j["threshold"], "threshold");
  if (j.contains("efficiency")) c.efficiency = get<double>(j["efficiency"], "efficiency");
  if (j.contains("workers")) c.workers = get<std::size_t>(j["workers"], "workers");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j["seed"], "seed");
  if (j.contains("out")) c.out = get<std::string>(j["out"], "out");
  if (j.contains("forecasts")) c.forecasts = get<std::string>(j["forecasts"], "forecasts");
  if (j.contains("reference")) c.reference = get<std::string>(j["reference"], "reference");
  if (j.contains("synth")) parse_synth(j["synth"], c.synth);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace epf::cli
