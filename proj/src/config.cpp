#include "mpstream/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace mpstream {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': not a non-negative integer: '" + value + "'");
  }
  return v;
}

// Intermediate threshold settings; the variant is assembled after parsing.
struct ThresholdKeys {
  std::string mode = "quantile";
  std::optional<double> value;
  QuantileThreshold quantile;
};

using Setter = std::function<void(RunConfig&, ThresholdKeys&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = [] {
    std::vector<std::pair<std::string, Setter>> t;
    auto num = [&t](std::string key, auto apply) {
      t.emplace_back(key, [apply](RunConfig& c, ThresholdKeys& th, const std::string& k, const std::string& v) {
        apply(c, th, to_double(k, v));
      });
    };
    auto uint = [&t](std::string key, auto apply) {
      t.emplace_back(key, [apply](RunConfig& c, ThresholdKeys& th, const std::string& k, const std::string& v) {
        apply(c, th, to_uint(k, v));
      });
    };
    // generator
    num("sample_rate_hz", [](RunConfig& c, ThresholdKeys&, double v) { c.generator.sample_rate_hz = v; });
    num("duration_s", [](RunConfig& c, ThresholdKeys&, double v) { c.generator.duration_s = v; });
    num("nominal_freq_hz", [](RunConfig& c, ThresholdKeys&, double v) { c.generator.nominal_freq_hz = v; });
    num("noise_std", [](RunConfig& c, ThresholdKeys&, double v) { c.generator.noise_std = v; });
    num("ripple_amp_hz", [](RunConfig& c, ThresholdKeys&, double v) { c.generator.ripple_amp_hz = v; });
    uint("seed", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.generator.seed = v; });
    // dataset
    t.emplace_back("dataset", [](RunConfig& c, ThresholdKeys&, const std::string& k, const std::string& v) {
      if (v == "four_fault") c.dataset = DatasetKind::kFourFault;
      else if (v == "single") c.dataset = DatasetKind::kSingleFault;
      else throw ConfigError("config key '" + k + "': expected four_fault or single, got '" + v + "'");
    });
    t.emplace_back("fault_kind", [](RunConfig& c, ThresholdKeys&, const std::string& k, const std::string& v) {
      const auto kind = parse_fault_kind(v);
      if (!kind) throw ConfigError("config key '" + k + "': unknown fault kind '" + v + "'");
      c.fault.kind = *kind;
    });
    num("fault_start_s", [](RunConfig& c, ThresholdKeys&, double v) { c.fault.start_s = v; });
    num("fault_duration_s", [](RunConfig& c, ThresholdKeys&, double v) { c.fault.duration_s = v; });
    num("severity", [](RunConfig& c, ThresholdKeys&, double v) {
      c.fault.severity = v;
      c.layout.severity = v;
    });
    const char* names[4] = {"ll", "sensor", "sag", "grid"};
    for (std::size_t i = 0; i < 4; ++i) {
      num(std::string(names[i]) + "_start_s", [i](RunConfig& c, ThresholdKeys&, double v) { c.layout.start_s[i] = v; });
      num(std::string(names[i]) + "_duration_s",
          [i](RunConfig& c, ThresholdKeys&, double v) { c.layout.duration_s[i] = v; });
    }
    uint("min_gap_samples", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.layout.min_gap_samples = v; });
    // detector
    uint("window", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) {
      if (v < 2) throw ConfigError("config key 'window': must be >= 2");
      c.detector.window = WindowSize(v);
    });
    uint("exclusion_radius",
         [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.detector.exclusion = ExclusionZone(v); });
    uint("capacity", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.detector.capacity = v; });
    t.emplace_back("threshold_mode", [](RunConfig&, ThresholdKeys& th, const std::string& k, const std::string& v) {
      if (v != "quantile" && v != "fixed") {
        throw ConfigError("config key '" + k + "': expected quantile or fixed, got '" + v + "'");
      }
      th.mode = v;
    });
    num("threshold", [](RunConfig&, ThresholdKeys& th, double v) { th.value = v; });
    num("quantile", [](RunConfig&, ThresholdKeys& th, double v) { th.quantile.q = v; });
    uint("calibration_len", [](RunConfig&, ThresholdKeys& th, std::uint64_t v) { th.quantile.calibration_len = v; });
    num("enter_ratio", [](RunConfig& c, ThresholdKeys&, double v) { c.detector.enter_ratio = v; });
    num("exit_ratio", [](RunConfig& c, ThresholdKeys&, double v) { c.detector.exit_ratio = v; });
    uint("min_event_len", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.detector.min_event_len = v; });
    uint("cooldown", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.detector.cooldown = v; });
    uint("warmup", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) { c.detector.warmup = v; });
    // run
    uint("threads", [](RunConfig& c, ThresholdKeys&, std::uint64_t v) {
      if (v < 1) throw ConfigError("config key 'threads': must be >= 1");
      c.threads = static_cast<unsigned>(v);
    });
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    generator.validate();
    detector.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

RunConfig parse_config(std::istream& in) {
  std::map<std::string, const Setter*> lookup;
  for (const auto& [k, s] : setters()) lookup[k] = &s;

  RunConfig config;
  ThresholdKeys threshold;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    try {
      (*it->second)(config, threshold, key, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (threshold.mode == "fixed") {
    if (!threshold.value) throw ConfigError("threshold_mode = fixed requires a 'threshold' value");
    config.detector.threshold = FixedThreshold{*threshold.value};
  } else {
    if (threshold.value) throw ConfigError("'threshold' is only valid with threshold_mode = fixed");
    config.detector.threshold = threshold.quantile;
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

LabeledDataset generate_dataset(const RunConfig& config) {
  if (config.dataset == DatasetKind::kFourFault) {
    return gen_four_fault_dataset(config.generator, config.layout);
  }
  return inject(config.generator, gen_base(config.generator), config.fault, fault_seed(config.generator.seed, 0));
}

}  // namespace mpstream
