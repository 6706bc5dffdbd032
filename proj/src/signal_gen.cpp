#include "mpstream/signal_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace mpstream {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::array<std::string_view, 8> kFaultNames{
    "LLFault",         "ThreePhaseSensorFault", "SinglePhaseVoltageSag", "ThreePhaseGridFault",
    "PointOutlier",    "ShapeletOutlier",       "SeasonalOutlier",       "TrendOutlier",
};

double blend(double base, double target, double severity) { return (1.0 - severity) * base + severity * target; }

}  // namespace

std::string_view to_string(FaultKind kind) { return kFaultNames[static_cast<std::size_t>(kind)]; }

std::optional<FaultKind> parse_fault_kind(std::string_view name) {
  for (std::size_t i = 0; i < kFaultNames.size(); ++i) {
    if (kFaultNames[i] == name) return static_cast<FaultKind>(i);
  }
  return std::nullopt;
}

void GeneratorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(sample_rate_hz)) throw std::invalid_argument("sample_rate_hz must be positive");
  if (!positive(duration_s)) throw std::invalid_argument("duration_s must be positive");
  if (!positive(nominal_freq_hz)) throw std::invalid_argument("nominal_freq_hz must be positive");
  if (!std::isfinite(noise_std) || noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
  if (!std::isfinite(ripple_amp_hz) || ripple_amp_hz < 0.0) throw std::invalid_argument("ripple_amp_hz must be >= 0");
  if (sample_rate_hz < 20.0 * nominal_freq_hz) {
    throw std::invalid_argument("sample_rate_hz must be at least 20x nominal_freq_hz");
  }
  if (sample_count() < 1) throw std::invalid_argument("configuration yields no samples");
}

std::size_t GeneratorConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
}

TimeSeries<double> gen_base(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.sample_count();
  const double ripple_w = kTwoPi * config.ripple_freq_hz();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_std > 0.0 ? config.noise_std : 1.0);

  Vector<double> f(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / config.sample_rate_hz;
    double v = config.nominal_freq_hz + config.ripple_amp_hz * std::sin(ripple_w * t);
    if (config.noise_std > 0.0) v += noise(rng);
    f(static_cast<Eigen::Index>(i)) = v;
  }
  return TimeSeries<double>(std::move(f), config.sample_rate_hz);
}

AnomalySegment fault_interval(const GeneratorConfig& config, const FaultSpec& spec, std::size_t n) {
  if (!std::isfinite(spec.start_s) || spec.start_s < 0.0) {
    throw std::invalid_argument("fault start must be a finite time >= 0");
  }
  if (!std::isfinite(spec.severity) || spec.severity < 0.0 || spec.severity > 1.0) {
    throw std::invalid_argument("fault severity must be in [0, 1]");
  }
  const auto start = static_cast<std::size_t>(std::llround(spec.start_s * config.sample_rate_hz));
  std::size_t len = 1;
  if (spec.kind != FaultKind::kPointOutlier) {
    if (!std::isfinite(spec.duration_s) || spec.duration_s <= 0.0) {
      throw std::invalid_argument("fault duration must be positive");
    }
    len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.duration_s * config.sample_rate_hz)));
  }
  if (start >= n || len > n - start) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " interval [" + std::to_string(start) + ", " +
                                std::to_string(start + len) + ") lies outside the signal of " + std::to_string(n) +
                                " samples");
  }
  return {start, start + len, std::string(to_string(spec.kind))};
}

LabeledDataset inject(const GeneratorConfig& config, const TimeSeries<double>& base, const FaultSpec& spec,
                      std::uint64_t seed) {
  const std::size_t n = base.size();
  const AnomalySegment seg = fault_interval(config, spec, n);
  const double fs = config.sample_rate_hz;
  const double sev = spec.severity;
  const std::size_t s = seg.start;
  const std::size_t len = seg.length();
  const double dur = static_cast<double>(len) / fs;
  std::mt19937_64 rng(seed);

  Vector<double> out = base.samples();
  auto at = [&](std::size_t i) -> double& { return out(static_cast<Eigen::Index>(i)); };
  auto b = [&](std::size_t i) { return base[i]; };

  switch (spec.kind) {
    case FaultKind::kLLFault: {
      const double tau = dur / 4.0;
      const double w = kTwoPi * 5.0 * config.nominal_freq_hz;
      for (std::size_t i = s; i < seg.end; ++i) {
        const double t = static_cast<double>(i - s) / fs;
        at(i) = b(i) + sev * kLLAmplitude * std::exp(-t / tau) * std::sin(w * t);
      }
      break;
    }
    case FaultKind::kThreePhaseSensorFault: {
      const double held = b(s > 0 ? s - 1 : 0);
      for (std::size_t i = s; i < seg.end; ++i) at(i) = blend(b(i), held, sev);
      break;
    }
    case FaultKind::kSinglePhaseVoltageSag: {
      for (std::size_t i = s; i < seg.end; ++i) {
        const double phase = static_cast<double>(i - s) / static_cast<double>(len);
        at(i) = b(i) - sev * kSagAmplitude * 0.5 * (1.0 - std::cos(kTwoPi * phase));
      }
      break;
    }
    case FaultKind::kThreePhaseGridFault: {
      // extra noise with std sqrt(3) * noise_std doubles the total noise std
      std::normal_distribution<double> extra(0.0, 1.0);
      const double extra_std = std::sqrt(3.0) * config.noise_std;
      for (std::size_t i = s; i < seg.end; ++i) {
        at(i) = b(i) + sev * (-kGridStepAmplitude + extra_std * extra(rng));
      }
      break;
    }
    case FaultKind::kPointOutlier: {
      const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
      at(s) = b(s) + sev * sign * kPointAmplitude;
      break;
    }
    case FaultKind::kShapeletOutlier: {
      // square wave at half the nominal frequency, re-centered to the interval mean
      const double w = kTwoPi * 0.5 * config.nominal_freq_hz;
      Vector<double> square(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        square(static_cast<Eigen::Index>(i)) =
            std::sin(w * static_cast<double>(i) / fs) >= 0.0 ? kShapeletAmplitude : -kShapeletAmplitude;
      }
      const double base_mean = base.samples().segment(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(len)).mean();
      square.array() += base_mean - square.mean();
      for (std::size_t i = s; i < seg.end; ++i) at(i) = blend(b(i), square(static_cast<Eigen::Index>(i - s)), sev);
      break;
    }
    case FaultKind::kSeasonalOutlier: {
      const double w = kTwoPi * config.ripple_freq_hz();
      for (std::size_t i = s; i < seg.end; ++i) {
        const double t = static_cast<double>(i) / fs;
        at(i) = b(i) + sev * config.ripple_amp_hz * (std::sin(3.0 * w * t) - std::sin(w * t));
      }
      break;
    }
    case FaultKind::kTrendOutlier: {
      for (std::size_t i = s; i < seg.end; ++i) {
        at(i) = b(i) + sev * kTrendAmplitude * static_cast<double>(i - s + 1) / static_cast<double>(len);
      }
      for (std::size_t i = seg.end; i < n; ++i) at(i) = b(i) + sev * kTrendAmplitude;
      break;
    }
  }

  return LabeledDataset{TimeSeries<double>(std::move(out), base.sample_rate_hz()), {seg}, config};
}

LabeledDataset inject(const LabeledDataset& dataset, const FaultSpec& spec, std::uint64_t seed) {
  LabeledDataset next = inject(dataset.config, dataset.channel, spec, seed);
  const AnomalySegment added = next.truth.front();
  for (const auto& seg : dataset.truth) {
    if (seg.start < added.end && added.start < seg.end) {
      throw std::invalid_argument("fault " + added.label + " overlaps existing segment " + seg.label);
    }
  }
  next.truth = dataset.truth;
  next.truth.push_back(added);
  std::sort(next.truth.begin(), next.truth.end(),
            [](const AnomalySegment& a, const AnomalySegment& b) { return a.start < b.start; });
  return next;
}

std::uint64_t fault_seed(std::uint64_t base_seed, std::size_t fault_index) {
  return base_seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fault_index) + 1));
}

FaultSpec four_fault_spec(const FourFaultLayout& layout, std::size_t fault_index) {
  return FaultSpec{kFourFaultOrder.at(fault_index), layout.start_s.at(fault_index), layout.duration_s.at(fault_index),
                   layout.severity};
}

LabeledDataset gen_four_fault_dataset(const GeneratorConfig& config, const FourFaultLayout& layout) {
  TimeSeries<double> base = gen_base(config);
  const std::size_t n = base.size();

  std::vector<AnomalySegment> planned;
  for (std::size_t k = 0; k < 4; ++k) {
    planned.push_back(fault_interval(config, four_fault_spec(layout, k), n));
  }
  if (planned.front().start < layout.min_gap_samples) {
    throw std::invalid_argument("first fault starts before " + std::to_string(layout.min_gap_samples) +
                                " normal samples");
  }
  for (std::size_t k = 1; k < 4; ++k) {
    if (planned[k].start < planned[k - 1].end + layout.min_gap_samples) {
      throw std::invalid_argument("faults " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                  " are closer than " + std::to_string(layout.min_gap_samples) + " samples");
    }
  }
  if (n - planned.back().end < layout.min_gap_samples) {
    throw std::invalid_argument("last fault leaves fewer than " + std::to_string(layout.min_gap_samples) +
                                " trailing normal samples");
  }

  LabeledDataset dataset{std::move(base), {}, config};
  for (std::size_t k = 0; k < 4; ++k) {
    dataset = inject(dataset, four_fault_spec(layout, k), fault_seed(config.seed, k));
  }
  return dataset;
}

}  // namespace mpstream
