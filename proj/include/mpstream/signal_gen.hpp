#pragma once

// Synthetic converter frequency channel (f_c) with labeled fault injections.

#include "mpstream/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mpstream {

enum class FaultKind {
  kLLFault,
  kThreePhaseSensorFault,
  kSinglePhaseVoltageSag,
  kThreePhaseGridFault,
  kPointOutlier,
  kShapeletOutlier,
  kSeasonalOutlier,
  kTrendOutlier,
};

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view name);

struct GeneratorConfig {
  double sample_rate_hz = 5000.0;
  double duration_s = 20.0;
  double nominal_freq_hz = 50.0;
  double noise_std = 0.005;
  double ripple_amp_hz = 0.02;  // ripple at twice nominal
  std::uint64_t seed = 42;

  void validate() const;
  std::size_t sample_count() const;
  double ripple_freq_hz() const { return 2.0 * nominal_freq_hz; }
};

struct FaultSpec {
  FaultKind kind = FaultKind::kLLFault;
  double start_s = 0.0;
  double duration_s = 0.0;
  double severity = 1.0;
};

struct LabeledDataset {
  TimeSeries<double> channel;
  std::vector<AnomalySegment> truth;  // sorted, disjoint
  GeneratorConfig config;
};

// Fault amplitudes at severity 1, in Hz.
inline constexpr double kLLAmplitude = 1.5;
inline constexpr double kSagAmplitude = 0.5;
inline constexpr double kGridStepAmplitude = 2.0;
inline constexpr double kPointAmplitude = 1.0;
inline constexpr double kTrendAmplitude = 1.0;
inline constexpr double kShapeletAmplitude = 0.1;

/// nominal + ripple + Gaussian noise; bit-identical for a fixed seed.
TimeSeries<double> gen_base(const GeneratorConfig& config);

/// Sample interval [start, end) that spec occupies in a series of n samples.
AnomalySegment fault_interval(const GeneratorConfig& config, const FaultSpec& spec, std::size_t n);

/// Applies one fault to base. `seed` drives any randomness the fault adds.
LabeledDataset inject(const GeneratorConfig& config, const TimeSeries<double>& base, const FaultSpec& spec,
                      std::uint64_t seed);

/// Applies a further fault to an already labeled dataset; the new truth
/// segment must not overlap existing ones.
LabeledDataset inject(const LabeledDataset& dataset, const FaultSpec& spec, std::uint64_t seed);

struct FourFaultLayout {
  // LL, sensor, sag, grid. The sag stays well short of the default window:
  // a raised-cosine dip about one window long z-normalizes to nearly one
  // ripple cycle and hides in the profile.
  std::array<double, 4> start_s{2.0, 6.0, 10.0, 14.0};
  std::array<double, 4> duration_s{0.012, 0.012, 0.004, 0.02};
  double severity = 1.0;
  std::size_t min_gap_samples = 320;  // 5 * default window
};

inline constexpr std::array<FaultKind, 4> kFourFaultOrder{
    FaultKind::kLLFault, FaultKind::kThreePhaseSensorFault, FaultKind::kSinglePhaseVoltageSag,
    FaultKind::kThreePhaseGridFault};

/// Seed used for the i-th fault of the four-fault dataset.
std::uint64_t fault_seed(std::uint64_t base_seed, std::size_t fault_index);

FaultSpec four_fault_spec(const FourFaultLayout& layout, std::size_t fault_index);

/// One channel with the four converter faults in sequence.
LabeledDataset gen_four_fault_dataset(const GeneratorConfig& config, const FourFaultLayout& layout = {});

}  // namespace mpstream
