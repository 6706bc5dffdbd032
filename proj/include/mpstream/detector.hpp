#pragma once

#include "mpstream/stream.hpp"
#include "mpstream/types.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace mpstream {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FixedThreshold {
  double value = 0.0;
};

/// Threshold = q-quantile of the profile values seen while calibrating.
struct QuantileThreshold {
  double q = 0.999;
  std::size_t calibration_len = 2000;  // samples, counted from stream head
};

using ThresholdMode = std::variant<FixedThreshold, QuantileThreshold>;

struct DetectorConfig {
  WindowSize window{64};
  std::optional<ExclusionZone> exclusion;  // ceil(m/4) when unset
  std::size_t capacity = kDefaultStreamCapacity;
  ThresholdMode threshold = QuantileThreshold{};
  double enter_ratio = 1.0;
  double exit_ratio = 0.9;
  std::size_t min_event_len = 3;
  std::optional<std::size_t> cooldown;  // m when unset
  std::optional<std::size_t> warmup;    // 2m when unset

  ExclusionZone exclusion_zone() const { return exclusion.value_or(ExclusionZone::for_window(window)); }
  std::size_t cooldown_len() const { return cooldown.value_or(window.m); }
  std::size_t warmup_len() const { return warmup.value_or(2 * window.m); }

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

enum class EventKind { kAnomalyStart, kAnomalyEnd };

struct DetectionEvent {
  EventKind kind;
  std::size_t position;  // start index of the subsequence that opened the triggering run
  double profile_value;

  bool operator==(const DetectionEvent&) const = default;
};

/// Streaming profile followed by the filter chain: threshold calibration,
/// enter/exit hysteresis, run-length debounce and post-event cooldown.
class Detector {
 public:
  explicit Detector(DetectorConfig config);

  /// Feeds one sample. Emits at most one Start and one End.
  std::vector<DetectionEvent> step(double sample);

  const DetectorConfig& config() const { return config_; }
  std::optional<double> threshold() const { return threshold_; }
  bool in_anomaly() const { return in_anomaly_; }
  std::size_t samples_seen() const { return stream_.count(); }
  const StreamingProfile<double>& stream() const { return stream_; }
  /// Profile update produced by the most recent step, if any.
  const std::optional<StreamingProfile<double>::Update>& last_update() const { return last_update_; }

 private:
  void consume(const StreamingProfile<double>::Update& u, std::vector<DetectionEvent>& out);

  DetectorConfig config_;
  StreamingProfile<double> stream_;
  std::optional<double> threshold_;
  std::size_t detect_from_ = 0;  // first sample index eligible for events
  std::vector<double> calibration_;
  std::optional<StreamingProfile<double>::Update> last_update_;

  bool in_anomaly_ = false;
  std::size_t run_length_ = 0;
  std::size_t run_position_ = 0;
  double run_value_ = 0.0;
  std::size_t cooldown_left_ = 0;
};

/// q-quantile with linear interpolation between order statistics over the
/// finite entries of values.
double calibrate_threshold(std::span<const double> values, double q);

/// Pairs each Start with the following End; a trailing Start closes at
/// stream_len.
std::vector<AnomalySegment> events_to_segments(std::span<const DetectionEvent> events, std::size_t stream_len);

/// Runs a fresh detector over a whole series.
std::vector<DetectionEvent> detect_all(const DetectorConfig& config, std::span<const double> samples);

}  // namespace mpstream
