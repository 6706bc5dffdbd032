#include "mpstream/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpstream {

void DetectorConfig::validate() const {
  if (!(enter_ratio >= 1.0) || !std::isfinite(enter_ratio)) {
    throw std::invalid_argument("enter_ratio must be >= 1");
  }
  if (!(exit_ratio <= 1.0) || !(exit_ratio > 0.0)) {
    throw std::invalid_argument("exit_ratio must be in (0, 1]");
  }
  if (min_event_len < 1) {
    throw std::invalid_argument("min_event_len must be >= 1");
  }
  if (capacity < 2 * window.m) {
    throw std::invalid_argument("capacity must be >= 2 * window");
  }
  const std::size_t first_value_at = window.m + exclusion_zone().radius;  // sample index of first profile value
  if (const auto* q = std::get_if<QuantileThreshold>(&threshold)) {
    if (!(q->q > 0.0 && q->q < 1.0)) {
      throw std::invalid_argument("quantile must be in (0, 1)");
    }
    if (q->calibration_len <= std::max(warmup_len(), first_value_at)) {
      throw std::invalid_argument("calibration_len " + std::to_string(q->calibration_len) +
                                  " leaves no profile values after warm-up (needs > " +
                                  std::to_string(std::max(warmup_len(), first_value_at)) + ")");
    }
  } else {
    const double v = std::get<FixedThreshold>(threshold).value;
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("fixed threshold must be finite and >= 0");
    }
  }
}

Detector::Detector(DetectorConfig config)
    : config_(std::move(config)),
      stream_((config_.validate(), config_.window), config_.capacity, config_.exclusion_zone()) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&config_.threshold)) {
    threshold_ = fixed->value;
    detect_from_ = config_.warmup_len();
  } else {
    detect_from_ = std::get<QuantileThreshold>(config_.threshold).calibration_len;
  }
}

std::vector<DetectionEvent> Detector::step(double sample) {
  std::vector<DetectionEvent> events;
  last_update_ = stream_.append(sample);
  if (!last_update_) return events;

  const std::size_t sample_index = stream_.count() - 1;
  if (sample_index < config_.warmup_len()) return events;

  if (sample_index < detect_from_) {
    calibration_.push_back(last_update_->distance);
    if (sample_index + 1 == detect_from_) {
      const auto& q = std::get<QuantileThreshold>(config_.threshold);
      threshold_ = calibrate_threshold(calibration_, q.q);
      calibration_.clear();
      calibration_.shrink_to_fit();
    }
    return events;
  }
  if (!threshold_) return events;
  consume(*last_update_, events);
  return events;
}

void Detector::consume(const StreamingProfile<double>::Update& u, std::vector<DetectionEvent>& out) {
  const double value = u.distance;
  if (!in_anomaly_) {
    if (cooldown_left_ > 0) {
      --cooldown_left_;
      run_length_ = 0;
      return;
    }
    const bool above = value > *threshold_ * config_.enter_ratio;
    if (!above) {
      run_length_ = 0;
      return;
    }
  } else {
    const bool below = value < *threshold_ * config_.exit_ratio;
    if (!below) {
      run_length_ = 0;
      return;
    }
  }

  if (run_length_ == 0) {
    run_position_ = u.position;
    run_value_ = value;
  }
  ++run_length_;
  if (run_length_ < config_.min_event_len) return;

  run_length_ = 0;
  if (!in_anomaly_) {
    in_anomaly_ = true;
    out.push_back({EventKind::kAnomalyStart, run_position_, run_value_});
  } else {
    in_anomaly_ = false;
    cooldown_left_ = config_.cooldown_len();
    out.push_back({EventKind::kAnomalyEnd, run_position_, run_value_});
  }
}

double calibrate_threshold(std::span<const double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("calibrate_threshold: no values");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("calibrate_threshold: q must be in (0, 1)");
  }
  std::vector<double> finite;
  finite.reserve(values.size());
  std::copy_if(values.begin(), values.end(), std::back_inserter(finite), [](double v) { return std::isfinite(v); });
  if (finite.empty()) {
    throw CalibrationError("calibrate_threshold: no finite calibration values");
  }
  std::sort(finite.begin(), finite.end());
  const double h = q * static_cast<double>(finite.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, finite.size() - 1);
  return finite[lo] + (h - static_cast<double>(lo)) * (finite[hi] - finite[lo]);
}

std::vector<AnomalySegment> events_to_segments(std::span<const DetectionEvent> events, std::size_t stream_len) {
  std::vector<AnomalySegment> segments;
  bool open = false;
  std::size_t open_at = 0;
  for (const auto& e : events) {
    if (e.kind == EventKind::kAnomalyStart) {
      if (open) throw std::invalid_argument("events_to_segments: two consecutive starts");
      open = true;
      open_at = e.position;
    } else {
      if (!open) throw std::invalid_argument("events_to_segments: end without start");
      if (e.position <= open_at) throw std::invalid_argument("events_to_segments: end not after start");
      segments.push_back({open_at, e.position, {}});
      open = false;
    }
  }
  if (open) {
    if (open_at >= stream_len) throw std::invalid_argument("events_to_segments: start beyond stream length");
    segments.push_back({open_at, stream_len, {}});
  }
  return segments;
}

std::vector<DetectionEvent> detect_all(const DetectorConfig& config, std::span<const double> samples) {
  Detector detector(config);
  std::vector<DetectionEvent> events;
  for (double s : samples) {
    auto step = detector.step(s);
    events.insert(events.end(), step.begin(), step.end());
  }
  return events;
}

}  // namespace mpstream
