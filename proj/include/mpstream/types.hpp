#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace mpstream {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IndexVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Index stored in a profile when a subsequence has no admissible neighbor.
inline constexpr std::int64_t kNoNeighbor = -1;

template <typename Scalar>
constexpr Scalar no_neighbor_distance() {
  return std::numeric_limits<Scalar>::infinity();
}

/// Number of samples per subsequence. Must be at least 2 so that a
/// subsequence has a defined standard deviation.
struct WindowSize {
  std::size_t m = 64;

  WindowSize() = default;
  explicit WindowSize(std::size_t value) : m(value) {
    if (m < 2) {
      throw std::invalid_argument("window size must be >= 2, got " + std::to_string(m));
    }
  }

  /// Number of subsequences of length m in a series of length n (0 if none).
  std::size_t profile_length(std::size_t n) const { return n >= m ? n - m + 1 : 0; }

  void check_fits(std::size_t n) const {
    if (m > n) {
      throw std::invalid_argument("window size " + std::to_string(m) + " exceeds series length " +
                                  std::to_string(n));
    }
  }
};

/// Neighbors j with |i - j| <= radius are trivial matches of i.
struct ExclusionZone {
  std::size_t radius = 0;

  ExclusionZone() = default;
  explicit ExclusionZone(std::size_t r) : radius(r) {}

  /// ceil(m / 4)
  static ExclusionZone for_window(WindowSize w) { return ExclusionZone{(w.m + 3) / 4}; }

  bool excludes(std::size_t i, std::size_t j) const {
    return (i > j ? i - j : j - i) <= radius;
  }
};

/// Uniformly sampled scalar channel.
template <typename Scalar = double>
class TimeSeries {
 public:
  TimeSeries(Vector<Scalar> samples, Scalar sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.size() < 1) {
      throw std::invalid_argument("time series must hold at least one sample");
    }
    if (!(sample_rate_hz_ > Scalar(0)) || !std::isfinite(sample_rate_hz_)) {
      throw std::invalid_argument("sample rate must be positive and finite");
    }
    if (!samples_.allFinite()) {
      throw std::invalid_argument("time series samples must be finite");
    }
  }

  const Vector<Scalar>& samples() const { return samples_; }
  Scalar sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return static_cast<std::size_t>(samples_.size()); }
  Scalar operator[](std::size_t i) const { return samples_(static_cast<Eigen::Index>(i)); }
  Scalar time_at(std::size_t i) const { return static_cast<Scalar>(i) / sample_rate_hz_; }

 private:
  Vector<Scalar> samples_;
  Scalar sample_rate_hz_;
};

/// Nearest-neighbor distance and index per subsequence.
template <typename Scalar = double>
struct MatrixProfile {
  Vector<Scalar> distances;
  IndexVector indices;

  MatrixProfile() = default;
  explicit MatrixProfile(std::size_t length)
      : distances(Vector<Scalar>::Constant(static_cast<Eigen::Index>(length),
                                           no_neighbor_distance<Scalar>())),
        indices(IndexVector::Constant(static_cast<Eigen::Index>(length), kNoNeighbor)) {}

  std::size_t size() const { return static_cast<std::size_t>(distances.size()); }
  bool empty() const { return distances.size() == 0; }
  bool has_neighbor(std::size_t i) const { return indices(static_cast<Eigen::Index>(i)) != kNoNeighbor; }
};

/// Per-subsequence mean and population standard deviation.
template <typename Scalar = double>
struct RollingStats {
  Vector<Scalar> means;
  Vector<Scalar> stds;
};

/// Half-open sample interval [start, end) flagged as anomalous.
struct AnomalySegment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;  // empty when unlabeled

  std::size_t length() const { return end - start; }
  bool operator==(const AnomalySegment&) const = default;
};

}  // namespace mpstream
