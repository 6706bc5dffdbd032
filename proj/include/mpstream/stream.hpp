#pragma once

// Fixed-memory incremental (left) Matrix Profile over the most recent
// `capacity` samples of a stream.

#include "mpstream/core.hpp"
#include "mpstream/types.hpp"

#include <optional>
#include <vector>

namespace mpstream {

inline constexpr std::size_t kDefaultStreamCapacity = 8192;

template <typename Scalar = double>
class StreamingProfile {
 public:
  /// Profile value produced for the newest subsequence.
  struct Update {
    std::size_t position;  // absolute stream index of the subsequence start
    Scalar distance;
    std::int64_t neighbor;  // absolute stream index of the nearest older subsequence
  };

  StreamingProfile(WindowSize w, std::size_t capacity = kDefaultStreamCapacity,
                   std::optional<ExclusionZone> ez = std::nullopt, bool update_history = false)
      : m_(w.m),
        capacity_(capacity),
        ez_(ez.value_or(ExclusionZone::for_window(w))),
        update_history_(update_history) {
    if (capacity_ < 2 * m_) {
      throw std::invalid_argument("stream capacity " + std::to_string(capacity_) + " must be >= 2m = " +
                                  std::to_string(2 * m_));
    }
    if (m_ + ez_.radius + 1 > capacity_) {
      throw std::invalid_argument("exclusion radius too large for stream capacity");
    }
    samples_.assign(capacity_, Scalar(0));
    means_.assign(capacity_, Scalar(0));
    stds_.assign(capacity_, Scalar(0));
    left_distance_.assign(capacity_, no_neighbor_distance<Scalar>());
    left_index_.assign(capacity_, kNoNeighbor);
    dots_.assign(capacity_, Scalar(0));
  }

  /// Ingests one sample. Returns the newest subsequence's profile value once
  /// at least m + radius + 1 samples have been seen.
  std::optional<Update> append(Scalar sample) {
    if (!std::isfinite(sample)) {
      throw std::invalid_argument("stream sample must be finite");
    }
    if (count_ == 0) offset_ = sample;
    const Scalar value = sample - offset_;

    // Slot about to be overwritten holds sample (count - capacity); the dot
    // product recurrence still needs it once more.
    const Scalar evicted = samples_[count_ % capacity_];
    samples_[count_ % capacity_] = value;
    trailing_equal_ = (count_ > 0 && sample == last_sample_) ? trailing_equal_ + 1 : 1;
    last_sample_ = sample;
    ++count_;
    peak_resident_ = std::max(peak_resident_, resident_samples());

    window_sum_ += value;
    window_sum_sq_ += value * value;
    if (count_ > m_) {
      const Scalar leaving = at(count_ - 1 - m_);
      window_sum_ -= leaving;
      window_sum_sq_ -= leaving * leaving;
    }
    if (count_ < m_) return std::nullopt;

    const std::size_t newest = count_ - m_;
    const std::size_t oldest = oldest_subsequence();
    const bool refresh = count_ % capacity_ == 0;
    if (refresh) {
      recompute_window_sums();
    }
    store_newest_stats(newest);
    update_dots(newest, oldest, evicted, refresh);

    // Candidates are ranked by squared distance; only the winner takes a sqrt.
    const std::size_t newest_slot = newest % capacity_;
    const Scalar mean_n = means_[newest_slot];
    const Scalar std_n = stds_[newest_slot];
    Scalar best_sq = no_neighbor_distance<Scalar>();
    std::int64_t best_index = kNoNeighbor;
    const std::size_t max_lag = newest - oldest;
    const std::size_t first_lag = ez_.radius + 1;
    std::size_t slot = (newest + capacity_ - (first_lag % capacity_)) % capacity_;
    for (std::size_t lag = first_lag; lag <= max_lag; ++lag) {
      const Scalar d2 = detail::znorm_sq_from_dot(dots_[lag], mean_n, std_n, means_[slot], stds_[slot], m_);
      const auto j = static_cast<std::int64_t>(newest - lag);
      detail::offer(d2, j, best_sq, best_index);
      if (update_history_) {
        detail::offer(std::sqrt(d2), static_cast<std::int64_t>(newest), left_distance_[slot], left_index_[slot]);
      }
      slot = slot == 0 ? capacity_ - 1 : slot - 1;
    }
    const Scalar best = std::sqrt(best_sq);
    left_distance_[newest % capacity_] = best;
    left_index_[newest % capacity_] = best_index;
    if (best_index == kNoNeighbor) return std::nullopt;
    return Update{newest, best, best_index};
  }

  /// Left profile of the retained window; index 0 is the oldest retained
  /// subsequence. Entries whose recorded neighbor has been evicted are
  /// recomputed against the current window.
  MatrixProfile<Scalar> snapshot() const {
    if (count_ < m_) return MatrixProfile<Scalar>(0);
    const std::size_t oldest = oldest_subsequence();
    const std::size_t newest = count_ - m_;
    const std::size_t live = newest - oldest + 1;

    MatrixProfile<Scalar> out(live);
    std::vector<std::size_t> stale;
    for (std::size_t r = 0; r < live; ++r) {
      const std::size_t abs = oldest + r;
      const std::int64_t nb = left_index_[abs % capacity_];
      if (nb != kNoNeighbor && static_cast<std::size_t>(nb) < oldest) {
        stale.push_back(r);
        continue;
      }
      out.distances(static_cast<Eigen::Index>(r)) = left_distance_[abs % capacity_];
      out.indices(static_cast<Eigen::Index>(r)) = nb == kNoNeighbor ? kNoNeighbor : nb - static_cast<std::int64_t>(oldest);
    }
    if (stale.empty()) return out;

    const Vector<Scalar> window = retained_window();
    const WindowSize w{m_};
    const ProfileOptions opts{Metric::kZNormalized, update_history_ ? ProfileSide::kTwoSided : ProfileSide::kLeft, 1};
    if (stale.size() * m_ > live) {
      const MatrixProfile<Scalar> fresh = matrix_profile_batch(window, w, ez_, opts);
      for (std::size_t r : stale) {
        out.distances(static_cast<Eigen::Index>(r)) = fresh.distances(static_cast<Eigen::Index>(r));
        out.indices(static_cast<Eigen::Index>(r)) = fresh.indices(static_cast<Eigen::Index>(r));
      }
      return out;
    }

    const Vector<Scalar> centered = window.array() - window.mean();
    const RollingStats<Scalar> stats = rolling_stats(centered, w);
    const auto mi = static_cast<Eigen::Index>(m_);
    for (std::size_t r : stale) {
      const auto ri = static_cast<Eigen::Index>(r);
      const Vector<Scalar> dots = sliding_dot_products(centered.segment(ri, mi), centered);
      Scalar best = no_neighbor_distance<Scalar>();
      std::int64_t best_index = kNoNeighbor;
      const std::size_t end = update_history_ ? live : r;
      for (std::size_t j = 0; j < end; ++j) {
        if (ez_.excludes(r, j)) continue;
        const auto ji = static_cast<Eigen::Index>(j);
        const Scalar d =
            detail::znorm_from_dot(dots(ji), stats.means(ri), stats.stds(ri), stats.means(ji), stats.stds(ji), m_);
        detail::offer(d, static_cast<std::int64_t>(j), best, best_index);
      }
      out.distances(ri) = best;
      out.indices(ri) = best_index;
    }
    return out;
  }

  /// Copy of the retained samples, oldest first. Samples are stored relative
  /// to the first one ever seen, so values come back within one rounding.
  Vector<Scalar> retained_window() const {
    const std::size_t first = count_ > capacity_ ? count_ - capacity_ : 0;
    Vector<Scalar> out(static_cast<Eigen::Index>(count_ - first));
    for (std::size_t i = first; i < count_; ++i) {
      out(static_cast<Eigen::Index>(i - first)) = at(i) + offset_;
    }
    return out;
  }

  std::size_t window() const { return m_; }
  std::size_t capacity() const { return capacity_; }
  ExclusionZone exclusion_zone() const { return ez_; }
  std::size_t count() const { return count_; }
  /// Absolute stream index of the oldest retained sample.
  std::size_t first_retained() const { return count_ > capacity_ ? count_ - capacity_ : 0; }
  std::size_t resident_samples() const { return std::min(count_, capacity_); }
  std::size_t peak_resident_samples() const { return peak_resident_; }

  /// Bytes held by the per-sample and per-subsequence buffers.
  std::size_t buffer_bytes() const {
    return sizeof(Scalar) * (samples_.capacity() + means_.capacity() + stds_.capacity() +
                             left_distance_.capacity() + dots_.capacity()) +
           sizeof(std::int64_t) * left_index_.capacity();
  }

 private:
  Scalar at(std::size_t abs) const { return samples_[abs % capacity_]; }

  std::size_t oldest_subsequence() const { return count_ > capacity_ ? count_ - capacity_ : 0; }

  void recompute_window_sums() {
    window_sum_ = Scalar(0);
    window_sum_sq_ = Scalar(0);
    for (std::size_t i = count_ - m_; i < count_; ++i) {
      const Scalar v = at(i);
      window_sum_ += v;
      window_sum_sq_ += v * v;
    }
  }

  void store_newest_stats(std::size_t newest) {
    const Scalar mm = static_cast<Scalar>(m_);
    Scalar mean = window_sum_ / mm;
    Scalar sd = std::sqrt(std::max(window_sum_sq_ / mm - mean * mean, Scalar(0)));
    if (trailing_equal_ >= m_) {
      mean = last_sample_ - offset_;
      sd = Scalar(0);
    }
    means_[newest % capacity_] = mean;
    stds_[newest % capacity_] = sd;
  }

  Scalar direct_dot(std::size_t a, std::size_t b) const {
    Scalar acc = Scalar(0);
    for (std::size_t t = 0; t < m_; ++t) acc += at(a + t) * at(b + t);
    return acc;
  }

  // dots_[lag] = <subsequence newest, subsequence newest - lag>
  void update_dots(std::size_t newest, std::size_t oldest, Scalar evicted, bool refresh) {
    const std::size_t max_lag = newest - oldest;
    if (newest == 0 || refresh) {
      for (std::size_t lag = 0; lag <= max_lag; ++lag) dots_[lag] = direct_dot(newest, newest - lag);
      return;
    }
    const Scalar head_out = at(newest - 1);
    const Scalar head_in = at(newest + m_ - 1);
    // lags 1 .. max_lag-1 touch samples j-1 and j+m-1, both still resident
    std::size_t slot_out = (newest + capacity_ - 2) % capacity_;
    std::size_t slot_in = (newest + m_ - 2) % capacity_;
    for (std::size_t lag = 1; lag < max_lag; ++lag) {
      dots_[lag] += head_in * samples_[slot_in] - head_out * samples_[slot_out];
      slot_out = slot_out == 0 ? capacity_ - 1 : slot_out - 1;
      slot_in = slot_in == 0 ? capacity_ - 1 : slot_in - 1;
    }
    if (oldest == 0) {
      dots_[max_lag] = direct_dot(newest, 0);
    } else {
      // j = oldest; sample j-1 was overwritten by this append
      dots_[max_lag] += head_in * at(oldest + m_ - 1) - head_out * evicted;
    }
    dots_[0] = direct_dot(newest, newest);
  }


  std::size_t m_;
  std::size_t capacity_;
  ExclusionZone ez_;
  bool update_history_;

  std::vector<Scalar> samples_;
  std::vector<Scalar> means_;
  std::vector<Scalar> stds_;
  std::vector<Scalar> left_distance_;
  std::vector<std::int64_t> left_index_;
  std::vector<Scalar> dots_;

  Scalar offset_ = Scalar(0);
  Scalar last_sample_ = Scalar(0);
  Scalar window_sum_ = Scalar(0);
  Scalar window_sum_sq_ = Scalar(0);
  std::size_t trailing_equal_ = 0;
  std::size_t count_ = 0;
  std::size_t peak_resident_ = 0;
};

}  // namespace mpstream
