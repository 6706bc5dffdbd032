#pragma once

// Batch Matrix Profile: rolling statistics, z-normalized distances, sliding
// dot products, the all-pairs reference profile and the diagonal-recurrence
// profile, and discord extraction.

#include "mpstream/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

namespace mpstream {

enum class Metric {
  kZNormalized,
  kEuclidean,  // raw (non-normalized) Euclidean distance
};

enum class ProfileSide {
  kTwoSided,
  kLeft,  // neighbors restricted to earlier subsequences
};

struct ProfileOptions {
  Metric metric = Metric::kZNormalized;
  ProfileSide side = ProfileSide::kTwoSided;
  unsigned threads = 1;
};

namespace detail {

template <typename Derived>
bool is_constant(const Eigen::MatrixBase<Derived>& a) {
  const auto first = a(0);
  for (Eigen::Index i = 1; i < a.size(); ++i) {
    if (a(i) != first) return false;
  }
  return true;
}

/// d^2 from the dot-product identity, clamped to [0, 4m]. A zero std marks
/// a flat subsequence.
template <typename Scalar>
inline Scalar znorm_sq_from_dot(Scalar qt, Scalar mean_a, Scalar std_a, Scalar mean_b, Scalar std_b,
                                std::size_t m) {
  const Scalar mm = static_cast<Scalar>(m);
  const bool flat_a = std_a == Scalar(0);
  const bool flat_b = std_b == Scalar(0);
  if (flat_a && flat_b) return Scalar(0);
  if (flat_a || flat_b) return Scalar(2) * mm;
  const Scalar corr = (qt - mm * mean_a * mean_b) / (mm * std_a * std_b);
  return std::clamp(Scalar(2) * mm * (Scalar(1) - corr), Scalar(0), Scalar(4) * mm);
}

template <typename Scalar>
Scalar znorm_from_dot(Scalar qt, Scalar mean_a, Scalar std_a, Scalar mean_b, Scalar std_b, std::size_t m) {
  return std::sqrt(znorm_sq_from_dot(qt, mean_a, std_a, mean_b, std_b, m));
}

template <typename Scalar>
inline Scalar euclid_sq_from_dot(Scalar qt, Scalar ssq_a, Scalar ssq_b) {
  return std::max(Scalar(0), ssq_a + ssq_b - Scalar(2) * qt);
}

/// Keeps the smaller distance; equal distances keep the lower index.
template <typename Scalar>
inline void offer(Scalar d, std::int64_t j, Scalar& best, std::int64_t& best_index) {
  if (d < best || (d == best && best_index != kNoNeighbor && j < best_index)) {
    best = d;
    best_index = j;
  }
}

}  // namespace detail

/// Mean and population std of every length-m window, O(n) via cumulative
/// sums over the mean-centered series. Windows whose samples are all equal
/// get std exactly 0; tiny negative variances clamp to 0.
template <typename Derived>
RollingStats<typename Derived::Scalar> rolling_stats(const Eigen::MatrixBase<Derived>& series, WindowSize w) {
  using Scalar = typename Derived::Scalar;
  const std::size_t n = static_cast<std::size_t>(series.size());
  w.check_fits(n);
  const std::size_t m = w.m;
  const std::size_t p = w.profile_length(n);
  const Scalar center = series.mean();

  std::vector<Scalar> sum(n + 1, Scalar(0));
  std::vector<Scalar> sum_sq(n + 1, Scalar(0));
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar c = series(static_cast<Eigen::Index>(i)) - center;
    sum[i + 1] = sum[i] + c;
    sum_sq[i + 1] = sum_sq[i] + c * c;
  }

  // equal_run[i]: length of the run of identical samples starting at i
  std::vector<std::size_t> equal_run(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) {
    if (series(static_cast<Eigen::Index>(i)) == series(static_cast<Eigen::Index>(i + 1))) {
      equal_run[i] = equal_run[i + 1] + 1;
    }
  }

  RollingStats<Scalar> stats;
  stats.means.resize(static_cast<Eigen::Index>(p));
  stats.stds.resize(static_cast<Eigen::Index>(p));
  const Scalar mm = static_cast<Scalar>(m);
  for (std::size_t i = 0; i < p; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (equal_run[i] >= m) {
      stats.means(k) = series(k);
      stats.stds(k) = Scalar(0);
      continue;
    }
    const Scalar mean_c = (sum[i + m] - sum[i]) / mm;
    const Scalar var = (sum_sq[i + m] - sum_sq[i]) / mm - mean_c * mean_c;
    stats.means(k) = mean_c + center;
    stats.stds(k) = std::sqrt(std::max(var, Scalar(0)));
  }
  return stats;
}

template <typename Scalar>
RollingStats<Scalar> rolling_stats(const TimeSeries<Scalar>& series, WindowSize w) {
  return rolling_stats(series.samples(), w);
}

/// Z-normalized Euclidean distance, evaluated directly from its definition.
/// Flat-vs-flat is 0 and flat-vs-nonflat is sqrt(2m).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar znorm_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw std::invalid_argument("znorm_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("znorm_distance: subsequences need at least 2 samples");
  }
  const Scalar mm = static_cast<Scalar>(a.size());
  const bool flat_a = detail::is_constant(a);
  const bool flat_b = detail::is_constant(b);
  if (flat_a && flat_b) return Scalar(0);
  if (flat_a || flat_b) return std::sqrt(Scalar(2) * mm);

  const Scalar mean_a = a.mean();
  const Scalar mean_b = b.mean();
  const Scalar std_a = std::sqrt((a.array() - mean_a).square().sum() / mm);
  const Scalar std_b = std::sqrt((b.array() - mean_b).square().sum() / mm);
  const Scalar d2 = (((a.array() - mean_a) / std_a) - ((b.array() - mean_b) / std_b)).square().sum();
  return std::sqrt(std::min(d2, Scalar(4) * mm));
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar euclidean_distance(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("euclidean_distance: length mismatch");
  }
  return (a - b).norm();
}

/// out[j] = sum_k query[k] * series[j + k], direct O(n m).
template <typename DerivedQ, typename DerivedS>
Vector<typename DerivedS::Scalar> sliding_dot_products(const Eigen::MatrixBase<DerivedQ>& query,
                                                       const Eigen::MatrixBase<DerivedS>& series) {
  using Scalar = typename DerivedS::Scalar;
  const Eigen::Index m = query.size();
  const Eigen::Index n = series.size();
  if (m < 1 || m > n) {
    throw std::invalid_argument("sliding_dot_products: query length must be in [1, series length]");
  }
  Vector<Scalar> out(n - m + 1);
  for (Eigen::Index j = 0; j + m <= n; ++j) {
    out(j) = query.dot(series.segment(j, m));
  }
  return out;
}

/// Reference profile: every admissible pair evaluated from the distance
/// definition. Quadratic in the number of subsequences, times m.
template <typename Derived>
MatrixProfile<typename Derived::Scalar> matrix_profile_brute(const Eigen::MatrixBase<Derived>& series, WindowSize w,
                                                            ExclusionZone ez, const ProfileOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const std::size_t n = static_cast<std::size_t>(series.size());
  w.check_fits(n);
  const std::size_t m = w.m;
  const std::size_t p = w.profile_length(n);
  const auto mi = static_cast<Eigen::Index>(m);

  // Normalize each subsequence once; distances are then plain norms of the
  // difference, the same quantity znorm_distance evaluates.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> normalized(mi, static_cast<Eigen::Index>(p));
  std::vector<bool> flat(p, false);
  for (std::size_t i = 0; i < p; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto sub = series.segment(col, mi);
    if (opts.metric == Metric::kEuclidean) {
      normalized.col(col) = sub;
      continue;
    }
    flat[i] = detail::is_constant(sub);
    if (flat[i]) {
      normalized.col(col).setZero();
      continue;
    }
    const Scalar mean = sub.mean();
    const Scalar sd = std::sqrt((sub.array() - mean).square().sum() / static_cast<Scalar>(m));
    normalized.col(col) = (sub.array() - mean) / sd;
  }

  const Scalar flat_mismatch = std::sqrt(Scalar(2) * static_cast<Scalar>(m));
  const Scalar bound_sq = Scalar(4) * static_cast<Scalar>(m);
  MatrixProfile<Scalar> profile(p);
  for (std::size_t i = 0; i < p; ++i) {
    Scalar best = no_neighbor_distance<Scalar>();
    std::int64_t best_index = kNoNeighbor;
    const std::size_t end = opts.side == ProfileSide::kLeft ? i : p;
    for (std::size_t j = 0; j < end; ++j) {
      if (ez.excludes(i, j)) continue;
      Scalar d;
      if (opts.metric == Metric::kEuclidean) {
        d = (normalized.col(static_cast<Eigen::Index>(i)) - normalized.col(static_cast<Eigen::Index>(j))).norm();
      } else if (flat[i] && flat[j]) {
        d = Scalar(0);
      } else if (flat[i] || flat[j]) {
        d = flat_mismatch;
      } else {
        const Scalar d2 = (normalized.col(static_cast<Eigen::Index>(i)) -
                           normalized.col(static_cast<Eigen::Index>(j))).squaredNorm();
        d = std::sqrt(std::min(d2, bound_sq));
      }
      if (d < best) {
        best = d;
        best_index = static_cast<std::int64_t>(j);
      }
    }
    profile.distances(static_cast<Eigen::Index>(i)) = best;
    profile.indices(static_cast<Eigen::Index>(i)) = best_index;
  }
  return profile;
}

template <typename Scalar>
MatrixProfile<Scalar> matrix_profile_brute(const TimeSeries<Scalar>& series, WindowSize w, ExclusionZone ez,
                                           const ProfileOptions& opts = {}) {
  return matrix_profile_brute(series.samples(), w, ez, opts);
}

/// O(n^2) time, O(n) extra space profile. Walks each diagonal (fixed lag
/// between the two subsequences) and updates the sliding dot product in O(1)
/// per step. Diagonals are split across threads; per-thread partial profiles
/// are merged with the same lowest-index rule, so output does not depend on
/// the thread count.
template <typename Derived>
MatrixProfile<typename Derived::Scalar> matrix_profile_batch(const Eigen::MatrixBase<Derived>& series, WindowSize w,
                                                            ExclusionZone ez, const ProfileOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const std::size_t n = static_cast<std::size_t>(series.size());
  w.check_fits(n);
  const std::size_t m = w.m;
  const std::size_t p = w.profile_length(n);
  const auto mi = static_cast<Eigen::Index>(m);

  // Both metrics are shift invariant; centering keeps the dot products small.
  const Vector<Scalar> x = series.array() - series.mean();
  const RollingStats<Scalar> stats = rolling_stats(x, w);
  Vector<Scalar> ssq;
  if (opts.metric == Metric::kEuclidean) {
    ssq.resize(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      ssq(static_cast<Eigen::Index>(i)) = x.segment(static_cast<Eigen::Index>(i), mi).squaredNorm();
    }
  }

  const std::size_t first_lag = ez.radius + 1;
  MatrixProfile<Scalar> result(p);
  if (first_lag >= p) return result;

  const bool left_only = opts.side == ProfileSide::kLeft;
  auto run_lags = [&](std::size_t offset, std::size_t stride, MatrixProfile<Scalar>& out) {
    for (std::size_t lag = first_lag + offset; lag < p; lag += stride) {
      const auto k = static_cast<Eigen::Index>(lag);
      Scalar qt = x.segment(0, mi).dot(x.segment(k, mi));
      for (Eigen::Index i = 0; i + k < static_cast<Eigen::Index>(p); ++i) {
        const Eigen::Index j = i + k;
        if (i > 0) {
          qt += x(i + mi - 1) * x(j + mi - 1) - x(i - 1) * x(j - 1);
        }
        // squared distances until the final pass
        const Scalar d = opts.metric == Metric::kEuclidean
                             ? detail::euclid_sq_from_dot(qt, ssq(i), ssq(j))
                             : detail::znorm_sq_from_dot(qt, stats.means(i), stats.stds(i), stats.means(j),
                                                         stats.stds(j), m);
        detail::offer(d, static_cast<std::int64_t>(i), out.distances(j), out.indices(j));
        if (!left_only) {
          detail::offer(d, static_cast<std::int64_t>(j), out.distances(i), out.indices(i));
        }
      }
    }
  };

  const std::size_t lags = p - first_lag;
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(lags)));
  if (threads == 1) {
    run_lags(0, 1, result);
    result.distances = result.distances.cwiseSqrt();
    return result;
  }

  std::vector<MatrixProfile<Scalar>> partial(threads, MatrixProfile<Scalar>(p));
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] { run_lags(t, threads, partial[t]); });
    }
  }
  for (const auto& part : partial) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p); ++i) {
      if (part.indices(i) == kNoNeighbor) continue;
      detail::offer(part.distances(i), part.indices(i), result.distances(i), result.indices(i));
    }
  }
  result.distances = result.distances.cwiseSqrt();
  return result;
}

template <typename Scalar>
MatrixProfile<Scalar> matrix_profile_batch(const TimeSeries<Scalar>& series, WindowSize w, ExclusionZone ez,
                                           const ProfileOptions& opts = {}) {
  return matrix_profile_batch(series.samples(), w, ez, opts);
}

template <typename Scalar>
struct Discord {
  std::size_t position;
  Scalar distance;

  bool operator==(const Discord&) const = default;
};

/// Up to k largest profile entries, each more than ez.radius away from every
/// previously chosen one. Entries without a neighbor are never chosen.
template <typename Scalar>
std::vector<Discord<Scalar>> discords(const MatrixProfile<Scalar>& profile, std::size_t k, ExclusionZone ez) {
  if (k < 1) {
    throw std::invalid_argument("discords: k must be >= 1");
  }
  std::vector<std::size_t> order;
  order.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Scalar d = profile.distances(static_cast<Eigen::Index>(i));
    if (profile.has_neighbor(i) && std::isfinite(d)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profile.distances(static_cast<Eigen::Index>(a)) > profile.distances(static_cast<Eigen::Index>(b));
  });

  std::vector<Discord<Scalar>> out;
  for (std::size_t pos : order) {
    if (out.size() == k) break;
    const bool clear = std::none_of(out.begin(), out.end(), [&](const Discord<Scalar>& d) {
      return ez.excludes(pos, d.position);
    });
    if (clear) out.push_back({pos, profile.distances(static_cast<Eigen::Index>(pos))});
  }
  return out;
}

}  // namespace mpstream
