#pragma once

// Reference implementations written straight from the definitions, with
// plain loops and no shared code paths with the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

struct Profile {
  std::vector<double> d;
  std::vector<std::int64_t> idx;
};

inline double mean(const std::vector<double>& x, std::size_t i, std::size_t m) {
  double s = 0;
  for (std::size_t k = 0; k < m; ++k) s += x[i + k];
  return s / static_cast<double>(m);
}

inline double pstd(const std::vector<double>& x, std::size_t i, std::size_t m) {
  const double mu = mean(x, i, m);
  double s = 0;
  for (std::size_t k = 0; k < m; ++k) s += (x[i + k] - mu) * (x[i + k] - mu);
  return std::sqrt(s / static_cast<double>(m));
}

inline bool flat(const std::vector<double>& x, std::size_t i, std::size_t m) {
  for (std::size_t k = 1; k < m; ++k) {
    if (x[i + k] != x[i]) return false;
  }
  return true;
}

// z-normalized distance between x[i..i+m) and y[j..j+m)
inline double znorm(const std::vector<double>& x, std::size_t i, const std::vector<double>& y, std::size_t j,
                    std::size_t m) {
  const bool fa = flat(x, i, m), fb = flat(y, j, m);
  if (fa && fb) return 0.0;
  if (fa || fb) return std::sqrt(2.0 * static_cast<double>(m));
  const double ma = mean(x, i, m), sa = pstd(x, i, m), mb = mean(y, j, m), sb = pstd(y, j, m);
  double s = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = (x[i + k] - ma) / sa - (y[j + k] - mb) / sb;
    s += t * t;
  }
  return std::sqrt(s);
}

inline double znorm(const std::vector<double>& a, const std::vector<double>& b) {
  return znorm(a, 0, b, 0, a.size());
}

// All-pairs profile; left = only j < i.
inline Profile profile(const std::vector<double>& x, std::size_t m, std::size_t radius, bool left = false) {
  const std::size_t p = x.size() - m + 1;
  Profile out{std::vector<double>(p, std::numeric_limits<double>::infinity()), std::vector<std::int64_t>(p, -1)};
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if ((i > j ? i - j : j - i) <= radius) continue;
      if (left && j > i) continue;
      const double d = znorm(x, i, x, j, m);
      if (d < out.d[i]) {
        out.d[i] = d;
        out.idx[i] = static_cast<std::int64_t>(j);
      }
    }
  }
  return out;
}

inline std::vector<double> noise(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// True when index `got` is an acceptable neighbor of subsequence i: either
// it is the reference index or it lies at the reference distance (a tie).
inline bool neighbor_ok(const std::vector<double>& x, std::size_t m, std::size_t i, std::int64_t got,
                        std::int64_t want, double want_distance, double tol) {
  if (got == want) return true;
  if (got < 0 || want < 0) return false;
  return std::abs(znorm(x, i, x, static_cast<std::size_t>(got), m) - want_distance) <= tol;
}

}  // namespace oracle
