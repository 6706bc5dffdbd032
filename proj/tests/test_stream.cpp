#include "mpstream/stream.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mpstream;
using support::vec;

namespace {

const ProfileOptions kLeft{Metric::kZNormalized, ProfileSide::kLeft, 1};

// max |a - b| over entries where either side is finite; both-infinite
// sentinels agree, one-sided infinities count as infinite error
double max_diff(const Vector<double>& a, const Vector<double>& b) {
  double worst = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::isinf(a(i)) && std::isinf(b(i))) continue;
    worst = std::max(worst, std::abs(a(i) - b(i)));
  }
  return worst;
}

std::vector<double> tail(const std::vector<double>& x, std::size_t count, std::size_t capacity) {
  const std::size_t first = count > capacity ? count - capacity : 0;
  return {x.begin() + static_cast<std::ptrdiff_t>(first), x.begin() + static_cast<std::ptrdiff_t>(count)};
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("construction") {
  StreamingProfile<double> s(WindowSize(16), 4096);
  CHECK(s.count() == 0);
  CHECK(s.snapshot().empty());
  CHECK_THROWS_AS(StreamingProfile<double>(WindowSize(16), 20), std::invalid_argument);
  CHECK_THROWS_AS(StreamingProfile<double>(WindowSize(4), 8, ExclusionZone(4)), std::invalid_argument);
}

TEST_CASE("warm-up emits nothing until m + radius + 1 samples") {
  StreamingProfile<double> s(WindowSize(4), 8);  // radius 1
  for (double v : {0.3, 1.7, -0.4, 2.2}) CHECK_FALSE(s.append(v).has_value());
  CHECK_FALSE(s.append(0.9).has_value());
  CHECK(s.append(-1.1).has_value());
}

TEST_CASE("first value is the distance of the only valid pair") {
  const std::vector<double> x{0.3, 1.7, -0.4, 2.2, 0.9, -1.1};
  StreamingProfile<double> s(WindowSize(4), 8, ExclusionZone(1));
  std::optional<StreamingProfile<double>::Update> u;
  for (double v : x) u = s.append(v);
  REQUIRE(u);
  CHECK(u->position == 2);
  CHECK(u->neighbor == 0);
  CHECK(u->distance == doctest::Approx(oracle::znorm(x, 2, x, 0, 4)).epsilon(1e-12));
}

TEST_CASE("periodic stream gives zero profile values") {
  StreamingProfile<double> s(WindowSize(4), 64);
  int emitted = 0;
  for (int i = 0; i < 200; ++i) {
    if (auto u = s.append(i % 2)) {
      CHECK(u->distance == doctest::Approx(0.0).epsilon(1e-12));
      ++emitted;
    }
  }
  CHECK(emitted > 0);
}

TEST_CASE("non-finite sample is rejected and the stream stays usable") {
  StreamingProfile<double> a(WindowSize(4), 32), b(WindowSize(4), 32);
  const auto x = oracle::noise(40, 8);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == 20) {
      CHECK_THROWS_AS(a.append(std::nan("")), std::invalid_argument);
      CHECK_THROWS_AS(a.append(INFINITY), std::invalid_argument);
    }
    a.append(x[i]);
    b.append(x[i]);
  }
  CHECK(a.count() == b.count());
  CHECK(a.snapshot().distances == b.snapshot().distances);
}

TEST_CASE("per-append values equal the brute left profile without eviction") {
  const auto x = oracle::noise(300, 31);
  const std::size_t m = 12;
  StreamingProfile<double> s(WindowSize(m), 512);
  const auto ref = oracle::profile(x, m, s.exclusion_zone().radius, true);
  for (double v : x) {
    if (auto u = s.append(v)) {
      CHECK(std::abs(u->distance - ref.d[u->position]) < 1e-9);
      CHECK(oracle::neighbor_ok(x, m, u->position, u->neighbor, ref.idx[u->position], ref.d[u->position], 1e-9));
    }
  }
  const auto snap = s.snapshot();
  REQUIRE(snap.size() == ref.d.size());
  for (std::size_t i = 0; i < snap.size(); ++i) {
    if (ref.idx[i] < 0) {
      CHECK_FALSE(snap.has_neighbor(i));
    } else {
      CHECK(std::abs(snap.distances(i) - ref.d[i]) < 1e-9);
    }
  }
}

TEST_CASE("snapshot is independent of later appends") {
  StreamingProfile<double> s(WindowSize(8), 128);
  const auto x = oracle::noise(100, 4);
  for (double v : x) s.append(v);
  const auto snap = s.snapshot();
  const auto copy = snap;
  for (int i = 0; i < 50; ++i) s.append(i * 0.1);
  CHECK(snap.distances == copy.distances);
  CHECK(snap.indices == copy.indices);
}

TEST_CASE("eviction re-bases and keeps neighbors in window") {
  const std::size_t m = 8, cap = 96;
  const auto x = oracle::noise(cap * 4 + 37, 12);
  StreamingProfile<double> s(WindowSize(m), cap);
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.append(x[i]);
    if (i % 53 != 0 || i < cap) continue;
    const auto window = tail(x, i + 1, cap);
    CHECK(s.first_retained() == i + 1 - cap);
    CHECK(max_diff(s.retained_window(), vec(window)) < 1e-12);
    const auto snap = s.snapshot();
    const auto fresh = matrix_profile_batch(vec(window), WindowSize(m), s.exclusion_zone(), kLeft);
    REQUIRE(snap.size() == fresh.size());
    for (std::size_t r = 0; r < snap.size(); ++r) {
      if (!fresh.has_neighbor(r)) {
        CHECK_FALSE(snap.has_neighbor(r));
        continue;
      }
      REQUIRE(snap.has_neighbor(r));
      CHECK(snap.indices(r) >= 0);
      CHECK(snap.indices(r) < static_cast<std::int64_t>(r));
      CHECK(std::abs(snap.distances(r) - fresh.distances(r)) < 1e-9);
    }
  }
}

TEST_CASE("eviction with a constant stretch") {
  const std::size_t m = 6, cap = 40;
  auto x = oracle::noise(200, 13);
  for (std::size_t i = 70; i < 100; ++i) x[i] = 0.75;
  StreamingProfile<double> s(WindowSize(m), cap);
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.append(x[i]);
    if (i < cap) continue;
    const auto window = tail(x, i + 1, cap);
    const auto snap = s.snapshot();
    const auto fresh = matrix_profile_batch(vec(window), WindowSize(m), s.exclusion_zone(), kLeft);
    CHECK(max_diff(snap.distances, fresh.distances) < 1e-9);
  }
}

TEST_CASE("update_history keeps a two-sided profile of the window") {
  const auto x = oracle::noise(150, 44);
  StreamingProfile<double> s(WindowSize(8), 256, std::nullopt, true);
  for (double v : x) s.append(v);
  const auto snap = s.snapshot();
  const auto ref = oracle::profile(x, 8, s.exclusion_zone().radius);
  for (std::size_t i = 0; i < snap.size(); ++i) CHECK(std::abs(snap.distances(i) - ref.d[i]) < 1e-9);
}

TEST_CASE("memory stays bounded on a 10x capacity stream") {
  const std::size_t cap = 256;
  StreamingProfile<double> s(WindowSize(16), cap);
  const std::size_t bytes = s.buffer_bytes();
  const auto x = oracle::noise(cap * 10, 77);
  for (double v : x) {
    s.append(v);
    CHECK(s.resident_samples() <= cap);
  }
  CHECK(s.peak_resident_samples() == cap);
  CHECK(s.buffer_bytes() == bytes);
  CHECK(s.retained_window().size() == static_cast<Eigen::Index>(cap));
}

TEST_CASE("identical input gives identical snapshots") {
  const auto x = oracle::noise(700, 5);
  StreamingProfile<double> a(WindowSize(10), 200), b(WindowSize(10), 200);
  for (double v : x) {
    const auto ua = a.append(v);
    const auto ub = b.append(v);
    REQUIRE(ua.has_value() == ub.has_value());
    if (ua) CHECK(ua->distance == ub->distance);
  }
  CHECK(a.snapshot().distances == b.snapshot().distances);
  CHECK(a.snapshot().indices == b.snapshot().indices);
}

TEST_CASE("long stream stays accurate across periodic refreshes") {
  // offsets far from the first sample stress the recurrence
  const std::size_t m = 16, cap = 128;
  auto x = oracle::noise(cap * 12, 90, 0.01);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 50.0 + 1e-4 * static_cast<double>(i);
  StreamingProfile<double> s(WindowSize(m), cap);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto u = s.append(x[i]);
    if (!u || i % 97 != 0) continue;
    const auto window = tail(x, i + 1, cap);
    const std::size_t first = i + 1 - window.size();
    const std::size_t r = u->position - first;
    const auto ref = oracle::profile(window, m, s.exclusion_zone().radius, true);
    CHECK(std::abs(u->distance - ref.d[r]) < 1e-9);
  }
}

}  // TEST_SUITE
