#include "mpstream/detector.hpp"
#include "mpstream/eval.hpp"
#include "mpstream/signal_gen.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mpstream;

namespace {

std::vector<double> noisy_sine(std::size_t n, std::uint64_t seed, double noise = 0.01) {
  auto x = oracle::noise(n, seed, noise);
  for (std::size_t i = 0; i < n; ++i) x[i] += std::sin(2.0 * M_PI * static_cast<double>(i) / 20.0);
  return x;
}

// Random series with occasional bursts; used by the property tests.
std::vector<double> bursty(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto x = noisy_sine(n, seed, 0.05);
  std::uniform_int_distribution<std::size_t> at(0, n - 1);
  for (int b = 0; b < 8; ++b) {
    const std::size_t s = at(rng);
    const std::size_t len = 1 + rng() % 30;
    const double amp = 0.5 + static_cast<double>(rng() % 100) / 25.0;
    for (std::size_t i = s; i < std::min(n, s + len); ++i) x[i] += amp * ((i - s) % 3 == 0 ? 1.0 : -0.5);
  }
  return x;
}

// Long enough that every subsequence has a full period behind it.
constexpr std::size_t kWarmup = 100;

DetectorConfig small_config(double threshold) {
  DetectorConfig c;
  c.window = WindowSize(16);
  c.warmup = kWarmup;
  c.capacity = 1024;
  c.threshold = FixedThreshold{threshold};
  return c;
}

std::vector<DetectionEvent> run(const DetectorConfig& c, const std::vector<double>& x) {
  return detect_all(c, std::span<const double>(x));
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("config validation") {
  DetectorConfig c;
  CHECK_NOTHROW(c.validate());
  c.enter_ratio = 0.9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.exit_ratio = 1.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.min_event_len = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.threshold = QuantileThreshold{1.0, 2000};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.threshold = QuantileThreshold{0.99, 100};  // ends before the warm-up
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.capacity = 100;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Detector{c}, std::invalid_argument);
}

TEST_CASE("calibrate_threshold examples") {
  CHECK(calibrate_threshold(std::vector<double>{1, 2, 3, 4}, 0.5) == 2.5);
  for (double q : {0.01, 0.5, 0.999}) CHECK(calibrate_threshold(std::vector<double>{5, 5, 5}, q) == 5.0);
  CHECK(calibrate_threshold(std::vector<double>{4, 1, INFINITY, 3, 2}, 0.5) == 2.5);
  // h = 0.9 * 9 = 8.1 over 0..9
  std::vector<double> ten{9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
  CHECK(calibrate_threshold(ten, 0.9) == doctest::Approx(8.1).epsilon(1e-15));
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>{INFINITY, INFINITY}, 0.5), CalibrationError);
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("events_to_segments examples") {
  using E = DetectionEvent;
  CHECK(events_to_segments(std::vector<E>{}, 10).empty());
  const std::vector<E> one{{EventKind::kAnomalyStart, 10, 1}, {EventKind::kAnomalyEnd, 20, 1}};
  CHECK(events_to_segments(one, 50) == std::vector<AnomalySegment>{{10, 20, {}}});
  const std::vector<E> open{{EventKind::kAnomalyStart, 10, 1}, {EventKind::kAnomalyEnd, 20, 1},
                            {EventKind::kAnomalyStart, 30, 1}};
  CHECK(events_to_segments(open, 50) == std::vector<AnomalySegment>{{10, 20, {}}, {30, 50, {}}});

  const std::vector<E> two_starts{{EventKind::kAnomalyStart, 10, 1}, {EventKind::kAnomalyStart, 12, 1}};
  CHECK_THROWS_AS(events_to_segments(two_starts, 50), std::invalid_argument);
  const std::vector<E> lone_end{{EventKind::kAnomalyEnd, 10, 1}};
  CHECK_THROWS_AS(events_to_segments(lone_end, 50), std::invalid_argument);
  const std::vector<E> backwards{{EventKind::kAnomalyStart, 10, 1}, {EventKind::kAnomalyEnd, 10, 1}};
  CHECK_THROWS_AS(events_to_segments(backwards, 50), std::invalid_argument);
}

TEST_CASE("periodic stream with quantile threshold emits nothing") {
  std::vector<double> x(6000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 25.0);
  DetectorConfig c;
  CHECK(run(c, x).empty());
}

TEST_CASE("one spike with a fixed threshold is bracketed by one event pair") {
  const std::size_t m = 16, radius = 4, spike = 600;
  auto x = noisy_sine(900, 3);
  x[spike] += 3.0;

  // Hand-apply the filter chain to the oracle's left profile.
  const auto ref = oracle::profile(x, m, radius, true);
  double normal_max = 0, spike_min = INFINITY;
  for (std::size_t i = 0; i < ref.d.size(); ++i) {
    if (i + m - 1 < kWarmup || ref.idx[i] < 0) continue;
    const bool covers = i <= spike && spike < i + m;
    if (covers) spike_min = std::min(spike_min, ref.d[i]);
    else normal_max = std::max(normal_max, ref.d[i]);
  }
  const double threshold = normal_max * 1.05;
  REQUIRE(threshold < spike_min);

  DetectorConfig c = small_config(threshold);
  c.min_event_len = 1;
  const auto events = run(c, x);
  REQUIRE(events.size() == 2);
  CHECK(events[0].kind == EventKind::kAnomalyStart);
  CHECK(events[1].kind == EventKind::kAnomalyEnd);

  std::size_t expect_start = 0;
  while (!(ref.d[expect_start] > threshold && expect_start + m - 1 >= kWarmup)) ++expect_start;
  std::size_t expect_end = expect_start + 1;
  while (!(ref.d[expect_end] < threshold * c.exit_ratio)) ++expect_end;
  CHECK(events[0].position == expect_start);
  CHECK(events[1].position == expect_end);
  CHECK(events[0].profile_value == doctest::Approx(ref.d[expect_start]).epsilon(1e-9));
  CHECK(events[0].position <= spike);
  CHECK(events[1].position > spike);
}

TEST_CASE("warm-up values are ignored") {
  // every window holding sample 60 completes before the warm-up ends
  auto early = noisy_sine(400, 8);
  early[60] += 5.0;
  CHECK(run(small_config(1.0), early).empty());
  auto late = noisy_sine(400, 8);
  late[200] += 5.0;
  CHECK(run(small_config(1.0), late).size() == 2);
}

TEST_CASE("non-finite sample leaves the detector unchanged") {
  Detector a(small_config(1.0)), b(small_config(1.0));
  const auto x = noisy_sine(200, 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == 100) CHECK_THROWS_AS(a.step(NAN), std::invalid_argument);
    CHECK(a.step(x[i]) == b.step(x[i]));
  }
  CHECK(a.samples_seen() == b.samples_seen());
}

TEST_CASE("alternation, ordering, debounce and causality on random inputs") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto x = bursty(2500, seed);
    DetectorConfig c = small_config(1.0 + static_cast<double>(seed % 5) * 0.5);
    c.min_event_len = 1 + seed % 4;
    c.cooldown = seed % 3 == 0 ? 0 : 8 * (seed % 3);
    Detector d(c);
    std::vector<DetectionEvent> all;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto step = d.step(x[i]);
      CHECK(step.size() <= 2);
      for (const auto& e : step) CHECK(e.position <= i);
      all.insert(all.end(), step.begin(), step.end());
    }
    for (std::size_t k = 0; k < all.size(); ++k) {
      CHECK(all[k].kind == (k % 2 == 0 ? EventKind::kAnomalyStart : EventKind::kAnomalyEnd));
      if (k > 0) CHECK(all[k].position > all[k - 1].position);
      if (k % 2 == 1) CHECK(all[k].position - all[k - 1].position >= c.min_event_len);
    }
    CHECK_NOTHROW(events_to_segments(all, x.size()));
  }
}

TEST_CASE("raising enter_ratio never adds starts") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = bursty(2000, 100 + seed);
    std::size_t previous = SIZE_MAX;
    for (double ratio : {1.0, 1.2, 1.5, 2.0, 3.0}) {
      DetectorConfig c = small_config(1.5);
      c.enter_ratio = ratio;
      const auto events = run(c, x);
      const auto starts = static_cast<std::size_t>(std::count_if(
          events.begin(), events.end(), [](const DetectionEvent& e) { return e.kind == EventKind::kAnomalyStart; }));
      CHECK(starts <= previous);
      previous = starts;
    }
  }
}

TEST_CASE("cooldown suppresses immediate re-entry") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = bursty(2000, 300 + seed);
    DetectorConfig c = small_config(1.0);
    c.cooldown = 40;
    const auto events = run(c, x);
    for (std::size_t k = 2; k < events.size(); k += 2) {
      // each value maps to one position, so a start follows an end by at least cooldown + 1
      CHECK(events[k].position > events[k - 1].position + 40);
    }
  }
}

TEST_CASE("calibrated threshold sits below every fault peak") {
  const auto ds = gen_four_fault_dataset(GeneratorConfig{});
  Detector d{DetectorConfig{}};
  std::vector<double> profile(ds.channel.size(), 0.0);
  for (std::size_t i = 0; i < ds.channel.size(); ++i) {
    d.step(ds.channel[i]);
    if (const auto& u = d.last_update()) profile[u->position] = u->distance;
  }
  REQUIRE(d.threshold());
  for (const auto& seg : ds.truth) {
    double peak = 0;
    for (std::size_t p = seg.start - 63; p < seg.end; ++p) peak = std::max(peak, profile[p]);
    CHECK(peak > *d.threshold());
  }
}

TEST_CASE("four-fault dataset yields four overlapping pairs") {
  const auto ds = gen_four_fault_dataset(GeneratorConfig{});
  const auto events = detect_all(DetectorConfig{}, std::span<const double>(ds.channel.samples().data(), ds.channel.size()));
  const auto pred = events_to_segments(events, ds.channel.size());
  REQUIRE(pred.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(pred[k].start < ds.truth[k].end);
    CHECK(ds.truth[k].start < pred[k].end);
  }
}

}  // TEST_SUITE
