#include "mpstream/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mpstream {

namespace {

void check_range(std::span<const AnomalySegment> segments, std::size_t n, const char* what) {
  for (const auto& s : segments) {
    if (s.start >= s.end || s.end > n) {
      throw std::invalid_argument(std::string(what) + " segment [" + std::to_string(s.start) + ", " +
                                  std::to_string(s.end) + ") is empty or outside [0, " + std::to_string(n) + ")");
    }
  }
}

std::vector<char> rasterize(std::span<const AnomalySegment> segments, std::size_t n) {
  std::vector<char> mask(n, 0);
  for (const auto& s : segments) std::fill(mask.begin() + static_cast<std::ptrdiff_t>(s.start),
                                           mask.begin() + static_cast<std::ptrdiff_t>(s.end), 1);
  return mask;
}

std::size_t overlap(const AnomalySegment& a, const AnomalySegment& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

std::vector<AnomalySegment> sorted(std::span<const AnomalySegment> segments) {
  std::vector<AnomalySegment> out(segments.begin(), segments.end());
  std::sort(out.begin(), out.end(), [](const AnomalySegment& a, const AnomalySegment& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  return out;
}

std::vector<AnomalySegment> clip(std::span<const AnomalySegment> segments, std::size_t lo, std::size_t hi) {
  std::vector<AnomalySegment> out;
  for (const auto& s : segments) {
    const std::size_t a = std::max(s.start, lo);
    const std::size_t b = std::min(s.end, hi);
    if (a < b) out.push_back({a - lo, b - lo, s.label});
  }
  return out;
}

std::string fixed3(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

}  // namespace

ConfusionCounts point_confusion(std::span<const AnomalySegment> pred, std::span<const AnomalySegment> truth,
                                std::size_t n) {
  check_range(pred, n, "predicted");
  check_range(truth, n, "truth");
  const auto p = rasterize(pred, n);
  const auto t = rasterize(truth, n);
  ConfusionCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] && t[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (t[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  // every ratio is formed as one integer quotient so exact rationals round once
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && c.tp > 0) {
    m.f_score = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  }
  return m;
}

SegmentReport segment_score(std::span<const AnomalySegment> pred_in, std::span<const AnomalySegment> truth_in,
                            std::size_t n, const SegmentScoreOptions& opts) {
  check_range(pred_in, n, "predicted");
  check_range(truth_in, n, "truth");
  const auto pred = sorted(pred_in);
  const auto truth = sorted(truth_in);

  std::vector<std::optional<std::size_t>> first_start(truth.size());
  std::vector<std::optional<std::size_t>> last_end(truth.size());
  SegmentReport report;
  for (const auto& p : pred) {
    std::optional<std::size_t> best;
    std::size_t best_overlap = 0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const std::size_t ov = overlap(p, truth[t]);
      if (ov == 0) continue;
      const double iou = static_cast<double>(ov) / static_cast<double>(p.length() + truth[t].length() - ov);
      if (iou < opts.min_iou) continue;
      if (ov > best_overlap) {
        best_overlap = ov;
        best = t;
      }
    }
    if (!best) {
      ++report.false_segments;
      continue;
    }
    const std::size_t t = *best;
    first_start[t] = first_start[t] ? std::min(*first_start[t], p.start) : p.start;
    last_end[t] = last_end[t] ? std::max(*last_end[t], p.end) : p.end;
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!first_start[t]) {
      ++report.missed;
      continue;
    }
    ++report.detected;
    report.matches.push_back({t,
                              static_cast<std::int64_t>(*first_start[t]) - static_cast<std::int64_t>(truth[t].start),
                              static_cast<std::int64_t>(*last_end[t]) - static_cast<std::int64_t>(truth[t].end)});
  }
  return report;
}

EvaluationReport evaluate(std::span<const AnomalySegment> pred_in, std::span<const AnomalySegment> truth_in,
                          std::size_t n, const SegmentScoreOptions& opts) {
  check_range(pred_in, n, "predicted");
  check_range(truth_in, n, "truth");
  const auto pred = sorted(pred_in);
  const auto truth = sorted(truth_in);

  EvaluationReport report;
  report.truth_segments = truth.size();
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const std::size_t lo = t == 0 ? 0 : (truth[t - 1].end + truth[t].start) / 2;
    const std::size_t hi = t + 1 == truth.size() ? n : (truth[t].end + truth[t + 1].start) / 2;
    const auto region_pred = clip(pred, lo, hi);
    const auto region_truth = clip(std::span(truth).subspan(t, 1), lo, hi);

    FaultRow row;
    row.fault = truth[t].label.empty() ? "segment " + std::to_string(t) : truth[t].label;
    row.start = lo;
    row.end = hi;
    const SegmentReport seg = segment_score(region_pred, region_truth, hi - lo, opts);
    row.detected = seg.detected;
    row.false_segments = seg.false_segments;
    if (!seg.matches.empty()) {
      row.start_latency = seg.matches.front().start_latency;
      row.end_latency = seg.matches.front().end_latency;
    }
    row.counts = point_confusion(region_pred, region_truth, hi - lo);
    row.scores = metrics(row.counts);
    report.rows.push_back(std::move(row));
  }

  FaultRow all;
  all.fault = "overall";
  all.start = 0;
  all.end = n;
  const SegmentReport seg = segment_score(pred, truth, n, opts);
  all.detected = seg.detected;
  all.false_segments = seg.false_segments;
  all.counts = point_confusion(pred, truth, n);
  all.scores = metrics(all.counts);
  report.rows.push_back(std::move(all));
  return report;
}

std::string render_table(std::span<const FaultRow> rows) {
  const std::vector<std::string> header{"Fault", "Accuracy", "Precision", "Recall", "F-score"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    cells.push_back({r.fault, fixed3(r.scores.accuracy), fixed3(r.scores.precision), fixed3(r.scores.recall),
                     fixed3(r.scores.f_score)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c == 0) {
        out << line[c] << std::string(width[c] - line[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_report(const EvaluationReport& report) {
  const FaultRow& all = report.overall();
  std::ostringstream out;
  out << all.detected << "/" << report.truth_segments << " segments detected, " << all.false_segments
      << " false segments\n";
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const FaultRow& r = report.rows[i];
    out << "  " << r.fault << ": ";
    if (r.detected) {
      out << "start latency " << *r.start_latency << ", end latency " << *r.end_latency << " samples";
    } else {
      out << "missed";
    }
    if (r.false_segments) out << ", " << r.false_segments << " false segments";
    out << '\n';
  }
  out << '\n' << render_table(report.rows);
  return out.str();
}

}  // namespace mpstream
