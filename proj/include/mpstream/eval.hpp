#pragma once

// Point- and segment-level scoring of predicted anomaly segments.

#include "mpstream/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mpstream {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Each field is empty when its ratio is 0/0.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_score;

  bool operator==(const Metrics&) const = default;
};

/// Rasterizes both segment lists over n samples and counts per-sample
/// agreement. Overlapping segments within a list are merged.
ConfusionCounts point_confusion(std::span<const AnomalySegment> pred, std::span<const AnomalySegment> truth,
                                std::size_t n);

Metrics metrics(const ConfusionCounts& c);

/// Latencies are signed sample counts, predicted minus true boundary:
/// positive means late, negative early.
struct SegmentMatch {
  std::size_t truth_index = 0;
  std::int64_t start_latency = 0;
  std::int64_t end_latency = 0;

  bool operator==(const SegmentMatch&) const = default;
};

struct SegmentReport {
  std::size_t detected = 0;
  std::size_t missed = 0;
  std::size_t false_segments = 0;
  std::vector<SegmentMatch> matches;  // one per detected truth segment, in truth order

  bool operator==(const SegmentReport&) const = default;
};

struct SegmentScoreOptions {
  double min_iou = 0.0;  // 0: any overlap counts
};

/// Each predicted segment is assigned to the truth segment it overlaps most
/// (ties go to the earlier truth segment). A truth segment is detected when
/// at least one prediction is assigned to it; its latencies use the earliest
/// assigned start and the latest assigned end.
SegmentReport segment_score(std::span<const AnomalySegment> pred, std::span<const AnomalySegment> truth,
                            std::size_t n, const SegmentScoreOptions& opts = {});

/// One row of the per-fault table; also used for the overall row.
struct FaultRow {
  std::string fault;
  std::size_t start = 0;  // scored region
  std::size_t end = 0;
  std::size_t detected = 0;
  std::size_t false_segments = 0;
  std::optional<std::int64_t> start_latency;
  std::optional<std::int64_t> end_latency;
  ConfusionCounts counts;
  Metrics scores;

  bool operator==(const FaultRow&) const = default;
};

struct EvaluationReport {
  std::size_t truth_segments = 0;
  std::vector<FaultRow> rows;  // per-fault rows followed by the "overall" row

  const FaultRow& overall() const { return rows.back(); }
  bool operator==(const EvaluationReport&) const = default;
};

/// Splits [0, n) into one region per truth segment (boundaries halfway
/// between neighbouring segments) and scores each region separately, plus an
/// overall row over the whole stream.
EvaluationReport evaluate(std::span<const AnomalySegment> pred, std::span<const AnomalySegment> truth, std::size_t n,
                          const SegmentScoreOptions& opts = {});

/// Aligned plain-text table: Fault, Accuracy, Precision, Recall, F-score.
std::string render_table(std::span<const FaultRow> rows);

/// Segment summary lines followed by the table.
std::string render_report(const EvaluationReport& report);

}  // namespace mpstream
