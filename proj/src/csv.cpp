#include "mpstream/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace mpstream {

namespace {

constexpr std::string_view kDatasetHeader = "t_s,f_c_hz,label";
constexpr std::string_view kTruthHeader = "start_idx,end_idx,label";
constexpr std::string_view kEventsHeader = "kind,position,profile_value";
constexpr std::string_view kTraceHeader = "t_s,f_c_hz,label,profile";
constexpr std::string_view kProfileHeader = "index,distance,neighbor";
constexpr std::string_view kReportHeader =
    "fault,start_idx,end_idx,detected,false_segments,start_latency,end_latency,tp,fp,fn,tn,accuracy,precision,"
    "recall,f_score";

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view header, std::string_view what) : in_(in), what_(what) {
    std::string line;
    if (!next_line(line)) throw DataError(std::string(what_) + ": empty input, expected header '" + std::string(header) + "'");
    if (line != header) {
      throw DataError(std::string(what_) + ": line 1: expected header '" + std::string(header) + "', got '" + line + "'");
    }
  }

  /// Splits the next non-empty line into fields; false at end of input.
  bool next(std::size_t expected_fields) {
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      current_ = std::move(line);
      fields_.clear();
      std::size_t from = 0;
      while (true) {
        const std::size_t comma = current_.find(',', from);
        fields_.emplace_back(std::string_view(current_).substr(from, comma - from));
        if (comma == std::string::npos) break;
        from = comma + 1;
      }
      if (fields_.size() != expected_fields) {
        fail("expected " + std::to_string(expected_fields) + " fields, got " + std::to_string(fields_.size()));
      }
      return true;
    }
    return false;
  }

  std::string_view field(std::size_t i) const { return fields_[i]; }

  double number(std::size_t i) const {
    double v = 0.0;
    const auto f = fields_[i];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
      fail("field " + std::to_string(i + 1) + " is not a finite number: '" + std::string(f) + "'");
    }
    return v;
  }

  std::optional<double> optional_number(std::size_t i) const {
    if (fields_[i].empty()) return std::nullopt;
    return number(i);
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    Int v{};
    const auto f = fields_[i];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      fail("field " + std::to_string(i + 1) + " is not an integer: '" + std::string(f) + "'");
    }
    return v;
  }

  template <typename Int>
  std::optional<Int> optional_integer(std::size_t i) const {
    if (fields_[i].empty()) return std::nullopt;
    return integer<Int>(i);
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError(std::string(what_) + ": row " + std::to_string(line_no_) + ": " + message);
  }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::istream& in_;
  std::string_view what_;
  std::size_t line_no_ = 0;
  std::string current_;
  std::vector<std::string_view> fields_;
};

std::string optional_text(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

template <typename Int>
std::string optional_text(const std::optional<Int>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

std::string format_exact(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const LabeledDataset& dataset) {
  out << kDatasetHeader << '\n';
  const auto& ch = dataset.channel;
  auto seg = dataset.truth.begin();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    while (seg != dataset.truth.end() && seg->end <= i) ++seg;
    const bool labeled = seg != dataset.truth.end() && seg->start <= i;
    out << format9(ch.time_at(i)) << ',' << format9(ch[i]) << ',' << (labeled ? seg->label : std::string()) << '\n';
  }
}

DatasetTable read_dataset(std::istream& in) {
  CsvReader reader(in, kDatasetHeader, "dataset");
  DatasetTable table;
  while (reader.next(3)) {
    table.t_s.push_back(reader.number(0));
    table.values.push_back(reader.number(1));
    table.labels.emplace_back(reader.field(2));
  }
  return table;
}

std::vector<AnomalySegment> segments_from_labels(const DatasetTable& table) {
  std::vector<AnomalySegment> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string& label = table.labels[i];
    if (label.empty()) continue;
    if (!out.empty() && out.back().end == i && out.back().label == label) {
      ++out.back().end;
    } else {
      out.push_back({i, i + 1, label});
    }
  }
  return out;
}

void write_truth(std::ostream& out, const std::vector<AnomalySegment>& truth) {
  out << kTruthHeader << '\n';
  for (const auto& s : truth) out << s.start << ',' << s.end << ',' << s.label << '\n';
}

std::vector<AnomalySegment> read_truth(std::istream& in) {
  CsvReader reader(in, kTruthHeader, "truth");
  std::vector<AnomalySegment> out;
  while (reader.next(3)) {
    AnomalySegment s{reader.integer<std::size_t>(0), reader.integer<std::size_t>(1), std::string(reader.field(2))};
    if (s.start >= s.end) reader.fail("segment start must be before end");
    out.push_back(std::move(s));
  }
  return out;
}

std::string_view to_string(EventKind kind) {
  return kind == EventKind::kAnomalyStart ? "AnomalyStart" : "AnomalyEnd";
}

void write_events(std::ostream& out, const std::vector<DetectionEvent>& events) {
  out << kEventsHeader << '\n';
  for (const auto& e : events) {
    out << to_string(e.kind) << ',' << e.position << ',' << format_exact(e.profile_value) << '\n';
  }
}

std::vector<DetectionEvent> read_events(std::istream& in) {
  CsvReader reader(in, kEventsHeader, "events");
  std::vector<DetectionEvent> out;
  while (reader.next(3)) {
    DetectionEvent e{};
    if (reader.field(0) == "AnomalyStart") {
      e.kind = EventKind::kAnomalyStart;
    } else if (reader.field(0) == "AnomalyEnd") {
      e.kind = EventKind::kAnomalyEnd;
    } else {
      reader.fail("unknown event kind '" + std::string(reader.field(0)) + "'");
    }
    e.position = reader.integer<std::size_t>(1);
    e.profile_value = reader.number(2);
    out.push_back(e);
  }
  return out;
}

void write_profile_trace(std::ostream& out, const DatasetTable& table,
                         const std::vector<std::optional<double>>& profile) {
  out << kTraceHeader << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << format9(table.t_s[i]) << ',' << format9(table.values[i]) << ',' << table.labels[i] << ',';
    if (i < profile.size() && profile[i]) out << format9(*profile[i]);
    out << '\n';
  }
}

void write_matrix_profile(std::ostream& out, const MatrixProfile<double>& profile) {
  out << kProfileHeader << '\n';
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << i << ',';
    if (profile.has_neighbor(i)) {
      out << format_exact(profile.distances(static_cast<Eigen::Index>(i))) << ','
          << profile.indices(static_cast<Eigen::Index>(i));
    } else {
      out << ',';
    }
    out << '\n';
  }
}

void write_report(std::ostream& out, const EvaluationReport& report) {
  out << kReportHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.fault << ',' << r.start << ',' << r.end << ',' << r.detected << ',' << r.false_segments << ','
        << optional_text(r.start_latency) << ',' << optional_text(r.end_latency) << ',' << r.counts.tp << ','
        << r.counts.fp << ',' << r.counts.fn << ',' << r.counts.tn << ',' << optional_text(r.scores.accuracy) << ','
        << optional_text(r.scores.precision) << ',' << optional_text(r.scores.recall) << ','
        << optional_text(r.scores.f_score) << '\n';
  }
}

EvaluationReport read_report(std::istream& in) {
  CsvReader reader(in, kReportHeader, "report");
  EvaluationReport report;
  while (reader.next(15)) {
    FaultRow r;
    r.fault = std::string(reader.field(0));
    r.start = reader.integer<std::size_t>(1);
    r.end = reader.integer<std::size_t>(2);
    r.detected = reader.integer<std::size_t>(3);
    r.false_segments = reader.integer<std::size_t>(4);
    r.start_latency = reader.optional_integer<std::int64_t>(5);
    r.end_latency = reader.optional_integer<std::int64_t>(6);
    r.counts = {reader.integer<std::size_t>(7), reader.integer<std::size_t>(8), reader.integer<std::size_t>(9),
                reader.integer<std::size_t>(10)};
    r.scores = {reader.optional_number(11), reader.optional_number(12), reader.optional_number(13),
                reader.optional_number(14)};
    report.rows.push_back(std::move(r));
  }
  if (report.rows.empty() || report.rows.back().fault != "overall") {
    throw DataError("report: missing trailing 'overall' row");
  }
  report.truth_segments = report.rows.size() - 1;
  return report;
}

}  // namespace mpstream
