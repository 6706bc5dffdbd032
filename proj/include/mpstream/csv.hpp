#pragma once

// CSV readers and writers for datasets, truth sidecars, events, profile
// traces, batch profiles and evaluation reports.

#include "mpstream/detector.hpp"
#include "mpstream/eval.hpp"
#include "mpstream/signal_gen.hpp"
#include "mpstream/types.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpstream {

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows of a `t_s,f_c_hz,label` file.
struct DatasetTable {
  std::vector<double> t_s;
  std::vector<double> values;
  std::vector<std::string> labels;

  std::size_t size() const { return values.size(); }
};

// Floats in dataset files carry 9 significant digits.
void write_dataset(std::ostream& out, const LabeledDataset& dataset);
DatasetTable read_dataset(std::istream& in);

/// Truth segments rebuilt from the label column (maximal runs of one label).
std::vector<AnomalySegment> segments_from_labels(const DatasetTable& table);

void write_truth(std::ostream& out, const std::vector<AnomalySegment>& truth);
std::vector<AnomalySegment> read_truth(std::istream& in);

std::string_view to_string(EventKind kind);
void write_events(std::ostream& out, const std::vector<DetectionEvent>& events);
std::vector<DetectionEvent> read_events(std::istream& in);

/// `t_s,f_c_hz,label,profile`; profile[i] is the value of the subsequence
/// starting at row i, empty where none was produced.
void write_profile_trace(std::ostream& out, const DatasetTable& table, const std::vector<std::optional<double>>& profile);

/// `index,distance,neighbor`; entries without a neighbor have empty fields.
void write_matrix_profile(std::ostream& out, const MatrixProfile<double>& profile);

void write_report(std::ostream& out, const EvaluationReport& report);
EvaluationReport read_report(std::istream& in);

/// Shortest decimal text that parses back to exactly v.
std::string format_exact(double v);

}  // namespace mpstream
