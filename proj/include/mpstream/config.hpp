#pragma once

// Flat `key = value` run configuration. Lines starting with '#' are
// comments; unknown or repeated keys are errors.

#include "mpstream/detector.hpp"
#include "mpstream/signal_gen.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpstream {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DatasetKind { kFourFault, kSingleFault };

struct RunConfig {
  GeneratorConfig generator;
  DatasetKind dataset = DatasetKind::kFourFault;
  FourFaultLayout layout;
  FaultSpec fault{FaultKind::kPointOutlier, 10.0, 0.02, 1.0};  // used by single-fault datasets
  DetectorConfig detector;
  unsigned threads = 1;

  /// Checks generator, layout and detector settings; throws ConfigError.
  void validate() const;
};

/// Every key the parser accepts, in documentation order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Generates the dataset the configuration describes.
LabeledDataset generate_dataset(const RunConfig& config);

}  // namespace mpstream
