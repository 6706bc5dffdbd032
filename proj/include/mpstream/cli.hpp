#pragma once

#include "mpstream/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace mpstream::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,  // bad arguments or configuration
  kDataError = 2,   // unreadable, malformed or inconsistent data; I/O failures
};

struct GenerateArgs {
  std::string out;
  std::optional<std::string> truth_out;  // defaults to <out stem>.truth.csv
};

struct DetectArgs {
  std::string in;
  std::string out;
  std::optional<std::string> profile_out;  // defaults to <out stem>.profile.csv
};

struct EvaluateArgs {
  std::string events;
  std::string truth;
  std::size_t n = 0;
  std::optional<std::string> out;  // report CSV
};

struct ProfileArgs {
  std::string in;
  std::string out;
  std::size_t discords = 3;
  std::optional<std::size_t> exclusion_radius;
};

/// Path with its extension replaced by `suffix` (e.g. ".truth.csv").
std::string sibling_path(const std::string& path, const std::string& suffix);

void cmd_generate(const RunConfig& config, const GenerateArgs& args, std::ostream& log);
void cmd_detect(const RunConfig& config, const DetectArgs& args, std::ostream& log);
void cmd_evaluate(const EvaluateArgs& args, std::ostream& out);
void cmd_profile(const RunConfig& config, const ProfileArgs& args, std::ostream& out);

/// Parses argv, dispatches a subcommand and maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpstream::cli
