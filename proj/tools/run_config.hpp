#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rhstrng/pvt_sweep.hpp"
#include "rhstrng/randomness_tests.hpp"
#include "rhstrng/system_model.hpp"
#include "rhstrng/trng_core.hpp"

namespace rhstrng::cli {

/// Bad flags, malformed or unknown config, missing input files. Exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run can be configured with. Command-line flags are applied
/// on top of the loaded file.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  GeneratorConfig generator;
  Environment environment;
  SweepSpec sweep;
  OptionSpec option;
  CostModel cost;
  PipelineConfig pipeline;
  std::map<BackendKind, RngBackend> backends;
  NistOptions nist;

  RunConfig();
  const RngBackend& backend(BackendKind k) const { return backends.at(k); }
  void validate() const;  ///< throws UsageError
};

/// Merges a JSON document into `rc`. Unknown keys and wrong types throw UsageError.
void apply_config(const nlohmann::json& doc, RunConfig& rc);

/// Loads `path`, or the file named by RHSTRNG_CONFIG when `path` is empty.
/// Returns defaults when neither is given.
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& rc);

}  // namespace rhstrng::cli
