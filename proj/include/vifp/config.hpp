#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vifp/problems.hpp"
#include "vifp/schemes.hpp"

namespace vifp {

using Json = nlohmann::ordered_json;

// JSON <-> domain types. Matrices are row-major lists of rows.
Json set_to_json(const ConvexSet& c);
ConvexSet set_from_json(const Json& j);
Json mapping_to_json(const PointMapping& m);
PointMapping mapping_from_json(const Json& j);
Json operator_to_json(const IsmOperator& a);
IsmOperator operator_from_json(const Json& j);
Json family_to_json(const WMapping& w);
WMapping family_from_json(const Json& j, std::size_t dim);
Json schedule_to_json(const ParamSchedule& s);
ParamSchedule schedule_from_json(const Json& j);
Json scheme_to_json(const SchemeSpec& s);
SchemeSpec scheme_from_json(const Json& j);

struct CliOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct ExperimentConfig {
  ProblemInstance problem;
  std::vector<SchemeSpec> schemes;
  StopRule stop;
  std::string output_dir = "out";
  bool compare = false;
  bool oracle = true;  // compute the oracle point and record dist_to_oracle
  std::optional<Vec> x0;
  std::uint64_t seed = 0;
  Json resolved;  // echo of the fully resolved configuration
};

/// Parses and resolves a config file (generators invoked, defaults filled).
/// Throws ConfigError with line/field diagnostics on malformed input.
ExperimentConfig load_experiment(const std::string& path, const CliOverrides& over = {});

/// Runs every scheme of the config, writing one trace CSV per scheme, the
/// config echo, and (with compare) summary.csv plus an aligned text table.
/// Exit status: 0 all schemes converged, 2 any max-iteration termination,
/// 1 any error (parse, corridor, certification). Scheme-level failures do not
/// abort sibling schemes.
int run_experiment(const std::string& path, const CliOverrides& over = {});

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> lines;
};

/// Dry run: parse, certify operators and families, check corridors against
/// the certified constants, and print resolved schedules. No iteration.
ValidationReport validate_config(const std::string& path, const CliOverrides& over = {});

/// Write-temp-then-rename file write.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vifp
