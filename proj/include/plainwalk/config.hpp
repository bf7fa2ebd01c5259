#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "plainwalk/kernel.hpp"

namespace plainwalk {

using Json = nlohmann::ordered_json;

struct SolverConfig {
  double tol = 1e-12;
  long max_iter = 1000000;
};

struct McConfig {
  long n_paths = 20000;
  long horizon = 2000;
  std::uint64_t seed = 12345;
  int nu_depth = 0;  // 0 = adaptive
  long nu_samples = 100000;
  long perm_size = 100000;
  long logp_horizon = 10;
  long logp_samples = 100000;
  int threads = 0;  // 0 = PLAINWALK_THREADS or hardware
};

struct RunConfig {
  std::shared_ptr<const PlainGroup> group;
  std::optional<ScalarWalkSpec> scalar;
  std::optional<ColoredKernel> colored;
  SolverConfig solver;
  McConfig mc;
  std::string out_dir = "out";
  std::string preset_name;

  bool is_scalar() const { return scalar.has_value(); }
};

// Strict parse: unknown keys anywhere are rejected with ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config_file(const std::string& path);

// Built-in instances; spec is a name optionally followed by key=value
// tokens, e.g. "application-sec6 L=3 k1=2 k2=2".
RunConfig preset_config(const std::string& spec);
std::vector<std::string> preset_names();

Json group_to_json(const PlainGroup& g);
Json scalar_walk_to_json(const ScalarWalkSpec& w);
Json colored_walk_to_json(const ColoredKernel& k);
Json config_to_json(const RunConfig& c);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols, const std::string& where);

}  // namespace plainwalk
