#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bcvsc {

// Default axes for the estimate command.
std::vector<double> default_xi_values();     // 1e-14, 6.3e-13, 1e-12, 2.5e-9
std::vector<double> default_gamma_values();  // log grid over [1e-3, 3] plus 0.005, 0.028, 0.158, 1.58

struct GenerateArgs {
  std::string preset;
  std::uint64_t seed = 0;
  std::optional<int> rows;  // overrides the preset sample count
  std::filesystem::path out;
};

struct EstimateArgs {
  std::filesystem::path in;
  std::filesystem::path out;     // score CSV
  std::filesystem::path minima;  // empty = <out>.minima.json
  int k_min = 2;
  int k_max = 15;
  std::vector<double> gamma;  // empty = default_gamma_values()
  std::vector<double> xi;     // empty = default_xi_values()
  int shuffles = 40;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::optional<double> density_gamma;
  std::optional<int> subsample;  // rows kept after the degree column is computed
  bool standardize = false;
};

struct ClusterArgs {
  std::filesystem::path in;
  std::filesystem::path out;
  int k = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> density_gamma;
  std::optional<int> subsample;  // rows kept after the degree column is computed
  bool standardize = false;
};

// Each returns the process exit code. Results go to files; progress and
// summaries to `log`. Every output file gets a <file>.run.json sidecar.
int cmd_generate(const GenerateArgs& args, std::ostream& log);
int cmd_estimate(const EstimateArgs& args, std::ostream& log);
int cmd_cluster(const ClusterArgs& args, std::ostream& log);

nlohmann::json run_config(const GenerateArgs& args);
nlohmann::json run_config(const EstimateArgs& args);
nlohmann::json run_config(const ClusterArgs& args);

}  // namespace bcvsc
