#include "bcvsc/commands.hpp"

#include "bcvsc/bcv.hpp"
#include "bcvsc/error.hpp"
#include "bcvsc/io.hpp"
#include "bcvsc/seeding.hpp"
#include "bcvsc/spectral.hpp"
#include "bcvsc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace bcvsc {

namespace {

constexpr std::uint64_t kSubsampleTag = 0x53554253;  // "SUBS"
constexpr const char* kFormatVersion = "1";

nlohmann::json to_json(const BlobSpec& s) {
  return {{"generator", "gaussian_blobs"}, {"n_samples", s.n_samples}, {"n_features", s.n_features},
          {"n_clusters", s.n_clusters}, {"cluster_std", s.cluster_std}, {"center_scale", s.center_scale},
          {"min_separation_factor", s.min_separation_factor}, {"seed", s.seed}};
}

nlohmann::json to_json(const HierarchicalSpec& s) {
  return {{"generator", "hierarchical_blobs"}, {"n_samples", s.n_samples}, {"n_subclusters", s.n_subclusters},
          {"n_groups", s.n_groups}, {"n_features", s.n_features}, {"intra_scale", s.intra_scale},
          {"inter_scale", s.inter_scale}, {"sample_std", s.sample_std},
          {"min_group_separation", s.min_group_separation},
          {"min_subcluster_separation", s.min_subcluster_separation}, {"seed", s.seed}};
}

nlohmann::json to_json(const SurrogateSpec& s) {
  return {{"generator", "surrogate_experiment"}, {"n_samples", s.n_samples},
          {"signal_fraction", s.signal_fraction}, {"dropped_fraction", s.dropped_fraction},
          {"outlier_fraction", s.outlier_fraction}, {"n_minor_populations", s.n_minor_populations},
          {"seed", s.seed}};
}

BlobSpec blob_spec(const GenerateArgs& args) {
  BlobSpec spec = args.preset == "fig1a" ? fig1a_spec(args.seed) : fig1b_spec(args.seed);
  if (args.rows) spec.n_samples = *args.rows;
  return spec;
}

HierarchicalSpec hierarchical_spec(const GenerateArgs& args) {
  HierarchicalSpec spec = fig2a_spec(args.seed);
  if (args.rows) spec.n_samples = *args.rows;
  return spec;
}

SurrogateSpec surrogate_spec(const GenerateArgs& args) {
  SurrogateSpec spec;
  spec.seed = args.seed;
  if (args.rows) spec.n_samples = *args.rows;
  return spec;
}

nlohmann::json preset_parameters(const GenerateArgs& args) {
  const std::string& p = args.preset;
  if (p == "fig1a" || p == "fig1b") return to_json(blob_spec(args));
  if (p == "fig2a") return to_json(hierarchical_spec(args));
  if (p == "surrogate") return to_json(surrogate_spec(args));
  return nullptr;
}

Dataset generate(const GenerateArgs& args) {
  const std::string& p = args.preset;
  if (p == "fig1a" || p == "fig1b") return gaussian_blobs(blob_spec(args));
  if (p == "fig2a") return hierarchical_blobs(hierarchical_spec(args));
  if (p == "surrogate") return surrogate_experiment(surrogate_spec(args));
  return generate_preset(p, args.seed);  // throws UnknownPreset
}

// Degree column over the full input, then the subsample, then scaling.
Dataset prepare(Dataset data, const std::optional<double>& density_gamma, const std::optional<int>& subsample,
                bool standardize, std::uint64_t seed) {
  data.validate();
  if (density_gamma) data = degree_feature_column(data, *density_gamma);
  if (subsample && *subsample < data.rows()) data = subsample_rows(data, *subsample, derive_seed(seed, {kSubsampleTag}));
  if (standardize) data = standardize_columns(data);
  return data;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_with_config(const std::filesystem::path& path, const std::string& body, const nlohmann::json& config) {
  write_text_file(path, body);
  write_text_file(run_config_path(path), dump(config));
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<double> default_xi_values() { return {1e-14, 6.3e-13, 1e-12, 2.5e-9}; }

std::vector<double> default_gamma_values() {
  std::vector<double> g;
  for (int j = 0; j <= 28; j += 2) {
    const double v = 1e-3 * std::pow(10.0, j / 8.0);
    if (v <= 3.0) g.push_back(v);
  }
  for (double v : {0.005, 0.028, 0.158, 1.58, 3.0}) g.push_back(v);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

nlohmann::json run_config(const GenerateArgs& args) {
  return {{"command", "generate"},
          {"format_version", kFormatVersion},
          {"preset", args.preset},
          {"seed", args.seed},
          {"rows", optional_json(args.rows)},
          {"preset_parameters", preset_parameters(args)}};
}

nlohmann::json run_config(const EstimateArgs& args) {
  // Thread count is left out: it does not change any output byte.
  return {{"command", "estimate"},
          {"format_version", kFormatVersion},
          {"input", args.in.string()},
          {"k_min", args.k_min},
          {"k_max", args.k_max},
          {"gamma", args.gamma.empty() ? default_gamma_values() : args.gamma},
          {"xi", args.xi.empty() ? default_xi_values() : args.xi},
          {"shuffles", args.shuffles},
          {"seed", args.seed},
          {"density_gamma", optional_json(args.density_gamma)},
          {"subsample", optional_json(args.subsample)},
          {"standardize", args.standardize}};
}

nlohmann::json run_config(const ClusterArgs& args) {
  return {{"command", "cluster"},
          {"format_version", kFormatVersion},
          {"input", args.in.string()},
          {"k", args.k},
          {"gamma", args.gamma},
          {"seed", args.seed},
          {"density_gamma", optional_json(args.density_gamma)},
          {"subsample", optional_json(args.subsample)},
          {"standardize", args.standardize}};
}

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  const Dataset data = generate(args);
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  write_with_config(args.out, csv.str(), run_config(args));
  log << "wrote " << data.rows() << " rows x " << data.cols() << " features to " << args.out.string() << "\n";
  return 0;
}

int cmd_estimate(const EstimateArgs& args, std::ostream& log) {
  if (args.k_min < 1 || args.k_max < args.k_min) throw Error(ErrorCode::InvalidArgument, "invalid k range");
  const Dataset data =
      prepare(read_dataset_csv(args.in), args.density_gamma, args.subsample, args.standardize, args.seed);
  std::vector<int> ks;
  for (int k = args.k_min; k <= args.k_max; ++k) ks.push_back(k);
  const std::vector<double> gammas = args.gamma.empty() ? default_gamma_values() : args.gamma;
  const std::vector<double> xis = args.xi.empty() ? default_xi_values() : args.xi;

  GridOptions opts;
  opts.threads = args.threads;
  const BcvScoreGrid grid = score_grid(data, ks, gammas, xis, args.shuffles, args.seed, opts);

  const nlohmann::json config = run_config(args);
  std::ostringstream csv;
  write_score_csv(csv, grid);
  write_with_config(args.out, csv.str(), config);

  const std::filesystem::path minima_path =
      args.minima.empty() ? std::filesystem::path(args.out.string() + ".minima.json") : args.minima;
  std::vector<GridMinimum> minima;
  try {
    minima = find_minima(grid);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EmptyGrid) throw;
  }
  write_with_config(minima_path, dump(minima_to_json(minima)), config);

  log << "scored " << grid.size() << " cells; " << minima.size() << " local minima\n";
  for (const auto& m : minima) {
    log << "  k=" << m.k << " gamma=" << format_double(m.gamma) << " sigma=" << format_double(m.sigma())
        << " xi=" << format_double(m.xi) << " score=" << format_double(m.score) << (m.on_boundary ? " (boundary)" : "")
        << "\n";
  }
  if (!grid.complete()) {
    for (const auto& f : grid.failures) {
      log << "failed: gamma=" << format_double(f.gamma) << " xi=" << format_double(f.xi) << " (all k): " << f.message
          << "\n";
    }
    return 2;
  }
  return 0;
}

int cmd_cluster(const ClusterArgs& args, std::ostream& log) {
  const Dataset data =
      prepare(read_dataset_csv(args.in), args.density_gamma, args.subsample, args.standardize, args.seed);
  const ClusteringResult result = spectral_cluster(data, args.k, args.gamma, args.seed);

  std::ostringstream csv;
  write_dataset_csv(csv, data, &result.labels);
  write_with_config(args.out, csv.str(), run_config(args));

  std::map<int, int> sizes;
  for (int l : result.labels) ++sizes[l];
  std::vector<std::pair<int, int>> order(sizes.begin(), sizes.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  log << "k=" << result.k << " gamma=" << format_double(result.gamma) << " inertia=" << format_double(result.inertia)
      << (result.degenerate ? " (degenerate input: fixed split)" : "") << "\n";
  log << "cluster populations:";
  for (const auto& [label, count] : order) log << " " << label << ":" << count;
  log << "\n";
  if (data.truth_labels) {
    log << "ARI vs truth_label: " << format_double(adjusted_rand_index(*data.truth_labels, result.labels)) << "\n";
  }
  return 0;
}

}  // namespace bcvsc
