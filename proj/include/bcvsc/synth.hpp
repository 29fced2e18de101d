#pragma once

#include "bcvsc/dataset.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bcvsc {

struct BlobSpec {
  int n_samples = 150;
  int n_features = 2;
  int n_clusters = 3;
  double cluster_std = 1.0;
  double center_scale = 10.0;          // centers uniform in [-center_scale, center_scale]^d
  double min_separation_factor = 4.0;  // minimum center distance, in units of cluster_std
  std::uint64_t seed = 0;

  void validate() const;
};

// Isotropic Gaussian clusters. Cluster c receives n/k samples, plus one if
// c < n mod k. truth_labels holds the cluster index.
Dataset gaussian_blobs(const BlobSpec& spec);

struct HierarchicalSpec {
  int n_samples = 150;
  int n_subclusters = 11;
  int n_groups = 3;
  int n_features = 2;
  double intra_scale = 1.0;    // subcluster centers lie within this radius scale of their group center
  double inter_scale = 10.0;   // group centers in [-inter_scale, inter_scale]^d
  double sample_std = 0.25;    // spread of samples around their subcluster center
  double min_group_separation = 0.0;     // 0 = 3 * intra_scale
  double min_subcluster_separation = 0.0;  // 0 = 4 * sample_std
  std::uint64_t seed = 0;

  void validate() const;
};

// Two-level blobs. truth_labels = subcluster, truth_labels_coarse = group.
// Subclusters are assigned to groups round-robin.
Dataset hierarchical_blobs(const HierarchicalSpec& spec);

// Projection of the mean-centred data on its two leading principal axes.
Matrix pca_project_2d(const Dataset& data);

struct SurrogateSpec {
  int n_samples = 750;
  // Population fractions of signal, dropped shots and the first outlier group.
  // The remainder is spread over further small outlier populations.
  double signal_fraction = 573.0 / 750.0;
  double dropped_fraction = 62.0 / 750.0;
  double outlier_fraction = 43.0 / 750.0;
  int n_minor_populations = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Column order of the 12-column surrogate table.
namespace surrogate_columns {
inline constexpr int kScattered = 0;
inline constexpr int kMonoIntensity = 1;  // incident intensity downstream of the monochromator
inline constexpr int kGasDetector0 = 2;   // four upstream incident-intensity diagnostics: 2..5
inline constexpr int kDelayStage = 6;
inline constexpr int kLaserPower = 7;
inline constexpr int kArrivalMean = 8;
inline constexpr int kArrivalFwhm = 9;
inline constexpr int kPhotonEnergy = 10;
inline constexpr int kEnergyTimesIntensity = 11;
}  // namespace surrogate_columns

// Synthetic 12-column shot table. truth_labels: 0 = signal, 1 = dropped shot,
// 2.. = outlier populations.
Dataset surrogate_experiment(const SurrogateSpec& spec);
Dataset surrogate_experiment(int n_samples, std::uint64_t seed);

// Named generator configurations reachable from the CLI.
struct Preset {
  std::string name;
  std::string description;
  double suggested_gamma;  // a kernel width at which the intended structure is resolved
};

const std::vector<Preset>& presets();
bool is_preset(std::string_view name);
const Preset& preset_info(std::string_view name);  // throws UnknownPreset

BlobSpec fig1a_spec(std::uint64_t seed);
BlobSpec fig1b_spec(std::uint64_t seed);
HierarchicalSpec fig2a_spec(std::uint64_t seed);

// Throws UnknownPreset listing the valid names.
Dataset generate_preset(std::string_view name, std::uint64_t seed);

}  // namespace bcvsc
