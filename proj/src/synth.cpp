#include "bcvsc/synth.hpp"

#include "bcvsc/error.hpp"
#include "bcvsc/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bcvsc {

namespace {

constexpr int kMaxRejectionAttempts = 10000;

// Draws `count` centers uniformly in [-scale, scale]^d with pairwise distance
// >= min_distance from each other and from `fixed`.
Matrix draw_separated_centers(Rng& rng, int count, int d, double scale, double min_distance,
                              const Matrix* around = nullptr, int around_row = 0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Matrix centers(count, d);
  int attempts = 0;
  for (int c = 0; c < count; ++c) {
    for (;;) {
      if (++attempts > kMaxRejectionAttempts) {
        std::ostringstream msg;
        msg << "could not place " << count << " centers with separation " << min_distance
            << " in a box of half-width " << scale;
        throw Error(ErrorCode::SeparationUnsatisfiable, msg.str());
      }
      Vector candidate(d);
      for (int j = 0; j < d; ++j) candidate(j) = unif(rng);
      if (around) candidate += around->row(around_row).transpose();
      bool ok = true;
      for (int p = 0; p < c && ok; ++p) ok = (centers.row(p).transpose() - candidate).norm() >= min_distance;
      if (ok) {
        centers.row(c) = candidate.transpose();
        break;
      }
    }
  }
  return centers;
}

std::vector<int> equal_sizes(int n, int k) {
  std::vector<int> sizes(static_cast<std::size_t>(k), n / k);
  for (int c = 0; c < n % k; ++c) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

}  // namespace

void BlobSpec::validate() const {
  if (n_samples < 1 || n_features < 1 || n_clusters < 1 || n_clusters > n_samples) {
    throw Error(ErrorCode::InvalidArgument, "blob spec needs 1 <= n_clusters <= n_samples and n_features >= 1");
  }
  if (!(cluster_std >= 0.0) || !(center_scale > 0.0) || !(min_separation_factor >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "blob scales must be positive");
  }
}

Dataset gaussian_blobs(const BlobSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Matrix centers = draw_separated_centers(rng, spec.n_clusters, spec.n_features, spec.center_scale,
                                                spec.min_separation_factor * spec.cluster_std);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out;
  out.values.resize(spec.n_samples, spec.n_features);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(spec.n_samples));
  int row = 0;
  const auto sizes = equal_sizes(spec.n_samples, spec.n_clusters);
  for (int c = 0; c < spec.n_clusters; ++c) {
    for (int s = 0; s < sizes[static_cast<std::size_t>(c)]; ++s, ++row) {
      for (int j = 0; j < spec.n_features; ++j) {
        out.values(row, j) = centers(c, j) + spec.cluster_std * normal(rng);
      }
      labels.push_back(c);
    }
  }
  for (int j = 0; j < spec.n_features; ++j) out.column_names.push_back("x" + std::to_string(j));
  out.truth_labels = std::move(labels);
  return out;
}

void HierarchicalSpec::validate() const {
  if (n_samples < n_subclusters || n_subclusters < 1 || n_groups < 1 || n_groups > n_subclusters ||
      n_features < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "hierarchical spec needs 1 <= n_groups <= n_subclusters <= n_samples");
  }
  if (!(intra_scale > 0.0) || !(inter_scale > 0.0) || !(sample_std >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "hierarchical scales must be positive");
  }
}

Dataset hierarchical_blobs(const HierarchicalSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double group_sep = spec.min_group_separation > 0.0 ? spec.min_group_separation : 3.0 * spec.intra_scale;
  const double sub_sep =
      spec.min_subcluster_separation > 0.0 ? spec.min_subcluster_separation : 4.0 * spec.sample_std;
  const Matrix groups = draw_separated_centers(rng, spec.n_groups, spec.n_features, spec.inter_scale, group_sep);

  // Subcluster s belongs to group s mod n_groups.
  Matrix subs(spec.n_subclusters, spec.n_features);
  for (int g = 0; g < spec.n_groups; ++g) {
    int count = 0;
    for (int s = g; s < spec.n_subclusters; s += spec.n_groups) ++count;
    const Matrix local = draw_separated_centers(rng, count, spec.n_features, spec.intra_scale, sub_sep, &groups, g);
    int i = 0;
    for (int s = g; s < spec.n_subclusters; s += spec.n_groups) subs.row(s) = local.row(i++);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out;
  out.values.resize(spec.n_samples, spec.n_features);
  std::vector<int> fine, coarse;
  int row = 0;
  const auto sizes = equal_sizes(spec.n_samples, spec.n_subclusters);
  for (int s = 0; s < spec.n_subclusters; ++s) {
    for (int i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i, ++row) {
      for (int j = 0; j < spec.n_features; ++j) out.values(row, j) = subs(s, j) + spec.sample_std * normal(rng);
      fine.push_back(s);
      coarse.push_back(s % spec.n_groups);
    }
  }
  for (int j = 0; j < spec.n_features; ++j) out.column_names.push_back("x" + std::to_string(j));
  out.truth_labels = std::move(fine);
  out.truth_labels_coarse = std::move(coarse);
  return out;
}

Matrix pca_project_2d(const Dataset& data) {
  if (data.cols() < 2) throw Error(ErrorCode::InvalidArgument, "pca_project_2d needs at least 2 features");
  const Matrix centered = data.values.rowwise() - data.values.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  return centered * svd.matrixV().leftCols(2);
}

void SurrogateSpec::validate() const {
  if (n_samples < 100) throw Error(ErrorCode::InvalidArgument, "surrogate needs at least 100 samples");
  const double major = signal_fraction + dropped_fraction + outlier_fraction;
  if (signal_fraction <= 0.0 || dropped_fraction <= 0.0 || outlier_fraction < 0.0 || major > 1.0 ||
      n_minor_populations < 0) {
    throw Error(ErrorCode::InvalidArgument, "surrogate population fractions are inconsistent");
  }
}

Dataset surrogate_experiment(const SurrogateSpec& spec) {
  spec.validate();
  namespace col = surrogate_columns;
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> delay_step(0, 4);

  const int n = spec.n_samples;
  const int n_signal = static_cast<int>(std::lround(spec.signal_fraction * n));
  const int n_dropped = static_cast<int>(std::lround(spec.dropped_fraction * n));
  const int n_outlier = std::min(n - n_signal - n_dropped, static_cast<int>(std::lround(spec.outlier_fraction * n)));
  const int n_rest = n - n_signal - n_dropped - n_outlier;

  std::vector<int> labels;
  labels.insert(labels.end(), static_cast<std::size_t>(n_signal), 0);
  labels.insert(labels.end(), static_cast<std::size_t>(n_dropped), 1);
  labels.insert(labels.end(), static_cast<std::size_t>(n_outlier), 2);
  if (n_rest > 0) {
    const int minor = std::max(1, spec.n_minor_populations);
    const auto sizes = equal_sizes(n_rest, std::min(minor, n_rest));
    for (std::size_t m = 0; m < sizes.size(); ++m)
      labels.insert(labels.end(), static_cast<std::size_t>(sizes[m]), static_cast<int>(3 + m));
  }

  Dataset out;
  out.values.resize(n, 12);
  out.column_names = {"scattered_intensity", "mono_intensity", "gas_det_0", "gas_det_1", "gas_det_2",
                      "gas_det_3", "delay_stage", "laser_power", "arrival_time_mean", "arrival_time_fwhm",
                      "photon_energy", "photon_energy_x_mono_intensity"};

  for (int i = 0; i < n; ++i) {
    const int pop = labels[static_cast<std::size_t>(i)];
    // Pulse energy drives the upstream detectors; the monochromator passes a
    // fraction that depends on photon energy.
    double pulse = 3.0 + 0.25 * normal(rng);
    double photon = 7.0 + 0.05 * normal(rng);
    double laser = 5.0 + 0.1 * normal(rng);
    double arrival = 0.2 * normal(rng);
    double fwhm = 2.0 + 0.1 * normal(rng);
    double delay = 0.5 * delay_step(rng);

    if (pop == 1) {
      pulse = 0.0;
    } else if (pop == 2) {
      // Timing-tool glitch: arrival stats far off nominal.
      arrival = 6.0 + 0.3 * normal(rng);
      fwhm = 7.0 + 0.3 * normal(rng);
    } else if (pop >= 3) {
      // Each minor population is a distinct excursion in one or two diagnostics.
      const int m = pop - 3;
      const double shift = 6.0 + 1.5 * m;
      switch (m % 4) {
        case 0: photon += shift * 0.5; break;
        case 1: laser -= shift * 0.7; break;
        case 2: pulse += shift; break;
        default: arrival -= shift; break;
      }
    }

    const double mono = pulse * (0.8 + 0.05 * (photon - 7.0)) + 0.02 * normal(rng);
    auto& v = out.values;
    v(i, col::kScattered) = 0.6 * mono + 0.03 * normal(rng);
    v(i, col::kMonoIntensity) = mono;
    for (int g = 0; g < 4; ++g) v(i, col::kGasDetector0 + g) = pulse * (1.0 + 0.05 * g) + 0.03 * normal(rng);
    v(i, col::kDelayStage) = delay;
    v(i, col::kLaserPower) = laser;
    v(i, col::kArrivalMean) = arrival;
    v(i, col::kArrivalFwhm) = fwhm;
    v(i, col::kPhotonEnergy) = photon;
    v(i, col::kEnergyTimesIntensity) = photon * mono;
  }
  out.truth_labels = std::move(labels);
  return out;
}

Dataset surrogate_experiment(int n_samples, std::uint64_t seed) {
  SurrogateSpec spec;
  spec.n_samples = n_samples;
  spec.seed = seed;
  return surrogate_experiment(spec);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"fig1a", "150 samples, 7 features, 5 well-separated Gaussian clusters", 0.01},
      {"fig1b", "150 samples, 2 features, 7 closely spaced Gaussian clusters", 0.5},
      {"fig2a", "150 samples, 2 features, 11 subclusters nested in 3 groups", 0.005},
      {"surrogate", "750 shots, 12 diagnostic columns with signal, dropped-shot and outlier populations", 1e-7},
  };
  return table;
}

[[noreturn]] static void throw_unknown_preset(std::string_view name) {
  std::string valid;
  for (const auto& p : presets()) valid += (valid.empty() ? "" : ", ") + p.name;
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

const Preset& preset_info(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw_unknown_preset(name);
}

bool is_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return true;
  return false;
}

BlobSpec fig1a_spec(std::uint64_t seed) {
  BlobSpec spec;
  spec.n_samples = 150;
  spec.n_features = 7;
  spec.n_clusters = 5;
  spec.cluster_std = 1.0;
  spec.center_scale = 100.0;
  spec.min_separation_factor = 60.0;
  spec.seed = seed;
  return spec;
}

BlobSpec fig1b_spec(std::uint64_t seed) {
  BlobSpec spec;
  spec.n_samples = 150;
  spec.n_features = 2;
  spec.n_clusters = 7;
  spec.cluster_std = 1.0;
  spec.center_scale = 5.0;
  spec.min_separation_factor = 1.5;
  spec.seed = seed;
  return spec;
}

HierarchicalSpec fig2a_spec(std::uint64_t seed) {
  HierarchicalSpec spec;
  spec.n_samples = 150;
  spec.n_subclusters = 11;
  spec.n_groups = 3;
  spec.n_features = 2;
  spec.intra_scale = 4.0;
  spec.inter_scale = 40.0;
  spec.sample_std = 0.25;
  spec.min_group_separation = 40.0;
  spec.min_subcluster_separation = 2.5;
  spec.seed = seed;
  return spec;
}

Dataset generate_preset(std::string_view name, std::uint64_t seed) {
  if (name == "fig1a") return gaussian_blobs(fig1a_spec(seed));
  if (name == "fig1b") return gaussian_blobs(fig1b_spec(seed));
  if (name == "fig2a") return hierarchical_blobs(fig2a_spec(seed));
  if (name == "surrogate") return surrogate_experiment(750, seed);
  throw_unknown_preset(name);
}

}  // namespace bcvsc
