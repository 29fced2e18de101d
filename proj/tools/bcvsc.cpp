#include "bcvsc/commands.hpp"
#include "bcvsc/error.hpp"
#include "bcvsc/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering with k and kernel width chosen by bi-cross-validation"};
  app.require_subcommand(1);

  bcvsc::GenerateArgs gen;
  std::optional<int> gen_rows;
  auto* g = app.add_subcommand("generate", "write a synthetic dataset CSV");
  std::string preset_help = "preset name:";
  for (const auto& p : bcvsc::presets()) preset_help += " " + p.name;
  g->add_option("--preset", gen.preset, preset_help)->required();
  g->add_option("--seed", gen.seed, "generator seed");
  g->add_option("--rows", gen_rows, "override the preset sample count");
  g->add_option("--out", gen.out, "output CSV")->required();

  bcvsc::EstimateArgs est;
  std::optional<double> est_density;
  std::optional<int> est_subsample;
  auto* e = app.add_subcommand("estimate", "score a (k, gamma, xi) grid and report local minima");
  e->add_option("--in", est.in, "input dataset CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--out", est.out, "score CSV")->required();
  e->add_option("--minima", est.minima, "minima JSON (default <out>.minima.json)");
  e->add_option("--k-min", est.k_min, "smallest k")->capture_default_str();
  e->add_option("--k-max", est.k_max, "largest k")->capture_default_str();
  e->add_option("--gamma", est.gamma, "kernel gamma (repeatable; default log grid 1e-3..3)");
  e->add_option("--xi", est.xi, "regularization xi (repeatable; default 1e-14 6.3e-13 1e-12 2.5e-9)");
  e->add_option("--shuffles", est.shuffles, "BCV shuffles per cell")->capture_default_str();
  e->add_option("--seed", est.seed, "master seed")->capture_default_str();
  e->add_option("--threads", est.threads, "worker threads (0 = all cores)")->capture_default_str();
  e->add_option("--density-gamma", est_density, "append a degree column computed with this gamma");
  e->add_option("--subsample", est_subsample, "rows kept after the degree column is added");
  e->add_flag("--standardize", est.standardize, "z-score every column before scoring");

  bcvsc::ClusterArgs clu;
  std::optional<double> clu_density;
  std::optional<int> clu_subsample;
  auto* c = app.add_subcommand("cluster", "spectral clustering at fixed (k, gamma)");
  c->add_option("--in", clu.in, "input dataset CSV")->required()->check(CLI::ExistingFile);
  c->add_option("--out", clu.out, "output CSV with a label column")->required();
  c->add_option("--k", clu.k, "number of clusters")->required();
  c->add_option("--gamma", clu.gamma, "kernel gamma")->required();
  c->add_option("--seed", clu.seed, "k-means seed")->capture_default_str();
  c->add_option("--density-gamma", clu_density, "append a degree column computed with this gamma");
  c->add_option("--subsample", clu_subsample, "rows kept after the degree column is added");
  c->add_flag("--standardize", clu.standardize, "z-score every column before clustering");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) {
      gen.rows = gen_rows;
      return bcvsc::cmd_generate(gen, std::cerr);
    }
    if (e->parsed()) {
      est.density_gamma = est_density;
      est.subsample = est_subsample;
      return bcvsc::cmd_estimate(est, std::cerr);
    }
    clu.density_gamma = clu_density;
    clu.subsample = clu_subsample;
    return bcvsc::cmd_cluster(clu, std::cout);
  } catch (const bcvsc::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
