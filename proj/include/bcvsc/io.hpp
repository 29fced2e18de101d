#pragma once

#include "bcvsc/bcv.hpp"
#include "bcvsc/dataset.hpp"
#include "bcvsc/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace bcvsc {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// Header row required. Columns named truth_label / truth_label_coarse become
// labels; every other column is a feature. Throws ParseError naming the line.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

// Features, then truth label columns if present, then an optional `label` column.
void write_dataset_csv(std::ostream& out, const Dataset& data, const std::vector<int>* labels = nullptr);

// Columns k,gamma,xi,sigma,score,n_shuffles,master_seed; one row per cell in
// (xi, gamma, k) order. Missing cells are written as `nan`.
void write_score_csv(std::ostream& out, const BcvScoreGrid& grid);

nlohmann::json minima_to_json(const std::vector<GridMinimum>& minima);

// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Sidecar path holding the run configuration for an output file.
std::filesystem::path run_config_path(const std::filesystem::path& output);

}  // namespace bcvsc
