#include "bcvsc/io.hpp"

#include "bcvsc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bcvsc {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) parse_error(line_no == 0 ? 1 : line_no, "missing header row");

  int label_col = -1, coarse_col = -1;
  std::vector<int> feature_cols;
  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) parse_error(line_no, "empty column name");
    if (header[c] == "truth_label") {
      label_col = static_cast<int>(c);
    } else if (header[c] == "truth_label_coarse") {
      coarse_col = static_cast<int>(c);
    } else {
      feature_cols.push_back(static_cast<int>(c));
      data.column_names.push_back(header[c]);
    }
  }
  if (feature_cols.empty()) parse_error(line_no, "no feature columns");

  std::vector<double> values;
  std::vector<int> labels, coarse;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    }
    for (int c : feature_cols) {
      const std::string& f = fields[static_cast<std::size_t>(c)];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        parse_error(line_no, "column '" + header[static_cast<std::size_t>(c)] + "': not a number: '" + f + "'");
      }
      values.push_back(v);
    }
    for (auto [col, dest] : {std::pair{label_col, &labels}, std::pair{coarse_col, &coarse}}) {
      if (col < 0) continue;
      const std::string& f = fields[static_cast<std::size_t>(col)];
      int v = 0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        parse_error(line_no, "column '" + header[static_cast<std::size_t>(col)] + "': not an integer: '" + f + "'");
      }
      dest->push_back(v);
    }
  }
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  const auto n = static_cast<Eigen::Index>(values.size()) / d;
  if (n == 0) parse_error(line_no, "no data rows");
  data.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, d);
  if (label_col >= 0) data.truth_labels = std::move(labels);
  if (coarse_col >= 0) data.truth_labels_coarse = std::move(coarse);
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::vector<int>* labels) {
  const Eigen::Index d = data.cols();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j) out << ',';
    out << (data.column_names.empty() ? "x" + std::to_string(j) : data.column_names[static_cast<std::size_t>(j)]);
  }
  if (data.truth_labels) out << ",truth_label";
  if (data.truth_labels_coarse) out << ",truth_label_coarse";
  if (labels) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto row = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_double(data.values(i, j));
    }
    if (data.truth_labels) out << ',' << (*data.truth_labels)[row];
    if (data.truth_labels_coarse) out << ',' << (*data.truth_labels_coarse)[row];
    if (labels) out << ',' << (*labels)[row];
    out << '\n';
  }
}

void write_score_csv(std::ostream& out, const BcvScoreGrid& grid) {
  out << "k,gamma,xi,sigma,score,n_shuffles,master_seed\n";
  for (std::size_t x = 0; x < grid.xi_values.size(); ++x) {
    for (std::size_t g = 0; g < grid.gamma_values.size(); ++g) {
      const double gamma = grid.gamma_values[g];
      for (std::size_t k = 0; k < grid.k_values.size(); ++k) {
        const auto& s = grid.score(k, g, x);
        out << grid.k_values[k] << ',' << format_double(gamma) << ',' << format_double(grid.xi_values[x]) << ','
            << format_double(sigma_from_gamma(gamma)) << ',' << (s ? format_double(*s) : "nan") << ','
            << grid.n_shuffles << ',' << grid.master_seed << '\n';
      }
    }
  }
}

nlohmann::json minima_to_json(const std::vector<GridMinimum>& minima) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : minima) {
    arr.push_back({{"k", m.k},
                   {"gamma", m.gamma},
                   {"xi", m.xi},
                   {"sigma", m.sigma()},
                   {"score", m.score},
                   {"on_boundary", m.on_boundary}});
  }
  return arr;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::filesystem::path run_config_path(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".run.json";
  return p;
}

}  // namespace bcvsc
