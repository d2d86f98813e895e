#include "wdru/data.hpp"

#include "wdru/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace wdru {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

RawTable load_csv(const std::string& path, const std::string& label_column, const std::string& positive_token) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header in " + path);
  const std::vector<std::string> header = split_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw MissingColumnError("no column named '" + label_column + "'");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<std::string>> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = split_line(line);
    if (row.size() != header.size()) {
      throw RaggedRowError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                           " cells, got " + std::to_string(row.size()));
    }
    cells.push_back(std::move(row));
  }
  if (cells.empty()) throw CsvError("no data rows in " + path);

  RawTable t;
  std::set<std::string> label_values;
  for (const auto& row : cells) label_values.insert(row[label_col]);
  if (!positive_token.empty()) {
    if (label_values.size() != 2 || !label_values.count(positive_token)) {
      throw NonBinaryLabelError("label column must hold exactly two values including '" + positive_token + "'");
    }
    for (const auto& row : cells) t.labels.push_back(row[label_col] == positive_token ? Label::positive() : Label::negative());
  } else {
    for (const auto& row : cells) {
      const auto v = parse_real(row[label_col]);
      if (v && *v == 1.0) {
        t.labels.push_back(Label::positive());
      } else if (v && (*v == 0.0 || *v == -1.0)) {
        t.labels.push_back(Label::negative());
      } else {
        throw NonBinaryLabelError("label '" + row[label_col] + "' is not 0/1 or -1/+1");
      }
    }
  }

  // Column plan: numeric columns map to one output column, categorical to one per value.
  std::vector<std::vector<std::string>> categories(header.size());
  std::vector<double> numeric;
  std::size_t out_cols = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    bool is_numeric = true;
    for (const auto& row : cells) is_numeric &= parse_real(row[c]).has_value();
    if (is_numeric) {
      t.columns.push_back(header[c]);
      ++out_cols;
    } else {
      std::set<std::string> values;
      for (const auto& row : cells) values.insert(row[c]);
      categories[c].assign(values.begin(), values.end());
      for (const auto& v : categories[c]) t.columns.push_back(header[c] + "=" + v);
      out_cols += values.size();
    }
  }
  t.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(out_cols));
  for (std::size_t r = 0; r < cells.size(); ++r) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == label_col) continue;
      const auto ri = static_cast<Eigen::Index>(r);
      if (categories[c].empty()) {
        t.features(ri, col++) = *parse_real(cells[r][c]);
      } else {
        const auto& cats = categories[c];
        const auto pos = std::lower_bound(cats.begin(), cats.end(), cells[r][c]) - cats.begin();
        t.features(ri, col + pos) = 1.0;
        col += static_cast<Eigen::Index>(cats.size());
      }
    }
  }
  return t;
}

Eigen::VectorXd StandardizeTransform::apply(const Eigen::VectorXd& raw) const {
  check_dims(raw.size(), mean.size(), "standardize input");
  return ((raw - mean).array() / scale.array()).matrix() / max_abs;
}

Standardized standardize(const RawTable& table) {
  if (table.rows() == 0 || table.features.cols() == 0) throw std::invalid_argument("standardize: empty table");
  Standardized out;
  auto& tf = out.transform;
  const double n = static_cast<double>(table.rows());
  tf.mean = table.features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = table.features.rowwise() - tf.mean.transpose();
  tf.scale = (centered.colwise().squaredNorm() / n).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < tf.scale.size(); ++j) {
    if (!(tf.scale(j) > 0.0)) tf.scale(j) = 1.0;
  }
  Eigen::MatrixXd z = centered.array().rowwise() / tf.scale.transpose().array();
  tf.max_abs = z.cwiseAbs().maxCoeff();
  if (!(tf.max_abs > 0.0)) tf.max_abs = 1.0;
  out.table.columns = table.columns;
  out.table.labels = table.labels;
  out.table.features = z / tf.max_abs;
  return out;
}

LabeledDataset to_labeled(const RawTable& table) {
  LabeledDataset d;
  d.samples.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    d.samples.push_back({with_bias(table.features.row(static_cast<Eigen::Index>(r)).transpose()), table.labels[r]});
  }
  return d;
}

Split sample_split(const RawTable& table, std::size_t n_labeled, std::uint64_t seed, bool unlabeled_is_full) {
  if (n_labeled > table.rows()) throw std::invalid_argument("n_labeled exceeds the number of rows");
  const LabeledDataset all = to_labeled(table);
  CounterRng rng(seed);
  const std::vector<std::size_t> picked = sample_without_replacement(table.rows(), n_labeled, rng);
  std::vector<bool> is_labeled(table.rows(), false);
  Split s;
  for (std::size_t r : picked) {
    is_labeled[r] = true;
    s.labeled.samples.push_back(all.samples[r]);
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (unlabeled_is_full || !is_labeled[r]) {
      s.unlabeled.points.push_back(all.samples[r].x);
      s.unlabeled_labels.push_back(all.samples[r].y);
    }
  }
  s.full = all;
  return s;
}

RawTable synthetic_two_gaussian(std::size_t rows, std::size_t dim, double separation, std::uint64_t seed) {
  if (rows < 2 || dim < 1) throw std::invalid_argument("synthetic data needs rows >= 2 and dim >= 1");
  CounterRng rng(seed);
  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(dim));
  RawTable t;
  for (std::size_t j = 0; j < dim; ++j) t.columns.push_back("x" + std::to_string(j + 1));
  t.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows; ++r) {
    const Label y = r % 2 == 0 ? Label::negative() : Label::positive();
    const double sign = y == Label::positive() ? 1.0 : -1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      t.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = sign * shift + rng.normal();
    }
    t.labels.push_back(y);
  }
  return t;
}

void write_csv(const RawTable& table, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path);
  for (const auto& c : table.columns) out << c << ',';
  out << label_column << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (Eigen::Index j = 0; j < table.features.cols(); ++j) {
      out << format_real(table.features(static_cast<Eigen::Index>(r), j)) << ',';
    }
    out << table.labels[r].loss_view() << '\n';
  }
}

}  // namespace wdru
