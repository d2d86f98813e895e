#pragma once

#include "wdru/core_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wdru {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingColumnError : CsvError {
  using CsvError::CsvError;
};
struct NonBinaryLabelError : CsvError {
  using CsvError::CsvError;
};
struct RaggedRowError : CsvError {
  using CsvError::CsvError;
};

/// Encoded feature matrix with binary labels. Rows are samples.
struct RawTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd features;
  std::vector<Label> labels;

  std::size_t rows() const { return labels.size(); }
};

/// Reads a headed CSV. Numeric columns are parsed as reals; any column with a
/// non-numeric cell is one-hot encoded as "name=value" columns in
/// alphabetical value order. With a positive token the label is
/// (cell == token) and the column must hold exactly two values; without one
/// the cells must be 0/1 or -1/+1.
RawTable load_csv(const std::string& path, const std::string& label_column,
                  const std::string& positive_token = "");

struct StandardizeTransform {
  Eigen::VectorXd mean;
  /// Population std per feature, 1 for constant features.
  Eigen::VectorXd scale;
  /// Global max |entry| after z-scoring (1 when all entries are zero).
  double max_abs = 1.0;

  Eigen::VectorXd apply(const Eigen::VectorXd& raw) const;
};

struct Standardized {
  RawTable table;
  StandardizeTransform transform;
};

/// Per-feature z-scoring followed by a global max-abs rescale.
Standardized standardize(const RawTable& table);

/// Labeled samples with the bias coordinate appended.
LabeledDataset to_labeled(const RawTable& table);

struct Split {
  LabeledDataset labeled;
  UnlabeledDataset unlabeled;
  /// Whole table; its empirical distribution stands in for the truth.
  LabeledDataset full;
  /// Hidden labels of `unlabeled`, same order.
  std::vector<Label> unlabeled_labels;
};

/// Seeded uniform sample of n_labeled rows without replacement. The
/// unlabeled set is the remaining rows, or every row when unlabeled_is_full.
Split sample_split(const RawTable& table, std::size_t n_labeled, std::uint64_t seed,
                   bool unlabeled_is_full = false);

/// Two isotropic unit-variance Gaussians at -mu and +mu with ||mu|| = separation / 2,
/// balanced labels. Raw (unstandardized) features.
RawTable synthetic_two_gaussian(std::size_t rows, std::size_t dim, double separation,
                                std::uint64_t seed);

/// Writes features and a 0/1 label column as CSV with a header.
void write_csv(const RawTable& table, const std::string& path, const std::string& label_column = "label");

}  // namespace wdru
