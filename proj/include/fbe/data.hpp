#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fbe/types.hpp"

namespace fbe {

/// Feature matrix plus the protected attribute and target, both 0/1 valued.
/// z is kept outside the features: it is needed for training only.
struct Dataset {
  Matrix features;
  Vector z;
  Vector y;
  std::vector<std::string> feature_names;

  Eigen::Index n_rows() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }

  /// Throws ValidationError when a structural invariant is broken.
  void validate() const;

  Dataset rows(std::span<const Eigen::Index> indices) const;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle followed by a head/tail cut.
TrainTestSplit random_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// P(Z = 1) at which z = 1 holds 90% of the favourable outcomes of the default
// generator; found by a Monte-Carlo bisection on 10^6 draws (tests/test_data.cpp).
inline constexpr double kCalibratedPz = 0.838;

struct SyntheticConfig {
  Eigen::Index n = 100000;
  double p_z = kCalibratedPz;
  int n_safe = 10;
  int n_indirect = 4;
  int n_proxy = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Safe covariates ~ N(0,1); indirect and proxy covariates ~ N(z,1);
/// log-odds 0.25 * sum(indirect + safe) + 1.25 z; y ~ Bernoulli(sigmoid(log-odds)).
/// Columns are ordered safe, indirect, proxy.
Dataset generate_synthetic(const SyntheticConfig& cfg);

// ---------------------------------------------------------------------------
// Raw tabular ingestion.

enum class ColumnKind { numeric, categorical };
enum class ColumnRole { feature, target, protected_attribute, dropped };

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::feature;
  ColumnKind kind = ColumnKind::numeric;
};

struct TableSchema {
  std::vector<ColumnSpec> columns;
};

struct CsvOptions {
  char delimiter = ',';
  /// When false, the schema's column order is the file's column order.
  bool has_header = true;
  bool trim_whitespace = true;
  /// Lines starting with this prefix are skipped (empty = none).
  std::string comment_prefix;
  /// Suffix removed from target values when present (the Adult test file appends ".").
  std::string target_suffix;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct RawColumn {
  ColumnSpec spec;
  std::vector<double> numbers;      // numeric feature columns
  std::vector<std::string> labels;  // everything else
};

struct RawTable {
  std::vector<RawColumn> columns;
  std::size_t n_rows = 0;
  std::vector<RejectedRow> rejected;

  const RawColumn& column(const std::string& name) const;
  const RawColumn* find(const std::string& name) const;
};

RawTable load_csv(const std::filesystem::path& path, const TableSchema& schema, const CsvOptions& options = {});
RawTable parse_csv(std::istream& in, const TableSchema& schema, const CsvOptions& options = {});

struct PreprocessPolicy {
  std::vector<std::string> dropped_columns;
  std::string favourable_target = "1";
};

/// Train-split statistics for one output feature group.
struct FeatureTransform {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  double mean = 0.0;
  double sd = 1.0;  // population standard deviation
  std::vector<std::string> levels;  // categorical, first-seen order
};

struct PreprocessSpec {
  std::vector<FeatureTransform> transforms;
  std::vector<std::string> dropped;
  std::string favourable_target;
  std::vector<std::string> warnings;

  std::vector<std::string> output_names() const;
};

struct ProtectedEncoding {
  std::string privileged_value;  // raw value mapped to z = 1
};

PreprocessSpec fit_preprocess(const RawTable& table, const PreprocessPolicy& policy);

/// Numerics become standard scores, categoricals one indicator per level
/// (unseen levels map to all zeros), z and y become 0/1.
Dataset apply_preprocess(const RawTable& table, const PreprocessSpec& spec, const ProtectedEncoding& protected_encoding);

// ---------------------------------------------------------------------------
// Interchange CSV: feature columns, then __z__ and __y__.

void write_interchange_csv(std::ostream& out, const Dataset& ds);
void write_interchange_csv(const std::filesystem::path& path, const Dataset& ds);
Dataset read_interchange_csv(std::istream& in);
Dataset read_interchange_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// UCI Adult census files.

TableSchema adult_schema();
CsvOptions adult_csv_options(bool test_file);
PreprocessPolicy adult_policy();
inline const ProtectedEncoding kAdultProtected{"Male"};

/// Reads adult.data / adult.test from `dir` and preprocesses with train statistics.
TrainTestSplit load_adult(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace fbe
