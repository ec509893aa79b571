#pragma once

// Dataset sourcing and single-point train/evaluate runs shared by the CLI and
// the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fbe/adaboost.hpp"
#include "fbe/audit.hpp"
#include "fbe/data.hpp"
#include "fbe/gbdt.hpp"
#include "fbe/model_io.hpp"

namespace fbe {

enum class Algorithm { squeeze, enforce };
enum class DatasetSource { synthetic, adult, csv };

std::string to_string(Algorithm a);
std::string to_string(DatasetSource d);
Algorithm parse_algorithm(const std::string& text);
DatasetSource parse_dataset(const std::string& text);
StageVote parse_vote(const std::string& text);

struct RunConfig {
  DatasetSource dataset = DatasetSource::synthetic;
  Algorithm algo = Algorithm::squeeze;
  double lambda = 0.0;
  std::vector<double> lambda_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::optional<double> c;  // default depends on the dataset
  double threshold = 0.5;
  std::optional<int> rounds;
  std::optional<int> depth;
  std::optional<double> learning_rate;
  StageVote vote = StageVote::label;  // enforce only
  std::uint64_t seed = 0;

  Eigen::Index synthetic_n = 100000;
  double synthetic_p_z = kCalibratedPz;
  std::filesystem::path adult_dir = "data/adult";
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;

  /// needs_source = false skips the --train/--test requirement (audit, report).
  void validate(bool needs_source = true) const;
  double effective_c() const;
  GbdtConfig gbdt_config(double lambda) const;
  EnforceConfig enforce_config(double lambda) const;
};

/// Synthetic: generated and split 75/25 with the run seed. Adult: the standard
/// split. CSV: interchange files for train and test.
TrainTestSplit load_experiment_data(const RunConfig& cfg);

/// Seed used for the synthetic train/test shuffle.
std::uint64_t split_seed(std::uint64_t seed);

struct RunResult {
  Model model;
  FairnessReport report;
  GbdtTrace trace;  // squeeze only
};

/// Trains on the train split and reports on the test split. Enforce audits
/// the favourable-label rows; squeeze audits every row.
RunResult run_point(const TrainTestSplit& data, const RunConfig& cfg, double lambda);

AuditPopulation default_population(Algorithm a);

}  // namespace fbe
