#include "fbe/experiment.hpp"

namespace fbe {

std::string to_string(Algorithm a) { return a == Algorithm::squeeze ? "squeeze" : "enforce"; }

std::string to_string(DatasetSource d) {
  switch (d) {
    case DatasetSource::synthetic:
      return "synthetic";
    case DatasetSource::adult:
      return "adult";
    case DatasetSource::csv:
      return "csv";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "squeeze") return Algorithm::squeeze;
  if (text == "enforce") return Algorithm::enforce;
  throw ValidationError("unknown algo '" + text + "' (expected squeeze or enforce)");
}

DatasetSource parse_dataset(const std::string& text) {
  if (text == "synthetic") return DatasetSource::synthetic;
  if (text == "adult") return DatasetSource::adult;
  if (text == "csv") return DatasetSource::csv;
  throw ValidationError("unknown dataset '" + text + "' (expected synthetic, adult or csv)");
}

StageVote parse_vote(const std::string& text) {
  if (text == "label") return StageVote::label;
  if (text == "probability") return StageVote::probability;
  throw ValidationError("unknown vote '" + text + "' (expected label or probability)");
}

void RunConfig::validate(bool needs_source) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
  if (lambda_grid.empty()) throw ValidationError("lambda grid is empty");
  for (const double l : lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("lambda grid values must lie in [0, 1]");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  if (c && !(*c > 0.0)) throw ValidationError("C must be positive");
  const bool has_csv = !train_csv.empty() || !test_csv.empty();
  if (needs_source && dataset == DatasetSource::csv && (train_csv.empty() || test_csv.empty())) {
    throw ValidationError("dataset csv needs both --train and --test");
  }
  if (dataset != DatasetSource::csv && has_csv) {
    throw ValidationError("--train/--test only apply to --dataset csv");
  }
  if (dataset == DatasetSource::synthetic) {
    SyntheticConfig{synthetic_n, synthetic_p_z, 10, 4, 2, seed}.validate();
  }
  gbdt_config(lambda).validate();
  enforce_config(lambda).validate();
}

double RunConfig::effective_c() const {
  if (c) return *c;
  return dataset == DatasetSource::adult ? 10.0 : 1.0;
}

GbdtConfig RunConfig::gbdt_config(double l) const {
  GbdtConfig g;
  g.lambda = l;
  g.C = effective_c();
  if (rounds) g.rounds = *rounds;
  if (depth) g.max_depth = *depth;
  if (learning_rate) g.learning_rate = *learning_rate;
  g.seed = seed;
  return g;
}

EnforceConfig RunConfig::enforce_config(double l) const {
  EnforceConfig e;
  e.lambda = l;
  if (rounds) e.rounds = *rounds;
  if (depth) e.weak_max_depth = *depth;
  e.vote = vote;
  e.seed = seed;
  return e;
}

std::uint64_t split_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

TrainTestSplit load_experiment_data(const RunConfig& cfg) {
  switch (cfg.dataset) {
    case DatasetSource::synthetic: {
      SyntheticConfig sc;
      sc.n = cfg.synthetic_n;
      sc.p_z = cfg.synthetic_p_z;
      sc.seed = cfg.seed;
      if (sc.n < 2) throw ValidationError("synthetic: n must be at least 2 to split");
      return random_split(generate_synthetic(sc), 0.75, split_seed(cfg.seed));
    }
    case DatasetSource::adult:
      return load_adult(cfg.adult_dir);
    case DatasetSource::csv: {
      auto split = TrainTestSplit{read_interchange_csv(cfg.train_csv), read_interchange_csv(cfg.test_csv)};
      if (split.train.feature_names != split.test.feature_names) {
        throw DataError("train and test files have different feature columns");
      }
      return split;
    }
  }
  throw ValidationError("unknown dataset source");
}

AuditPopulation default_population(Algorithm a) {
  return a == Algorithm::enforce ? AuditPopulation::y_equals_1 : AuditPopulation::all;
}

RunResult run_point(const TrainTestSplit& data, const RunConfig& cfg, double lambda) {
  RunResult result;
  if (cfg.algo == Algorithm::squeeze) {
    result.model = train_shapsqueeze(data.train, cfg.gbdt_config(lambda), &result.trace);
  } else {
    result.model = train_shapenforce(data.train, cfg.enforce_config(lambda));
  }
  const Vector scores = predict_scores(result.model, data.test.features);
  const RunLabels labels{lambda, cfg.algo == Algorithm::squeeze ? cfg.effective_c() : 0.0, to_string(cfg.algo),
                         to_string(cfg.dataset), cfg.seed};
  result.report = build_report(scores, data.test, cfg.threshold, default_population(cfg.algo), labels);
  return result;
}

}  // namespace fbe
