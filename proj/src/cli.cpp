#include "fbe/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "fbe/experiment.hpp"

namespace fbe::cli {

namespace fs = std::filesystem;

namespace {

std::optional<double> parse_number(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string strip(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string na_or(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw DataError("write failed for '" + path.string() + "'");
}

fs::path require_dir(const std::string& out, const char* command) {
  if (out.empty()) throw ValidationError(std::string(command) + " needs --out DIR");
  fs::create_directories(out);
  return fs::path(out);
}

struct Options {
  std::string command;
  std::string dataset = "synthetic";
  std::string algo = "squeeze";
  double lambda = 0.0;
  std::optional<std::string> lambda_grid;
  std::optional<double> c;
  double threshold = 0.5;
  std::optional<int> rounds;
  std::optional<int> depth;
  std::optional<double> learning_rate;
  std::string vote = "label";
  std::uint64_t seed = 0;
  std::string out;
  long long n = 100000;
  double p_z = kCalibratedPz;
  std::string adult_dir = "data/adult";
  std::string train;
  std::string test;
  std::string model;
  std::string data;
  std::string population;
};

RunConfig to_run_config(const Options& o) {
  RunConfig cfg;
  cfg.dataset = parse_dataset(o.dataset);
  cfg.algo = parse_algorithm(o.algo);
  cfg.lambda = o.lambda;
  if (o.lambda_grid) cfg.lambda_grid = parse_lambda_grid(*o.lambda_grid);
  cfg.c = o.c;
  cfg.threshold = o.threshold;
  cfg.rounds = o.rounds;
  cfg.depth = o.depth;
  cfg.learning_rate = o.learning_rate;
  cfg.vote = parse_vote(o.vote);
  cfg.seed = o.seed;
  cfg.synthetic_n = static_cast<Eigen::Index>(o.n);
  cfg.synthetic_p_z = o.p_z;
  cfg.adult_dir = o.adult_dir;
  cfg.train_csv = o.train;
  cfg.test_csv = o.test;
  cfg.validate(o.command != "audit" && o.command != "report");
  return cfg;
}

int cmd_gen_data(const RunConfig& cfg, const Options& o, std::ostream& out) {
  if (cfg.dataset == DatasetSource::csv) throw ValidationError("gen-data works on synthetic or adult data only");
  const auto dir = require_dir(o.out, "gen-data");
  const auto split = load_experiment_data(cfg);
  write_interchange_csv(dir / "train.csv", split.train);
  write_interchange_csv(dir / "test.csv", split.test);
  out << "wrote " << split.train.n_rows() << " train rows and " << split.test.n_rows() << " test rows to "
      << dir.string() << '\n';
  return kSuccess;
}

int cmd_train(const RunConfig& cfg, const Options& o, std::ostream& out, std::ostream& err) {
  const auto data = load_experiment_data(cfg);
  const auto result = run_point(data, cfg, cfg.lambda);
  if (cfg.algo == Algorithm::squeeze && result.trace.diagnostic_round >= 0) {
    err << "gradient balance at round " << result.trace.diagnostic_round
        << ": mean |dL_o| = " << result.trace.mean_abs_ce_grad << ", mean |dR| = " << result.trace.mean_abs_reg_grad
        << '\n';
  }
  const auto json = to_json(result.report).dump(2);
  if (!o.out.empty()) {
    const auto dir = require_dir(o.out, "train");
    save_model(dir / "model.txt", result.model);
    write_text(dir / "report.json", json + "\n");
  }
  out << json << '\n';
  return kSuccess;
}

int cmd_sweep(const RunConfig& cfg, const Options& o, std::ostream& out, std::ostream& err) {
  const auto dir = require_dir(o.out, "sweep");
  const auto data = load_experiment_data(cfg);
  std::vector<SweepRow> rows;
  bool failed = false;
  for (std::size_t k = 0; k < cfg.lambda_grid.size(); ++k) {
    const double lambda = cfg.lambda_grid[k];
    SweepRow row{lambda, std::nullopt};
    try {
      row.report = run_point(data, cfg, lambda).report;
      write_text(dir / ("report_" + std::to_string(k) + ".json"), to_json(*row.report).dump(2) + "\n");
    } catch (const std::exception& e) {
      failed = true;
      err << "sweep point lambda=" << format_double(lambda) << " failed: " << e.what() << '\n';
    }
    rows.push_back(std::move(row));
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_text(dir / "sweep.csv", csv.str());
  out << csv.str();
  return failed ? kRuntimeError : kSuccess;
}

struct LoadedEvaluation {
  Model model;
  Dataset data;
};

LoadedEvaluation load_for_evaluation(const Options& o) {
  if (o.model.empty() || o.data.empty()) throw ValidationError("audit/report need --model and --data");
  return {load_model(fs::path(o.model)), read_interchange_csv(fs::path(o.data))};
}

AuditPopulation population_for(const Options& o, const Model& model) {
  if (!o.population.empty()) return parse_population(o.population);
  return std::holds_alternative<ShapEnforceModel>(model) ? AuditPopulation::y_equals_1 : AuditPopulation::all;
}

int cmd_audit(const Options& o, std::ostream& out) {
  const auto loaded = load_for_evaluation(o);
  const Vector scores = predict_scores(loaded.model, loaded.data.features);
  const auto result = audit(scores, loaded.data.z, loaded.data.y, population_for(o, loaded.model));
  auto json = to_json(result);
  const auto v = verdict(result);
  json["explicably_fair"] = v.explicably_fair;
  json["strongly_fair"] = v.strongly_fair;
  const auto text = json.dump(2);
  if (!o.out.empty()) write_text(o.out, text + "\n");
  out << text << '\n';
  return kSuccess;
}

int cmd_report(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const auto loaded = load_for_evaluation(o);
  const Vector scores = predict_scores(loaded.model, loaded.data.features);
  const bool enforce = std::holds_alternative<ShapEnforceModel>(loaded.model);
  const RunLabels labels{cfg.lambda, enforce ? 0.0 : cfg.effective_c(), enforce ? "enforce" : "squeeze",
                         to_string(cfg.dataset), cfg.seed};
  const auto report = build_report(scores, loaded.data, cfg.threshold, population_for(o, loaded.model), labels);
  const auto text = to_json(report).dump(2);
  if (!o.out.empty()) write_text(o.out, text + "\n");
  out << text << '\n';
  return kSuccess;
}

}  // namespace

std::vector<double> parse_lambda_grid(const std::string& text) {
  std::vector<double> grid;
  for (const auto& part : split(text, ',')) {
    const auto item = strip(part);
    if (item.empty()) continue;
    const auto v = parse_number(item);
    if (!v) throw ValidationError("bad lambda grid value '" + item + "'");
    grid.push_back(*v);
  }
  if (grid.empty()) throw ValidationError("lambda grid is empty");
  return grid;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (std::size_t k = 0; k < kSweepColumns.size(); ++k) out << (k ? "," : "") << kSweepColumns[k];
  out << '\n';
  for (const auto& row : rows) {
    out << format_double(row.lambda);
    if (!row.report) {
      for (std::size_t k = 1; k < kSweepColumns.size(); ++k) out << ",NA";
    } else {
      const auto& r = *row.report;
      out << ',' << format_double(r.spd) << ',' << format_double(r.eod) << ',' << format_double(r.fe) << ','
          << format_double(r.sfe) << ',' << format_double(r.auditor_beta) << ',' << format_double(r.accuracy) << ','
          << na_or(r.precision) << ',' << format_double(r.auc);
    }
    out << '\n';
  }
}

std::vector<ParsedSweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("sweep csv: missing header");
  if (split(strip(line), ',') != kSweepColumns) throw DataError("sweep csv: unexpected header");
  std::vector<ParsedSweepRow> rows;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != kSweepColumns.size()) throw DataError("sweep csv: wrong field count");
    ParsedSweepRow row;
    const auto lambda = parse_number(fields[0]);
    if (!lambda) throw DataError("sweep csv: bad lambda '" + fields[0] + "'");
    row.lambda = *lambda;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (fields[k] == "NA") {
        row.values.emplace_back();
        continue;
      }
      const auto v = parse_number(fields[k]);
      if (!v) throw DataError("sweep csv: bad value '" + fields[k] + "'");
      row.values.emplace_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribution-penalized boosting (SHAPSqueeze, SHAPEnforce) and auditing", "fbe"};
  Options o;
  app.add_option("command", o.command, "gen-data | train | sweep | audit | report")
      ->required()
      ->check(CLI::IsMember({"gen-data", "train", "sweep", "audit", "report"}));
  app.add_option("--dataset", o.dataset, "synthetic | adult | csv");
  app.add_option("--algo", o.algo, "squeeze | enforce");
  app.add_option("--lambda", o.lambda, "fairness weight in [0, 1]");
  app.add_option("--lambda-grid", o.lambda_grid, "comma-separated lambdas for sweep");
  app.add_option("--c", o.c, "regularizer scale C (default 1 synthetic, 10 adult)");
  app.add_option("--threshold", o.threshold, "decision threshold in (0, 1)");
  app.add_option("--rounds", o.rounds, "boosting rounds");
  app.add_option("--depth", o.depth, "tree depth (weak learner depth for enforce)");
  app.add_option("--learning-rate", o.learning_rate, "shrinkage (squeeze)");
  app.add_option("--vote", o.vote, "enforce stage vote: label | probability");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--out", o.out, "output directory (file for audit/report)");
  app.add_option("--n", o.n, "synthetic sample count before the 75/25 split");
  app.add_option("--p-z", o.p_z, "synthetic P(Z = 1)");
  app.add_option("--adult-dir", o.adult_dir, "directory holding adult.data and adult.test");
  app.add_option("--train", o.train, "train interchange CSV (dataset csv)");
  app.add_option("--test", o.test, "test interchange CSV (dataset csv)");
  app.add_option("--model", o.model, "model file (audit, report)");
  app.add_option("--data", o.data, "interchange CSV to evaluate (audit, report)");
  app.add_option("--population", o.population, "auditor population: all | y_equals_1");
  app.set_config("--config", "", "flat key = value file; flags override it");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    const auto cfg = to_run_config(o);
    if (o.command == "gen-data") return cmd_gen_data(cfg, o, out);
    if (o.command == "train") return cmd_train(cfg, o, out, err);
    if (o.command == "sweep") return cmd_sweep(cfg, o, out, err);
    if (o.command == "audit") return cmd_audit(o, out);
    return cmd_report(cfg, o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace fbe::cli
