#pragma once

// External-auditor protocol: a linear model of the held-out scores on Z whose
// SHAP values measure attribution fairness, plus the full per-run report.

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "fbe/data.hpp"
#include "fbe/types.hpp"

namespace fbe {

enum class AuditPopulation { all, y_equals_1 };

std::string to_string(AuditPopulation p);
AuditPopulation parse_population(const std::string& text);

struct AuditorResult {
  double beta = 0.0;
  double alpha = 0.0;
  double fe = 0.0;
  double sfe = 0.0;
  AuditPopulation population = AuditPopulation::all;
  Eigen::Index n_audited = 0;
};

/// Fits the auditor on the selected rows and scores its Z attributions there.
AuditorResult audit(const Vector& scores, const Vector& z, const Vector& y, AuditPopulation population);

struct VerdictTolerance {
  double fe = 1e-3;
  double sfe = 1e-3;
};

struct Verdict {
  bool explicably_fair = false;
  bool strongly_fair = false;
};

Verdict verdict(const AuditorResult& result, const VerdictTolerance& tol = {});

struct FairnessReport {
  double spd = 0.0;
  double eod = 0.0;
  double fe = 0.0;
  double sfe = 0.0;
  double auditor_beta = 0.0;
  double accuracy = 0.0;
  std::optional<double> precision;  // empty when nothing is predicted favourable
  double auc = 0.0;
  double threshold = 0.5;
  double lambda = 0.0;
  double c = 0.0;
  std::string algo;
  std::string dataset;
  std::uint64_t seed = 0;

  friend bool operator==(const FairnessReport&, const FairnessReport&) = default;
};

struct RunLabels {
  double lambda = 0.0;
  double c = 0.0;
  std::string algo;
  std::string dataset;
  std::uint64_t seed = 0;
};

FairnessReport build_report(const Vector& scores, const Dataset& ds, double threshold, AuditPopulation population,
                            const RunLabels& labels);

nlohmann::json to_json(const FairnessReport& r);
FairnessReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AuditorResult& r);

}  // namespace fbe
