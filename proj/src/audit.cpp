#include "fbe/audit.hpp"

#include "fbe/metrics.hpp"
#include "fbe/surrogate.hpp"

namespace fbe {

std::string to_string(AuditPopulation p) { return p == AuditPopulation::all ? "all" : "y_equals_1"; }

AuditPopulation parse_population(const std::string& text) {
  if (text == "all") return AuditPopulation::all;
  if (text == "y_equals_1" || text == "y1") return AuditPopulation::y_equals_1;
  throw ValidationError("unknown audit population '" + text + "' (expected all or y_equals_1)");
}

AuditorResult audit(const Vector& scores, const Vector& z, const Vector& y, AuditPopulation population) {
  const auto n = scores.size();
  if (z.size() != n || y.size() != n) throw ValidationError("audit: scores, z and y differ in length");

  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (population == AuditPopulation::all || y(i) == 1.0) rows.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Vector s(m);
  Vector zs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s(k) = scores(rows[static_cast<std::size_t>(k)]);
    zs(k) = z(rows[static_cast<std::size_t>(k)]);
  }
  const auto auditor = fit_surrogate(zs, s);
  const Vector phi = shap_values(auditor, zs);

  AuditorResult out;
  out.beta = auditor.beta;
  out.alpha = auditor.alpha;
  out.fe = fe(phi, zs);
  out.sfe = sfe(phi);
  out.population = population;
  out.n_audited = m;
  return out;
}

Verdict verdict(const AuditorResult& result, const VerdictTolerance& tol) {
  return {result.fe <= tol.fe, result.sfe <= tol.sfe};
}

FairnessReport build_report(const Vector& scores, const Dataset& ds, double threshold, AuditPopulation population,
                            const RunLabels& labels) {
  if (scores.size() != ds.n_rows()) throw ValidationError("report: one score per row is required");
  const Vector yhat = threshold_scores(scores, threshold);
  const auto auditor = audit(scores, ds.z, ds.y, population);

  FairnessReport r;
  r.spd = spd(yhat, ds.z);
  r.eod = eod(yhat, ds.y, ds.z);
  r.fe = auditor.fe;
  r.sfe = auditor.sfe;
  r.auditor_beta = auditor.beta;
  r.accuracy = accuracy(yhat, ds.y);
  r.precision = precision(yhat, ds.y);
  r.auc = auc(scores, ds.y);
  r.threshold = threshold;
  r.lambda = labels.lambda;
  r.c = labels.c;
  r.algo = labels.algo;
  r.dataset = labels.dataset;
  r.seed = labels.seed;
  return r;
}

nlohmann::json to_json(const FairnessReport& r) {
  nlohmann::json j;
  j["spd"] = r.spd;
  j["eod"] = r.eod;
  j["fe"] = r.fe;
  j["sfe"] = r.sfe;
  j["auditor_beta"] = r.auditor_beta;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision ? nlohmann::json(*r.precision) : nlohmann::json(nullptr);
  j["auc"] = r.auc;
  j["threshold"] = r.threshold;
  j["lambda"] = r.lambda;
  j["c"] = r.c;
  j["algo"] = r.algo;
  j["dataset"] = r.dataset;
  j["seed"] = r.seed;
  return j;
}

FairnessReport report_from_json(const nlohmann::json& j) {
  try {
    FairnessReport r;
    r.spd = j.at("spd").get<double>();
    r.eod = j.at("eod").get<double>();
    r.fe = j.at("fe").get<double>();
    r.sfe = j.at("sfe").get<double>();
    r.auditor_beta = j.at("auditor_beta").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    if (!j.at("precision").is_null()) r.precision = j.at("precision").get<double>();
    r.auc = j.at("auc").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.c = j.at("c").get<double>();
    r.algo = j.at("algo").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report json: ") + e.what());
  }
}

nlohmann::json to_json(const AuditorResult& r) {
  return {{"beta", r.beta},
          {"alpha", r.alpha},
          {"fe", r.fe},
          {"sfe", r.sfe},
          {"population", to_string(r.population)},
          {"n_audited", r.n_audited}};
}

}  // namespace fbe
