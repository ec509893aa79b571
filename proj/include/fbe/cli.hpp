#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbe/audit.hpp"

namespace fbe::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kRuntimeError = 2 };

/// Entry point of the `fbe` tool: gen-data, train, sweep, audit, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline const std::vector<std::string> kSweepColumns{"lambda", "spd", "eod", "fe", "sfe", "auditor_beta",
                                                    "accuracy", "precision", "auc"};

/// One sweep point; `report` is empty when the point failed.
struct SweepRow {
  double lambda = 0.0;
  std::optional<FairnessReport> report;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ParsedSweepRow {
  double lambda = 0.0;
  // remaining columns in kSweepColumns order; empty for NA
  std::vector<std::optional<double>> values;
};

std::vector<ParsedSweepRow> read_sweep_csv(std::istream& in);

std::vector<double> parse_lambda_grid(const std::string& text);

}  // namespace fbe::cli
