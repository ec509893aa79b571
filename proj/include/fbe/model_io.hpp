#pragma once

// Versioned text serialization for trained ensembles.
//
//   fbe-model 1
//   algo squeeze | enforce
//   learning_rate <r>  base_margin <r>        (squeeze)
//   vote probability | label                  (enforce)
//   features <M>          followed by M lines, one name each
//   trees <T> | stages <S>
//   [stage <alpha>]       (enforce only, before each tree)
//   tree <K>              followed by K lines: feature threshold left right value
//
// Reals are written in shortest round-trip form, so a reload is bit-exact.

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "fbe/adaboost.hpp"
#include "fbe/gbdt.hpp"

namespace fbe {

using Model = std::variant<GbdtModel, ShapEnforceModel>;

inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

/// Probability-scale scores: predict_proba for squeeze, predict_score for enforce.
Vector predict_scores(const Model& model, const Matrix& x);

}  // namespace fbe
