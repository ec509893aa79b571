#include <sstream>

#include "doctest.h"

#include "fbe/model_io.hpp"
#include "oracles.hpp"

using fbe::Vector;

namespace {

fbe::Model round_trip(const fbe::Model& m) {
  std::stringstream buf;
  fbe::save_model(buf, m);
  return fbe::load_model(buf);
}

std::string saved(const fbe::Model& m) {
  std::ostringstream buf;
  fbe::save_model(buf, m);
  return buf.str();
}

}  // namespace

TEST_CASE("model io: squeeze ensembles reload bit-exactly") {
  const auto ds = oracle::small_synthetic(1500, 31);
  fbe::GbdtConfig cfg;
  cfg.rounds = 20;
  cfg.lambda = 0.4;
  cfg.learning_rate = 0.1 / 3.0;  // not exactly representable
  const fbe::Model m = fbe::train_shapsqueeze(ds, cfg);
  const auto back = round_trip(m);
  REQUIRE(std::holds_alternative<fbe::GbdtModel>(back));
  CHECK(std::get<fbe::GbdtModel>(back) == std::get<fbe::GbdtModel>(m));
  CHECK(fbe::predict_scores(back, ds.features) == fbe::predict_scores(m, ds.features));
  CHECK(saved(back) == saved(m));
}

TEST_CASE("model io: enforce ensembles reload bit-exactly for both votes") {
  const auto ds = oracle::small_synthetic(1500, 32);
  for (const auto vote : {fbe::StageVote::label, fbe::StageVote::probability}) {
    fbe::EnforceConfig cfg;
    cfg.rounds = 15;
    cfg.lambda = 0.5;
    cfg.weak_max_depth = 2;
    cfg.vote = vote;
    const fbe::Model m = fbe::train_shapenforce(ds, cfg);
    const auto back = round_trip(m);
    REQUIRE(std::holds_alternative<fbe::ShapEnforceModel>(back));
    CHECK(std::get<fbe::ShapEnforceModel>(back) == std::get<fbe::ShapEnforceModel>(m));
    CHECK(std::get<fbe::ShapEnforceModel>(back).vote == vote);
    const Vector s = fbe::predict_scores(back, ds.features);
    CHECK(s == std::get<fbe::ShapEnforceModel>(m).predict_score(ds.features));
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);
  }
}

TEST_CASE("model io: empty ensembles and odd feature names") {
  fbe::GbdtModel g;
  g.base_margin = -1.25;
  g.feature_names = {"age", "marital-status=Never married", "x y"};
  const auto back = round_trip(g);
  CHECK(std::get<fbe::GbdtModel>(back) == g);
  CHECK(fbe::predict_scores(back, fbe::Matrix::Zero(2, 3)) == Vector::Constant(2, fbe::sigmoid(-1.25)));
}

TEST_CASE("model io: rejects malformed files") {
  const auto ds = oracle::small_synthetic(300, 33);
  fbe::GbdtConfig cfg;
  cfg.rounds = 2;
  const auto text = saved(fbe::Model{fbe::train_shapsqueeze(ds, cfg)});

  const auto load_text = [](const std::string& s) {
    std::istringstream in(s);
    return fbe::load_model(in);
  };
  CHECK_NOTHROW(load_text(text));
  CHECK_THROWS_AS(load_text(""), fbe::DataError);
  CHECK_THROWS_AS(load_text("not-a-model 1\n"), fbe::DataError);
  CHECK_THROWS_WITH_AS(load_text("fbe-model 2\nalgo squeeze\n"), doctest::Contains("version 2"), fbe::DataError);
  CHECK_THROWS_WITH_AS(load_text("fbe-model 1\nalgo forest\n"), doctest::Contains("forest"), fbe::DataError);
  CHECK_THROWS_AS(load_text(text.substr(0, text.size() / 2)), fbe::DataError);

  std::string bad_number = text;
  bad_number.replace(bad_number.find("learning_rate ") + 14, 3, "abc");
  CHECK_THROWS_AS(load_text(bad_number), fbe::DataError);

  CHECK_THROWS_AS(load_text("fbe-model 1\nalgo squeeze\nlearning_rate 0.1\nbase_margin 0\nfeatures 1\nx\ntrees 1\n"
                            "tree 3\n4 0.5 1 2 0\n-1 0 -1 -1 1\n-1 0 -1 -1 2\n"),
                  fbe::DataError);
  CHECK_THROWS_AS(load_text("fbe-model 1\nalgo enforce\nvote maybe\n"), fbe::DataError);
  CHECK_THROWS_AS(fbe::load_model(std::filesystem::path("/nonexistent/model.txt")), fbe::DataError);
}
