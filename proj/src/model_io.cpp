#include "fbe/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "fbe/data.hpp"

namespace fbe {

namespace {

void write_names(std::ostream& out, const std::vector<std::string>& names) {
  out << "features " << names.size() << '\n';
  for (const auto& n : names) out << n << '\n';
}

void write_tree(std::ostream& out, const RegressionTree& tree) {
  out << "tree " << tree.nodes().size() << '\n';
  for (const auto& node : tree.nodes()) {
    out << node.feature << ' ' << format_double(node.threshold) << ' ' << node.left << ' ' << node.right << ' '
        << format_double(node.value) << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw DataError("model file truncated after line " + std::to_string(line_no_));
    ++line_no_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  // "key value" line; returns value text
  std::string keyed(const std::string& key) {
    const auto s = line();
    if (!s.starts_with(key + ' ')) fail("expected '" + key + "'");
    return s.substr(key.size() + 1);
  }

  double real(const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail("bad number '" + text + "'");
    return v;
  }

  long integer(const std::string& text) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail("bad integer '" + text + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<std::string> read_names(Reader& r) {
  const auto m = r.integer(r.keyed("features"));
  if (m < 0) r.fail("negative feature count");
  std::vector<std::string> names;
  for (long j = 0; j < m; ++j) names.push_back(r.line());
  return names;
}

RegressionTree read_tree(Reader& r) {
  const auto k = r.integer(r.keyed("tree"));
  if (k < 1) r.fail("tree needs at least one node");
  std::vector<TreeNode> nodes;
  for (long i = 0; i < k; ++i) {
    const auto s = r.line();
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto pos = s.find(' ', start);
      parts.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 5) r.fail("tree node needs 5 fields");
    TreeNode node;
    node.feature = static_cast<int>(r.integer(parts[0]));
    node.threshold = r.real(parts[1]);
    node.left = static_cast<int>(r.integer(parts[2]));
    node.right = static_cast<int>(r.integer(parts[3]));
    node.value = r.real(parts[4]);
    nodes.push_back(node);
  }
  try {
    return RegressionTree(std::move(nodes));
  } catch (const ValidationError& e) {
    r.fail(e.what());
  }
}

void check_feature_range(Reader& r, const RegressionTree& tree, std::size_t n_features) {
  if (tree.max_feature_index() >= static_cast<int>(n_features)) r.fail("tree references an unknown feature");
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  out << "fbe-model " << kModelFormatVersion << '\n';
  if (const auto* g = std::get_if<GbdtModel>(&model)) {
    out << "algo squeeze\n";
    out << "learning_rate " << format_double(g->learning_rate) << '\n';
    out << "base_margin " << format_double(g->base_margin) << '\n';
    write_names(out, g->feature_names);
    out << "trees " << g->trees.size() << '\n';
    for (const auto& t : g->trees) write_tree(out, t);
  } else {
    const auto& e = std::get<ShapEnforceModel>(model);
    out << "algo enforce\n";
    out << "vote " << (e.vote == StageVote::probability ? "probability" : "label") << '\n';
    write_names(out, e.feature_names);
    out << "stages " << e.stages.size() << '\n';
    for (const auto& st : e.stages) {
      out << "stage " << format_double(st.alpha) << '\n';
      write_tree(out, st.learner);
    }
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  save_model(out, model);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Model load_model(std::istream& in) {
  Reader r(in);
  const auto version = r.integer(r.keyed("fbe-model"));
  if (version != kModelFormatVersion) r.fail("unsupported model format version " + std::to_string(version));
  const auto algo = r.keyed("algo");
  if (algo == "squeeze") {
    GbdtModel g;
    g.learning_rate = r.real(r.keyed("learning_rate"));
    g.base_margin = r.real(r.keyed("base_margin"));
    g.feature_names = read_names(r);
    const auto t = r.integer(r.keyed("trees"));
    if (t < 0) r.fail("negative tree count");
    for (long i = 0; i < t; ++i) {
      g.trees.push_back(read_tree(r));
      check_feature_range(r, g.trees.back(), g.feature_names.size());
    }
    return g;
  }
  if (algo == "enforce") {
    ShapEnforceModel e;
    const auto vote = r.keyed("vote");
    if (vote == "probability") {
      e.vote = StageVote::probability;
    } else if (vote == "label") {
      e.vote = StageVote::label;
    } else {
      r.fail("unknown vote '" + vote + "'");
    }
    e.feature_names = read_names(r);
    const auto s = r.integer(r.keyed("stages"));
    if (s < 0) r.fail("negative stage count");
    for (long i = 0; i < s; ++i) {
      EnforceStage st;
      st.alpha = r.real(r.keyed("stage"));
      st.learner = read_tree(r);
      check_feature_range(r, st.learner, e.feature_names.size());
      e.stages.push_back(std::move(st));
    }
    return e;
  }
  r.fail("unknown algo '" + algo + "'");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return load_model(in);
}

Vector predict_scores(const Model& model, const Matrix& x) {
  if (const auto* g = std::get_if<GbdtModel>(&model)) return g->predict_proba(x);
  return std::get<ShapEnforceModel>(model).predict_score(x);
}

}  // namespace fbe
