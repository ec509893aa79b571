#include "fbe/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fbe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line, char delimiter, bool trim_fields) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (trim_fields) field = trim(field);
    fields.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool is_binary(const Vector& v) {
  return ((v.array() == 0.0) || (v.array() == 1.0)).all();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void Dataset::validate() const {
  const auto n = features.rows();
  if (z.size() != n || y.size() != n) {
    throw ValidationError("dataset: features, z and y must have the same number of rows");
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw ValidationError("dataset: feature_names must have one entry per feature column");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) throw ValidationError("dataset: duplicate feature name '" + name + "'");
  }
  if (!is_binary(z)) throw ValidationError("dataset: z must be 0/1 valued");
  if (!is_binary(y)) throw ValidationError("dataset: y must be 0/1 valued");
}

Dataset Dataset::rows(std::span<const Eigen::Index> indices) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(indices.size());
  out.features.resize(m, features.cols());
  out.z.resize(m);
  out.y.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto src = indices[static_cast<std::size_t>(r)];
    out.features.row(r) = features.row(src);
    out.z(r) = z(src);
    out.y(r) = y(src);
  }
  out.feature_names = feature_names;
  return out;
}

TrainTestSplit random_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.n_rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(order.size())));
  std::span<const Eigen::Index> all(order);
  return {ds.rows(all.first(n_train)), ds.rows(all.subspan(n_train))};
}

void SyntheticConfig::validate() const {
  if (n < 1) throw ValidationError("synthetic: n must be at least 1");
  if (!(p_z > 0.0 && p_z < 1.0)) throw ValidationError("synthetic: p_z must lie in (0, 1)");
  if (n_safe < 0 || n_indirect < 0 || n_proxy < 0) {
    throw ValidationError("synthetic: covariate counts must be non-negative");
  }
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const int m = cfg.n_safe + cfg.n_indirect + cfg.n_proxy;
  Dataset ds;
  ds.features.resize(cfg.n, m);
  ds.z.resize(cfg.n);
  ds.y.resize(cfg.n);
  for (int j = 0; j < cfg.n_safe; ++j) ds.feature_names.push_back("safe_" + std::to_string(j));
  for (int j = 0; j < cfg.n_indirect; ++j) ds.feature_names.push_back("indirect_" + std::to_string(j));
  for (int j = 0; j < cfg.n_proxy; ++j) ds.feature_names.push_back("proxy_" + std::to_string(j));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    const double z = uniform(rng) < cfg.p_z ? 1.0 : 0.0;
    double weighted = 0.0;
    int col = 0;
    for (int j = 0; j < cfg.n_safe; ++j, ++col) {
      const double x = normal(rng);
      ds.features(i, col) = x;
      weighted += x;
    }
    for (int j = 0; j < cfg.n_indirect; ++j, ++col) {
      const double x = z + normal(rng);
      ds.features(i, col) = x;
      weighted += x;
    }
    for (int j = 0; j < cfg.n_proxy; ++j, ++col) {
      ds.features(i, col) = z + normal(rng);
    }
    const double log_odds = 0.25 * weighted + 1.25 * z;
    ds.z(i) = z;
    ds.y(i) = uniform(rng) < sigmoid(log_odds) ? 1.0 : 0.0;
  }
  return ds;
}

// ---------------------------------------------------------------------------

const RawColumn* RawTable::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.spec.name == name) return &c;
  }
  return nullptr;
}

const RawColumn& RawTable::column(const std::string& name) const {
  if (const auto* c = find(name)) return *c;
  throw DataError("table has no column '" + name + "'");
}

RawTable parse_csv(std::istream& in, const TableSchema& schema, const CsvOptions& options) {
  if (schema.columns.empty()) throw ValidationError("csv schema declares no columns");
  std::size_t line_no = 0;
  std::string line;

  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (trim(out).empty()) continue;
      if (!options.comment_prefix.empty() && out.starts_with(options.comment_prefix)) continue;
      return true;
    }
    return false;
  };

  // position of each schema column within a row
  std::vector<std::size_t> positions(schema.columns.size());
  std::size_t expected_fields = schema.columns.size();
  if (options.has_header) {
    if (!next_content_line(line)) throw DataError("empty table: no header row");
    const auto header = split_fields(line, options.delimiter, true);
    expected_fields = header.size();
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto it = std::find(header.begin(), header.end(), schema.columns[c].name);
      if (it == header.end()) throw DataError("missing declared column '" + schema.columns[c].name + "'");
      positions[c] = static_cast<std::size_t>(it - header.begin());
    }
  } else {
    std::iota(positions.begin(), positions.end(), std::size_t{0});
  }

  RawTable table;
  for (const auto& spec : schema.columns) table.columns.push_back(RawColumn{spec, {}, {}});

  std::vector<double> parsed(schema.columns.size());
  while (next_content_line(line)) {
    const auto fields = split_fields(line, options.delimiter, options.trim_whitespace);
    if (fields.size() != expected_fields) {
      table.rejected.push_back({line_no, "expected " + std::to_string(expected_fields) + " fields, found " +
                                             std::to_string(fields.size())});
      continue;
    }
    bool ok = true;
    for (std::size_t c = 0; c < schema.columns.size() && ok; ++c) {
      const auto& spec = schema.columns[c];
      if (spec.role == ColumnRole::feature && spec.kind == ColumnKind::numeric &&
          !parse_double(fields[positions[c]], parsed[c])) {
        table.rejected.push_back({line_no, "column '" + spec.name + "': not a number: '" + fields[positions[c]] + "'"});
        ok = false;
      }
    }
    if (!ok) continue;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      auto& col = table.columns[c];
      if (col.spec.role == ColumnRole::feature && col.spec.kind == ColumnKind::numeric) {
        col.numbers.push_back(parsed[c]);
        continue;
      }
      std::string value = fields[positions[c]];
      if (col.spec.role == ColumnRole::target && !options.target_suffix.empty() &&
          value.ends_with(options.target_suffix)) {
        value.resize(value.size() - options.target_suffix.size());
      }
      col.labels.push_back(std::move(value));
    }
    ++table.n_rows;
  }
  if (table.n_rows == 0) throw DataError("empty table: no data rows");
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const TableSchema& schema, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, schema, options);
}

std::vector<std::string> PreprocessSpec::output_names() const {
  std::vector<std::string> names;
  for (const auto& t : transforms) {
    if (t.kind == ColumnKind::numeric) {
      names.push_back(t.name);
    } else {
      for (const auto& level : t.levels) names.push_back(t.name + "=" + level);
    }
  }
  return names;
}

PreprocessSpec fit_preprocess(const RawTable& table, const PreprocessPolicy& policy) {
  if (table.n_rows == 0) throw DataError("fit_preprocess: empty table");
  PreprocessSpec spec;
  spec.favourable_target = policy.favourable_target;
  const auto is_dropped = [&](const std::string& name) {
    return std::find(policy.dropped_columns.begin(), policy.dropped_columns.end(), name) !=
           policy.dropped_columns.end();
  };
  for (const auto& col : table.columns) {
    if (col.spec.role != ColumnRole::feature) continue;
    if (is_dropped(col.spec.name)) {
      spec.dropped.push_back(col.spec.name);
      continue;
    }
    FeatureTransform t;
    t.name = col.spec.name;
    t.kind = col.spec.kind;
    if (t.kind == ColumnKind::numeric) {
      const Eigen::Map<const Vector> values(col.numbers.data(), static_cast<Eigen::Index>(col.numbers.size()));
      t.mean = values.mean();
      t.sd = std::sqrt((values.array() - t.mean).square().mean());
      if (!(t.sd > 1e-12 * std::max(1.0, std::abs(t.mean)))) {
        spec.dropped.push_back(t.name);
        spec.warnings.push_back("column '" + t.name + "' is constant on the fit split and was dropped");
        continue;
      }
    } else {
      std::unordered_set<std::string> seen;
      for (const auto& v : col.labels) {
        if (seen.insert(v).second) t.levels.push_back(v);
      }
    }
    spec.transforms.push_back(std::move(t));
  }
  if (spec.transforms.empty()) throw DataError("fit_preprocess: every feature column was dropped");
  return spec;
}

Dataset apply_preprocess(const RawTable& table, const PreprocessSpec& spec, const ProtectedEncoding& protected_encoding) {
  const RawColumn* target = nullptr;
  const RawColumn* prot = nullptr;
  for (const auto& col : table.columns) {
    if (col.spec.role == ColumnRole::target) target = &col;
    if (col.spec.role == ColumnRole::protected_attribute) prot = &col;
  }
  if (target == nullptr) throw DataError("apply_preprocess: table has no target column");
  if (prot == nullptr) throw DataError("apply_preprocess: table has no protected column");

  Dataset ds;
  ds.feature_names = spec.output_names();
  const auto n = static_cast<Eigen::Index>(table.n_rows);
  ds.features = Matrix::Zero(n, static_cast<Eigen::Index>(ds.feature_names.size()));
  Eigen::Index out_col = 0;
  for (const auto& t : spec.transforms) {
    const auto& col = table.column(t.name);
    if (t.kind == ColumnKind::numeric) {
      if (col.spec.kind != ColumnKind::numeric) throw DataError("column '" + t.name + "' is not numeric");
      for (Eigen::Index i = 0; i < n; ++i) {
        ds.features(i, out_col) = (col.numbers[static_cast<std::size_t>(i)] - t.mean) / t.sd;
      }
      ++out_col;
    } else {
      std::unordered_map<std::string, Eigen::Index> level_index;
      for (std::size_t k = 0; k < t.levels.size(); ++k) level_index.emplace(t.levels[k], static_cast<Eigen::Index>(k));
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto it = level_index.find(col.labels[static_cast<std::size_t>(i)]);
        if (it != level_index.end()) ds.features(i, out_col + it->second) = 1.0;
      }
      out_col += static_cast<Eigen::Index>(t.levels.size());
    }
  }
  ds.z.resize(n);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    ds.z(i) = prot->labels[row] == protected_encoding.privileged_value ? 1.0 : 0.0;
    ds.y(i) = target->labels[row] == spec.favourable_target ? 1.0 : 0.0;
  }
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------

namespace {
constexpr const char* kZColumn = "__z__";
constexpr const char* kYColumn = "__y__";
}  // namespace

void write_interchange_csv(std::ostream& out, const Dataset& ds) {
  ds.validate();
  for (const auto& name : ds.feature_names) out << name << ',';
  out << kZColumn << ',' << kYColumn << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < ds.n_rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < ds.n_features(); ++j) {
      line += format_double(ds.features(i, j));
      line += ',';
    }
    line += ds.z(i) == 1.0 ? '1' : '0';
    line += ',';
    line += ds.y(i) == 1.0 ? '1' : '0';
    line += '\n';
    out << line;
  }
}

void write_interchange_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_interchange_csv(out, ds);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Dataset read_interchange_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table: no header row");
  const auto header = split_fields(line, ',', true);
  const auto z_pos = std::find(header.begin(), header.end(), kZColumn);
  const auto y_pos = std::find(header.begin(), header.end(), kYColumn);
  if (z_pos == header.end()) throw DataError("missing declared column '__z__'");
  if (y_pos == header.end()) throw DataError("missing declared column '__y__'");
  const auto zi = static_cast<std::size_t>(z_pos - header.begin());
  const auto yi = static_cast<std::size_t>(y_pos - header.begin());

  std::vector<std::size_t> feature_pos;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == zi || c == yi) continue;
    feature_pos.push_back(c);
    names.push_back(header[c]);
  }
  std::vector<double> values;
  std::vector<double> zs;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, ',', true);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    }
    double v = 0.0;
    for (const auto c : feature_pos) {
      if (!parse_double(fields[c], v)) throw DataError("line " + std::to_string(line_no) + ": bad number '" + fields[c] + "'");
      values.push_back(v);
    }
    if (!parse_double(fields[zi], v)) throw DataError("line " + std::to_string(line_no) + ": bad __z__");
    zs.push_back(v);
    if (!parse_double(fields[yi], v)) throw DataError("line " + std::to_string(line_no) + ": bad __y__");
    ys.push_back(v);
  }
  if (zs.empty()) throw DataError("empty table: no data rows");
  Dataset ds;
  const auto n = static_cast<Eigen::Index>(zs.size());
  const auto m = static_cast<Eigen::Index>(names.size());
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, m);
  ds.z = Eigen::Map<const Vector>(zs.data(), n);
  ds.y = Eigen::Map<const Vector>(ys.data(), n);
  ds.feature_names = std::move(names);
  ds.validate();
  return ds;
}

Dataset read_interchange_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_interchange_csv(in);
}

// ---------------------------------------------------------------------------

TableSchema adult_schema() {
  using K = ColumnKind;
  using R = ColumnRole;
  return TableSchema{{
      {"age", R::feature, K::numeric},
      {"workclass", R::feature, K::categorical},
      {"fnlwgt", R::feature, K::numeric},
      {"education", R::feature, K::categorical},
      {"education-num", R::feature, K::numeric},
      {"marital-status", R::feature, K::categorical},
      {"occupation", R::feature, K::categorical},
      {"relationship", R::feature, K::categorical},
      {"race", R::feature, K::categorical},
      {"sex", R::protected_attribute, K::categorical},
      {"capital-gain", R::feature, K::numeric},
      {"capital-loss", R::feature, K::numeric},
      {"hours-per-week", R::feature, K::numeric},
      {"native-country", R::feature, K::categorical},
      {"income", R::target, K::categorical},
  }};
}

CsvOptions adult_csv_options(bool test_file) {
  CsvOptions o;
  o.has_header = false;
  o.comment_prefix = "|";
  if (test_file) o.target_suffix = ".";
  return o;
}

PreprocessPolicy adult_policy() {
  return PreprocessPolicy{{"race", "marital-status", "native-country", "relationship"}, ">50K"};
}

TrainTestSplit load_adult(const std::filesystem::path& dir) {
  const auto schema = adult_schema();
  const auto train_raw = load_csv(dir / "adult.data", schema, adult_csv_options(false));
  const auto test_raw = load_csv(dir / "adult.test", schema, adult_csv_options(true));
  const auto spec = fit_preprocess(train_raw, adult_policy());
  return {apply_preprocess(train_raw, spec, kAdultProtected), apply_preprocess(test_raw, spec, kAdultProtected)};
}

}  // namespace fbe
