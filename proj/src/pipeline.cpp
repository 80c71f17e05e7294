#include "actgeo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "actgeo/dimensionality.hpp"
#include "actgeo/errors.hpp"
#include "actgeo/geometry.hpp"
#include "actgeo/random.hpp"
#include "actgeo/sweeps.hpp"
#include "actgeo/trajectory.hpp"

namespace actgeo::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"run", {"store", "trace_store", "out", "seed", "format", "threads", "layer"}},
      {"stages", {"curate", "probe", "geometry", "dims", "steer", "trace"}},
      {"curate", {"keywords", "strata", "bucket_width", "tolerance", "alpha_floor"}},
      {"probe", {"position", "families", "k", "grid_search", "position_sweep"}},
      {"geometry", {"subsample", "repeats"}},
      {"dims", {"resamples", "threshold", "groups"}},
      {"steer", {"probe", "alpha", "sign", "target", "outcomes", "permutations"}},
      {"trace", {"layer", "threshold", "assess_group", "exec_group"}},
  };
  return s;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest(std::string_view key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed reads that record problems instead of throwing.
class Reader {
 public:
  Reader(const boost::property_tree::ptree& tree, std::vector<std::string>& problems)
      : tree_(tree), problems_(problems) {}

  std::optional<std::string> str(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& out, bool positive = true) const {
    auto v = str(section, key);
    if (!v) return;
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing");
      if constexpr (std::is_integral_v<T>) {
        if (d != static_cast<double>(static_cast<long long>(d))) throw std::invalid_argument("int");
        if (d < 0 && std::is_unsigned_v<T>) throw std::invalid_argument("neg");
        if (std::is_same_v<T, std::uint64_t>) {
          out = static_cast<T>(std::stoull(*v));
        } else {
          out = static_cast<T>(d);
        }
      } else {
        out = static_cast<T>(d);
      }
      if (positive && !(d > 0)) problems_.push_back("[" + section + "] " + key + " must be positive");
    } catch (const std::exception&) {
      problems_.push_back("[" + section + "] " + key + ": '" + *v + "' is not a valid " +
                          (std::is_integral_v<T> ? "integer" : "number"));
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) const {
    auto v = str(section, key);
    if (!v) return;
    std::string l = *v;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (l == "true" || l == "yes" || l == "on" || l == "1") {
      out = true;
    } else if (l == "false" || l == "no" || l == "off" || l == "0") {
      out = false;
    } else {
      problems_.push_back("[" + section + "] " + key + ": '" + *v + "' is not a boolean");
    }
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::vector<std::string>& problems_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

PipelineConfig validate_config(std::string_view text, const fs::path& base_dir) {
  std::string normalized;
  normalized.reserve(text.size());
  for (char c : text) {
    if (c != '\r') normalized += c;
  }
  PipelineConfig cfg;
  cfg.config_hash = sha256_hex(normalized);

  boost::property_tree::ptree tree;
  try {
    std::istringstream in(normalized);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }

  std::vector<std::string> problems;
  std::vector<std::string> sections;
  for (const auto& [name, _] : schema()) sections.push_back(name);
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (body.empty() && !body.data().empty()) {
      problems.push_back("key '" + section + "' must be inside a section");
      continue;
    }
    if (it == schema().end()) {
      problems.push_back("unknown section [" + section + "] (did you mean [" + nearest(section, sections) + "]?)");
      continue;
    }
    for (const auto& [key, _] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        problems.push_back("unknown key '" + key + "' in [" + section + "] (did you mean '" +
                           nearest(key, it->second) + "'?)");
      }
    }
  }

  Reader r(tree, problems);
  auto require_path = [&](const std::string& section, const std::string& key, bool dir) -> std::optional<fs::path> {
    auto v = r.str(section, key);
    if (!v) return std::nullopt;
    fs::path p = resolve(base_dir, *v);
    if (!fs::exists(p)) {
      problems.push_back("[" + section + "] " + key + ": path '" + *v + "' does not exist");
    } else if (dir && !fs::is_directory(p)) {
      problems.push_back("[" + section + "] " + key + ": '" + *v + "' is not a directory");
    }
    return p;
  };

  if (auto p = require_path("run", "store", true)) {
    cfg.store = *p;
  } else {
    problems.push_back("[run] store is required");
  }
  cfg.trace_store = require_path("run", "trace_store", true);
  cfg.out = resolve(base_dir, r.str("run", "out").value_or(cfg.out.string()));
  r.number("run", "seed", cfg.seed, false);
  r.number("run", "threads", cfg.threads);
  if (auto v = r.str("run", "layer")) {
    int layer = 0;
    r.number("run", "layer", layer, false);
    cfg.layer = layer;
  }
  if (auto v = r.str("run", "format")) {
    if (*v == "json") cfg.format = Format::json;
    else if (*v == "csv") cfg.format = Format::csv;
    else problems.push_back("[run] format must be json or csv, got '" + *v + "'");
  }

  cfg.trace = cfg.trace_store.has_value();
  r.boolean("stages", "curate", cfg.curate);
  r.boolean("stages", "probe", cfg.probe);
  r.boolean("stages", "geometry", cfg.geometry);
  r.boolean("stages", "dims", cfg.dims);
  r.boolean("stages", "steer", cfg.steer);
  r.boolean("stages", "trace", cfg.trace);

  if (auto v = r.str("curate", "keywords")) cfg.curation.banned_keywords = split_list(*v);
  if (auto v = r.str("curate", "strata")) {
    if (*v == "domain_tag") cfg.curation.strata_key = curation::StrataKey::domain_tag;
    else if (*v == "domain_and_length_bucket") cfg.curation.strata_key = curation::StrataKey::domain_and_length_bucket;
    else problems.push_back("[curate] strata must be domain_tag or domain_and_length_bucket");
  }
  r.number("curate", "bucket_width", cfg.curation.length_bucket_width);
  r.number("curate", "tolerance", cfg.curation.length_match_tolerance_tokens, false);
  r.number("curate", "alpha_floor", cfg.curation.t_test_alpha_floor);
  if (cfg.curation.length_match_tolerance_tokens < 0) problems.push_back("[curate] tolerance must be >= 0");
  if (cfg.curation.t_test_alpha_floor >= 1.0) problems.push_back("[curate] alpha_floor must be < 1");
  if (cfg.curate && cfg.curation.banned_keywords.empty()) problems.push_back("[curate] keywords must be non-empty");

  if (auto v = r.str("probe", "position")) {
    try {
      cfg.position = PositionTag::parse(*v);
    } catch (const std::exception& e) {
      problems.push_back("[probe] position: " + std::string(e.what()));
    }
  }
  if (auto v = r.str("probe", "families"); v && *v != "all") {
    cfg.families.clear();
    for (const auto& f : split_list(*v)) {
      try {
        cfg.families.push_back(probes::parse_family(f));
      } catch (const std::exception& e) {
        problems.push_back("[probe] families: " + std::string(e.what()));
      }
    }
    if (cfg.families.empty()) problems.push_back("[probe] families must name at least one family");
  }
  r.number("probe", "k", cfg.k);
  if (cfg.k < 2) problems.push_back("[probe] k must be >= 2");
  r.boolean("probe", "grid_search", cfg.grid_search);
  r.boolean("probe", "position_sweep", cfg.position_sweep);

  r.number("geometry", "subsample", cfg.cka_subsample);
  r.number("geometry", "repeats", cfg.cka_repeats);

  r.number("dims", "resamples", cfg.resamples);
  r.number("dims", "threshold", cfg.variance_threshold);
  if (cfg.variance_threshold > 1.0) problems.push_back("[dims] threshold must be in (0, 1]");
  if (auto v = r.str("dims", "groups")) cfg.dims_groups = split_list(*v);
  for (const auto& g : cfg.dims_groups) {
    if (g != "solved" && g != "unsolved" && g != "prompt" && g != "cot") {
      problems.push_back("[dims] unknown group '" + g + "' (expected solved, unsolved, prompt or cot)");
    } else if ((g == "prompt" || g == "cot") && cfg.dims && !cfg.trace_store) {
      problems.push_back("[dims] group '" + g + "' needs [run] trace_store");
    }
  }

  cfg.probe_file = require_path("steer", "probe", false);
  if (auto v = r.str("steer", "alpha"); v && *v != "auto") {
    double a = 0.0;
    r.number("steer", "alpha", a, false);
    cfg.alpha = a;
  }
  if (auto v = r.str("steer", "sign")) {
    try {
      cfg.sign = steering::parse_sign(*v);
    } catch (const std::exception& e) {
      problems.push_back("[steer] sign: " + std::string(e.what()));
    }
  }
  r.number("steer", "target", cfg.belief_target);
  if (!(cfg.belief_target > 0.5 && cfg.belief_target < 1.0)) problems.push_back("[steer] target must be in (0.5, 1)");
  if (auto v = r.str("steer", "outcomes")) {
    const auto files = split_list(*v);
    if (files.size() != 2) {
      problems.push_back("[steer] outcomes must be 'baseline.csv, steered.csv'");
    } else {
      for (int i = 0; i < 2; ++i) {
        const fs::path p = resolve(base_dir, files[static_cast<std::size_t>(i)]);
        if (!fs::exists(p)) problems.push_back("[steer] outcomes: file '" + files[static_cast<std::size_t>(i)] + "' does not exist");
        (i == 0 ? cfg.baseline_outcomes : cfg.steered_outcomes) = p;
      }
    }
  }
  r.number("steer", "permutations", cfg.permutations);

  if (auto v = r.str("trace", "layer")) {
    int layer = 0;
    r.number("trace", "layer", layer, false);
    cfg.trace_layer = layer;
  }
  r.number("trace", "threshold", cfg.trace_threshold);
  if (cfg.trace_threshold > 1.0) problems.push_back("[trace] threshold must be in (0, 1]");
  if (auto v = r.str("trace", "assess_group")) cfg.assess_group = *v;
  if (auto v = r.str("trace", "exec_group")) cfg.exec_group = *v;
  for (const auto* g : {&cfg.assess_group, &cfg.exec_group}) {
    if (*g != "prompt" && *g != "cot" && *g != "belief") {
      problems.push_back("[trace] unknown group '" + *g + "' (expected prompt, cot or belief)");
    }
  }

  // Cross-stage dependencies.
  if (cfg.steer && !cfg.probe && !cfg.probe_file) {
    problems.push_back("steer stage needs a probe: enable [stages] probe or set [steer] probe");
  }
  if (cfg.trace && !cfg.trace_store) {
    problems.push_back("trace stage needs [run] trace_store");
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

// ---- running ----

namespace {

struct Context {
  const PipelineConfig& cfg;
  std::optional<Store> store;
  std::optional<std::set<std::string>> kept;  // curated record ids
  std::optional<int> peak_layer;
  std::optional<probes::TrainedProbe> probe;
  std::string probe_id;
};

void write_text(const PipelineConfig& cfg, StageResult& stage, const std::string& name,
                const std::string& content) {
  std::ofstream out(cfg.out / name, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write " + (cfg.out / name).string());
  stage.artifacts.push_back(name);
}

std::string with_audit(const std::string& report_json, const std::string& stage,
                       const std::string& operation, std::uint64_t seed) {
  json j = json::parse(report_json);
  j["audit"] = {{"stage", stage}, {"operation", operation}, {"seed", seed}};
  return j.dump(2) + "\n";
}

const Store& store_of(Context& ctx) {
  if (!ctx.store) ctx.store = Store::open(ctx.cfg.store);
  return *ctx.store;
}

SnapshotTable restrict(const SnapshotTable& t, const std::optional<std::set<std::string>>& keep) {
  if (!keep) return t;
  SnapshotTable out;
  out.layer = t.layer;
  out.position = t.position;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    if (keep->count(t.ids[i])) {
      rows.push_back(static_cast<Eigen::Index>(i));
      out.ids.push_back(t.ids[i]);
      out.labels.push_back(t.labels[i]);
    }
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()), t.X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.X.row(static_cast<Eigen::Index>(r)) = t.X.row(rows[r]);
  return out;
}

SnapshotTable table(Context& ctx, int layer, PositionTag tag) {
  return restrict(load_snapshots(store_of(ctx), layer, tag), ctx.kept);
}

int analysis_layer(Context& ctx) {
  if (ctx.cfg.layer) return *ctx.cfg.layer;
  if (ctx.peak_layer) return *ctx.peak_layer;
  const auto layers = store_of(ctx).snapshot_layers();
  if (layers.empty()) throw DataError("store has no snapshot layers");
  return layers.back();
}

void run_curate(Context& ctx, StageResult& stage) {
  curation::CurationConfig cc = ctx.cfg.curation;
  cc.seed = stage.seed;
  const auto rep = curation::run_curation(store_of(ctx).manifest().records, cc);
  write_text(ctx.cfg, stage, "curation.json", with_audit(rep.to_json(), "curate", "run_curation", stage.seed));
  write_text(ctx.cfg, stage, "curation.txt", rep.to_text());
  if (!rep.length_test_passed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "length control failed: Welch p = %.4g is not above %.2f",
                  rep.length_test.p_value, cc.t_test_alpha_floor);
    throw NumericError(buf);
  }
  ctx.kept.emplace();
  for (const auto& r : rep.kept) ctx.kept->insert(r.record_id);
}

std::string sweep_csv(const probes::SweepReport& rep) {
  std::ostringstream os;
  os.precision(10);
  os << "locus,family,mean,std\n";
  for (const auto& p : rep.points) os << p.locus << "," << probes::to_string(p.family) << "," << p.mean << "," << p.std << "\n";
  return os.str();
}

void emit_sweep(Context& ctx, StageResult& stage, const probes::SweepReport& rep, const std::string& stem,
                const std::string& op) {
  if (ctx.cfg.format == Format::csv) {
    write_text(ctx.cfg, stage, stem + ".csv", sweep_csv(rep));
  } else {
    write_text(ctx.cfg, stage, stem + ".json", with_audit(rep.to_json(), "probe", op, stage.seed));
  }
  write_text(ctx.cfg, stage, stem + ".txt", rep.to_text());
}

void run_probe(Context& ctx, StageResult& stage) {
  const Store& store = store_of(ctx);
  probes::SweepOptions opt;
  opt.families = ctx.cfg.families;
  opt.k = ctx.cfg.k;
  opt.seed = stage.seed;
  opt.threads = ctx.cfg.threads;

  std::vector<probes::LocusData> layers;
  for (int layer : store.snapshot_layers()) {
    SnapshotTable t = table(ctx, layer, ctx.cfg.position);
    if (t.size() == 0) continue;
    layers.push_back({std::to_string(layer), layer, std::move(t.X), label_vector(t.labels)});
  }
  if (layers.empty()) throw DataError("no snapshots at position " + ctx.cfg.position.to_string());
  const auto sweep = probes::layer_sweep(layers, opt);
  emit_sweep(ctx, stage, sweep, "probe_layer_sweep", "layer_sweep");
  ctx.peak_layer = sweep.peak_linear_layer;
  const int layer = analysis_layer(ctx);

  if (ctx.cfg.position_sweep) {
    std::vector<probes::LocusData> loci;
    std::set<std::string> ids;
    for (const auto& tag : snapshot_positions(store, layer)) {
      if (tag.kind == PositionTag::Kind::custom) continue;
      SnapshotTable t = table(ctx, layer, tag);
      ids.insert(t.ids.begin(), t.ids.end());
      loci.push_back({tag.to_string(), layer, std::move(t.X), label_vector(t.labels)});
    }
    if (loci.size() >= 2) {
      for (const auto& l : loci) {
        if (l.y.size() != ids.size()) throw DataError("a record is missing position tag " + l.locus);
      }
      emit_sweep(ctx, stage, probes::position_sweep(loci, opt), "probe_position_sweep", "position_sweep");
    }
  }

  const SnapshotTable t = table(ctx, layer, ctx.cfg.position);
  const auto y = label_vector(t.labels);
  probes::TrainedProbe probe;
  if (ctx.cfg.grid_search) {
    auto gs = probes::grid_search(probes::Family::logistic, probes::default_grid(probes::Family::logistic), t.X,
                                  y, ctx.cfg.k, stage.seed);
    write_text(ctx.cfg, stage, "probe_grid_search.json",
               with_audit(probes::grid_search_to_json(gs), "probe", "grid_search", stage.seed));
    probe = std::move(gs.model);
  } else {
    probes::ProbeSpec spec = probes::ProbeSpec::defaults(probes::Family::logistic);
    spec.seed = stage.seed;
    probe = probes::train_probe(spec, t.X, y);
  }
  probe.meta.layer_index = layer;
  probe.meta.position_tag = ctx.cfg.position.to_string();
  ctx.probe_id = "probe_logistic_layer" + std::to_string(layer);
  write_text(ctx.cfg, stage, ctx.probe_id + ".json", probes::probe_to_json(probe));
  ctx.probe = std::move(probe);
}

void run_geometry(Context& ctx, StageResult& stage) {
  const Store& store = store_of(ctx);
  const auto layers = store.snapshot_layers();
  if (layers.empty()) throw DataError("store has no snapshot layers");
  std::vector<Eigen::MatrixXd> solved, unsolved;
  for (int layer : layers) {
    const SnapshotTable t = table(ctx, layer, ctx.cfg.position);
    solved.push_back(t.subset(Label::solved).X);
    unsolved.push_back(t.subset(Label::unsolved).X);
  }
  geometry::CkaOptions opt;
  opt.position = ctx.cfg.position;
  opt.subsample = ctx.cfg.cka_subsample;
  opt.repeats = ctx.cfg.cka_repeats;
  opt.seed = stage.seed;
  opt.threads = ctx.cfg.threads;
  auto ms = geometry::cka_layer_matrix(layers, solved, solved, true, opt);
  auto mu = geometry::cka_layer_matrix(layers, unsolved, unsolved, true, opt);
  auto mx = geometry::cka_layer_matrix(layers, solved, unsolved, false, opt);
  mx.condition_b = mu.condition_a = mu.condition_b = Label::unsolved;
  write_text(ctx.cfg, stage, "cka_solved.csv", ms.to_csv());
  write_text(ctx.cfg, stage, "cka_unsolved.csv", mu.to_csv());
  write_text(ctx.cfg, stage, "cka_cross.csv", mx.to_csv());

  auto off_diag_mean = [](const Eigen::MatrixXd& m) {
    if (m.rows() < 2) return 1.0;
    return (m.sum() - m.trace()) / static_cast<double>(m.size() - m.rows());
  };
  json summary = {{"layers", layers},
                  {"mean_within_solved", off_diag_mean(ms.values)},
                  {"mean_within_unsolved", off_diag_mean(mu.values)},
                  {"mean_cross_diagonal", mx.values.diagonal().mean()},
                  {"mean_cross", mx.values.mean()}};

  // Centroid maps need at least two prompt-percent positions.
  std::vector<geometry::CentroidSimilarityMap> maps;
  for (int layer : layers) {
    std::vector<SnapshotTable> tables;
    int percent_tags = 0;
    for (const auto& tag : snapshot_positions(store, layer)) {
      tables.push_back(table(ctx, layer, tag));
      percent_tags += tag.prompt_percent() ? 1 : 0;
    }
    if (percent_tags < 2) {
      maps.clear();
      break;
    }
    auto m = geometry::centroid_similarity_map(tables);
    if (maps.empty()) {
      maps = std::move(m);
      continue;
    }
    for (std::size_t k = 0; k < maps.size(); ++k) {
      if (m[k].rows != maps[k].rows) throw DataError("layers have different prompt positions");
      maps[k].cols.push_back(layer);
      maps[k].values.conservativeResize(Eigen::NoChange, maps[k].values.cols() + 1);
      maps[k].values.rightCols(1) = m[k].values;
    }
  }
  for (const auto& m : maps) {
    write_text(ctx.cfg, stage, "centroids_" + std::string(to_string(m.target)) + ".csv", m.to_csv());
  }

  const int layer = analysis_layer(ctx);
  const SnapshotTable t = table(ctx, layer, ctx.cfg.position);
  const auto proj = geometry::pca_project_2d(t.X);
  write_text(ctx.cfg, stage, "projection_layer" + std::to_string(layer) + ".csv", proj.to_csv(t.ids, t.labels));
  summary["projection_layer"] = layer;
  summary["projection_explained"] = {proj.explained[0], proj.explained[1]};
  write_text(ctx.cfg, stage, "geometry.json",
             with_audit(summary.dump(2), "geometry", "cka_layer_matrix", stage.seed));
}

std::vector<TraceRecord> traces_of(Context& ctx, std::optional<int> layer) {
  const Store ts = Store::open(*ctx.cfg.trace_store);
  if (!layer) {
    const auto layers = ts.trace_layers();
    if (layers.empty()) throw DataError("trace store has no traces");
    layer = layers.front();
  }
  auto traces = load_traces(ts, layer);
  if (traces.empty()) throw DataError("no traces at layer " + std::to_string(*layer));
  return traces;
}

Eigen::MatrixXd trace_group(const std::vector<TraceRecord>& traces, bool prompt) {
  std::vector<const float*> rows;
  int d = 0;
  for (const auto& tr : traces) {
    d = tr.hidden_dim;
    for (std::size_t t = 0; t < tr.n_states(); ++t) {
      if ((t < tr.cot_start) == prompt) rows.push_back(tr.state(t).data());
    }
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < d; ++j) X(static_cast<Eigen::Index>(r), j) = rows[r][j];
  }
  return X;
}

void run_dims(Context& ctx, StageResult& stage) {
  const int layer = analysis_layer(ctx);
  std::optional<SnapshotTable> snap;
  std::optional<std::vector<TraceRecord>> traces;
  json groups = json::array();
  std::ostringstream csv;
  csv.precision(10);
  csv << "group,mean,std,n_resamples,n_samples,k_at_threshold\n";
  std::uint64_t stream = 0;
  for (const auto& g : ctx.cfg.dims_groups) {
    Eigen::MatrixXd X;
    if (g == "solved" || g == "unsolved") {
      if (!snap) snap = table(ctx, layer, ctx.cfg.position);
      X = snap->subset(g == "solved" ? Label::solved : Label::unsolved).X;
    } else {
      if (!traces) traces = traces_of(ctx, ctx.cfg.trace_layer);
      X = trace_group(*traces, g == "prompt");
    }
    const auto spectrum = dims::pca_spectrum(X);
    const auto est = dims::bootstrap_pr(X, ctx.cfg.resamples, derive_seed(stage.seed, ++stream), g, ctx.cfg.threads);
    const int k = dims::k_at_threshold(spectrum, ctx.cfg.variance_threshold);
    groups.push_back({{"group", g},
                      {"mean", est.mean},
                      {"std", est.std},
                      {"n_resamples", est.n_resamples},
                      {"n_samples", X.rows()},
                      {"k_at_threshold", k},
                      {"audit", {{"stage", "dims"}, {"operation", "bootstrap_pr"}, {"seed", derive_seed(stage.seed, stream)}}}});
    csv << g << "," << est.mean << "," << est.std << "," << est.n_resamples << "," << X.rows() << "," << k << "\n";
    std::ostringstream curve;
    curve.precision(10);
    curve << "k,fraction\n";
    for (const auto& [kk, f] : dims::cumulative_variance_curve(spectrum)) curve << kk << "," << f << "\n";
    write_text(ctx.cfg, stage, "cumvar_" + g + ".csv", curve.str());
  }
  if (ctx.cfg.format == Format::csv) {
    write_text(ctx.cfg, stage, "dims.csv", csv.str());
  } else {
    json j = {{"layer", layer}, {"threshold", ctx.cfg.variance_threshold}, {"groups", std::move(groups)}};
    write_text(ctx.cfg, stage, "dims.json", with_audit(j.dump(2), "dims", "bootstrap_pr", stage.seed));
  }
}

void run_steer(Context& ctx, StageResult& stage) {
  if (ctx.cfg.probe_file) {
    std::ifstream in(*ctx.cfg.probe_file, std::ios::binary);
    if (!in) throw DataError("cannot read probe file " + ctx.cfg.probe_file->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    ctx.probe = probes::probe_from_json(ss.str());
    ctx.probe_id = ctx.cfg.probe_file->stem().string();
  }
  if (!ctx.probe) throw DataError("no probe available for steering");
  const int layer = ctx.probe->meta.layer_index >= 0 ? ctx.probe->meta.layer_index : analysis_layer(ctx);
  const auto dir = steering::derive_direction(*ctx.probe, layer, ctx.probe_id);
  write_text(ctx.cfg, stage, "direction.json", steering::direction_to_json(dir));

  const Label source = ctx.cfg.sign == steering::Sign::to_solved ? Label::unsolved : Label::solved;
  const SnapshotTable t = table(ctx, layer, PositionTag::last_input()).subset(source);
  steering::InterventionReport rep;
  std::optional<steering::AlphaSearch> search;
  double alpha = 0.0;
  const double s = ctx.cfg.sign == steering::Sign::to_solved ? 1.0 : -1.0;
  if (ctx.cfg.alpha) {
    alpha = *ctx.cfg.alpha;
  } else {
    search = steering::auto_alpha(t.X, *ctx.probe, dir, ctx.cfg.sign, ctx.cfg.belief_target);
    alpha = s * search->alpha;
  }
  rep = steering::belief_flip_experiment(t.X, t.ids, *ctx.probe, dir, alpha, ctx.cfg.sign);
  rep.dataset = store_of(ctx).manifest().dataset_name;
  rep.alpha_search = search;
  if (ctx.cfg.baseline_outcomes) {
    const auto base = steering::load_outcomes(*ctx.cfg.baseline_outcomes);
    const auto steered = steering::load_outcomes(*ctx.cfg.steered_outcomes);
    const auto [b, st] = steering::pair_outcomes(base, steered);
    rep.outcome = steering::outcome_significance_test(b, st, ctx.cfg.permutations, stage.seed);
  }
  write_text(ctx.cfg, stage, "steer.json",
             with_audit(rep.to_json(), "steer", ctx.cfg.sign == steering::Sign::to_solved
                                                    ? "belief_flip_experiment"
                                                    : "inverse_flip_experiment", stage.seed));
  write_text(ctx.cfg, stage, "steer.txt", rep.to_text());
}

void run_trace(Context& ctx, StageResult& stage) {
  const auto traces = traces_of(ctx, ctx.cfg.trace_layer);
  const int layer = traces.front().layer_index;
  auto group = [&](const std::string& g) -> Eigen::MatrixXd {
    if (g == "belief") return table(ctx, layer, PositionTag::last_input()).X;
    return trace_group(traces, g == "prompt");
  };
  const auto assess = trajectory::fit_basis(group(ctx.cfg.assess_group), ctx.cfg.trace_threshold,
                                            trajectory::BasisLabel::assessment);
  const auto exec = trajectory::fit_basis(group(ctx.cfg.exec_group), ctx.cfg.trace_threshold,
                                          trajectory::BasisLabel::execution);
  std::vector<trajectory::FitProfile> profiles;
  json per = json::array();
  int detected = 0, at_cot = 0;
  for (const auto& tr : traces) {
    profiles.push_back(trajectory::trajectory_profile(tr, assess, exec));
    const auto& p = profiles.back();
    detected += p.collapse_index ? 1 : 0;
    at_cot += p.collapse_index && *p.collapse_index == p.cot_start ? 1 : 0;
    per.push_back({{"record_id", p.record_id},
                   {"cot_start", p.cot_start},
                   {"collapse_index", p.collapse_index ? json(*p.collapse_index) : json(nullptr)},
                   {"first_crossing", p.diagnostics.first_crossing ? json(*p.diagnostics.first_crossing) : json(nullptr)},
                   {"max_drop_index", p.diagnostics.max_drop_index ? json(*p.diagnostics.max_drop_index) : json(nullptr)},
                   {"max_drop", p.diagnostics.max_drop}});
  }
  write_text(ctx.cfg, stage, "profiles.csv", trajectory::profiles_to_csv(profiles));
  json j = {{"layer", layer},
            {"assess_group", ctx.cfg.assess_group},
            {"exec_group", ctx.cfg.exec_group},
            {"threshold", ctx.cfg.trace_threshold},
            {"k_assess", assess.k},
            {"k_exec", exec.k},
            {"n_traces", traces.size()},
            {"collapse_detected", detected},
            {"collapse_at_cot_start", at_cot},
            {"traces", std::move(per)}};
  write_text(ctx.cfg, stage, "trace.json", with_audit(j.dump(2), "trace", "trajectory_profile", stage.seed));
}

}  // namespace

bool RunReport::ok() const {
  return std::all_of(stages.begin(), stages.end(),
                     [](const StageResult& s) { return s.status == "ok" || s.status == "disabled"; });
}

std::string RunReport::to_json() const {
  json st = json::array();
  json ledger = json::object();
  for (const auto& s : stages) {
    json e = {{"name", s.name}, {"status", s.status}, {"artifacts", s.artifacts}, {"seed", s.seed}};
    if (!s.error.empty()) e["error"] = s.error;
    st.push_back(std::move(e));
    ledger[s.name] = s.seed;
  }
  json j = {{"config_hash", config_hash}, {"seed", seed}, {"seed_ledger", std::move(ledger)}, {"stages", std::move(st)}};
  return j.dump(2) + "\n";
}

std::string RunReport::timings_json() const {
  json j = json::object();
  for (const auto& s : stages) j[s.name] = s.wall_seconds;
  return j.dump(2) + "\n";
}

RunReport run_pipeline(const PipelineConfig& config) {
  fs::create_directories(config.out);
  RunReport report;
  report.config_hash = config.config_hash;
  report.seed = config.seed;
  Context ctx{config, std::nullopt, std::nullopt, std::nullopt, std::nullopt, {}};

  using StageFn = void (*)(Context&, StageResult&);
  const std::pair<bool, StageFn> stages[] = {
      {config.curate, run_curate}, {config.probe, run_probe}, {config.geometry, run_geometry},
      {config.dims, run_dims},     {config.steer, run_steer}, {config.trace, run_trace},
  };
  bool failed = false;
  for (std::size_t i = 0; i < std::size(stages); ++i) {
    StageResult s;
    s.name = kStageNames[i];
    s.seed = derive_seed(config.seed, i + 1);
    if (!stages[i].first) {
      s.status = "disabled";
    } else if (failed) {
      s.status = "skipped";
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        stages[i].second(ctx, s);
        s.status = "ok";
      } catch (const std::exception& e) {
        s.numeric_failure = dynamic_cast<const NumericError*>(&e) != nullptr;
        s.status = "failed";
        s.error = s.name + ": " + e.what();
        failed = true;
      }
      s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    report.stages.push_back(std::move(s));
  }
  std::ofstream(config.out / "run_report.json", std::ios::binary) << report.to_json();
  std::ofstream(config.out / "timings.json", std::ios::binary) << report.timings_json();
  return report;
}

}  // namespace actgeo::pipeline
