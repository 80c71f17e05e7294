// actgeo: command-line front end for the activation-geometry toolkit.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "actgeo/curation.hpp"
#include "actgeo/dimensionality.hpp"
#include "actgeo/errors.hpp"
#include "actgeo/geometry.hpp"
#include "actgeo/pipeline.hpp"
#include "actgeo/probes.hpp"
#include "actgeo/steering.hpp"
#include "actgeo/store.hpp"
#include "actgeo/sweeps.hpp"
#include "actgeo/synthetic.hpp"
#include "actgeo/trajectory.hpp"

namespace fs = std::filesystem;
using namespace actgeo;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  bool quiet = false;
  unsigned threads = 1;
};

Globals g;

void emit(const std::string& content, const std::string& path = g.out) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write " + path);
}

void info(const std::string& msg) {
  if (!g.quiet) std::cerr << msg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<probes::Family> families_of(const std::string& spec) {
  if (spec == "all") return {std::begin(probes::kAllFamilies), std::end(probes::kAllFamilies)};
  std::vector<probes::Family> out;
  for (const auto& f : split(spec)) out.push_back(probes::parse_family(f));
  return out;
}

int pick_layer(const Store& store, int requested) {
  if (requested >= 0) return requested;
  const auto layers = store.snapshot_layers();
  if (layers.empty()) throw DataError("store has no snapshot layers");
  return layers.back();
}

// ---- subcommands ----

struct CurateArgs {
  std::string store;
  std::vector<std::string> keywords;
  int tolerance = 2;
  double alpha_floor = 0.4;
  std::string strata = "domain_tag";
  int bucket_width = 32;
};

int cmd_curate(const CurateArgs& a) {
  const Store store = Store::open(a.store);
  curation::CurationConfig cfg;
  if (!a.keywords.empty()) cfg.banned_keywords = a.keywords;
  cfg.length_match_tolerance_tokens = a.tolerance;
  cfg.t_test_alpha_floor = a.alpha_floor;
  cfg.strata_key = a.strata == "domain_and_length_bucket" ? curation::StrataKey::domain_and_length_bucket
                                                         : curation::StrataKey::domain_tag;
  cfg.length_bucket_width = a.bucket_width;
  cfg.seed = g.seed;
  const auto rep = curation::run_curation(store.manifest().records, cfg);
  if (g.format == "csv") {
    std::string csv = "record_id,label,domain_tag,token_count\n";
    for (const auto& r : rep.kept) {
      csv += r.record_id + "," + std::string(to_string(r.label)) + "," + r.domain_tag + "," +
             std::to_string(r.token_count) + "\n";
    }
    emit(csv);
  } else {
    emit(rep.to_json());
  }
  info(rep.to_text());
  if (!rep.length_test_passed) {
    std::cerr << "error: length-control t-test did not clear the p floor\n";
    return kNumeric;
  }
  return kOk;
}

struct ProbeArgs {
  std::string store;
  std::string axis = "layer";
  std::string families = "all";
  int k = 5;
  std::string position = "last_input";
  int layer = -1;
  std::string family = "logistic";
  bool grid = false;
};

std::string sweep_csv(const probes::SweepReport& rep) {
  std::ostringstream os;
  os.precision(10);
  os << "locus,family,mean,std\n";
  for (const auto& p : rep.points) os << p.locus << "," << probes::to_string(p.family) << "," << p.mean << "," << p.std << "\n";
  return os.str();
}

int cmd_probe_sweep(const ProbeArgs& a) {
  const Store store = Store::open(a.store);
  probes::SweepOptions opt;
  opt.families = families_of(a.families);
  opt.k = a.k;
  opt.seed = g.seed;
  opt.threads = g.threads;
  probes::SweepReport rep;
  if (a.axis == "layer") {
    rep = probes::layer_sweep(store, PositionTag::parse(a.position), opt);
  } else if (a.axis == "position") {
    rep = probes::position_sweep(store, pick_layer(store, a.layer), {}, opt);
  } else {
    throw CLI::ValidationError("--axis", "must be layer or position");
  }
  emit(g.format == "csv" ? sweep_csv(rep) : rep.to_json());
  info(rep.to_text());
  return kOk;
}

int cmd_probe_train(const ProbeArgs& a) {
  const Store store = Store::open(a.store);
  const int layer = pick_layer(store, a.layer);
  const auto tag = PositionTag::parse(a.position);
  const SnapshotTable t = load_snapshots(store, layer, tag);
  if (t.size() == 0) throw DataError("no snapshots at layer " + std::to_string(layer) + " / " + a.position);
  const auto y = label_vector(t.labels);
  const auto family = probes::parse_family(a.family);
  probes::TrainedProbe probe;
  if (a.grid) {
    auto gs = probes::grid_search(family, probes::default_grid(family), t.X, y, a.k, g.seed);
    info(probes::grid_search_to_json(gs));
    probe = std::move(gs.model);
  } else {
    auto spec = probes::ProbeSpec::defaults(family);
    spec.seed = g.seed;
    probe = probes::train_probe(spec, t.X, y);
  }
  probe.meta.layer_index = layer;
  probe.meta.position_tag = tag.to_string();
  emit(probes::probe_to_json(probe));
  char buf[128];
  std::snprintf(buf, sizeof buf, "trained %s probe at layer %d, training accuracy %.4f\n",
                std::string(probes::to_string(family)).c_str(), layer, probes::accuracy(probe, t.X, y));
  info(buf);
  return kOk;
}

struct GeometryArgs {
  std::string store;
  std::string condition_a = "solved";
  std::string condition_b = "unsolved";
  int subsample = 200;
  int repeats = 10;
  int layer = -1;
  std::string position = "last_input";
};

int cmd_geometry(const std::string& what, const GeometryArgs& a) {
  const Store store = Store::open(a.store);
  if (what == "cka") {
    geometry::CkaOptions opt;
    opt.position = PositionTag::parse(a.position);
    opt.subsample = a.subsample;
    opt.repeats = a.repeats;
    opt.seed = g.seed;
    opt.threads = g.threads;
    const auto m = geometry::cka_layer_matrix(store, parse_label(a.condition_a), parse_label(a.condition_b), opt);
    emit(m.to_csv());
  } else if (what == "centroids") {
    const auto maps = geometry::centroid_similarity_map(store);
    std::string out;
    for (const auto& m : maps) out += "# target " + std::string(to_string(m.target)) + "\n" + m.to_csv();
    emit(out);
  } else {
    const int layer = pick_layer(store, a.layer);
    const auto t = load_snapshots(store, layer, PositionTag::parse(a.position));
    const auto p = geometry::pca_project_2d(t.X);
    emit(p.to_csv(t.ids, t.labels));
    char buf[128];
    std::snprintf(buf, sizeof buf, "explained variance: %.4f, %.4f\n", p.explained[0], p.explained[1]);
    info(buf);
  }
  return kOk;
}

struct DimsArgs {
  std::string store;
  std::string trace_store;
  std::string groups = "solved,unsolved";
  int resamples = 100;
  double threshold = 0.9;
  int layer = -1;
  std::string position = "last_input";
  std::string curve_dir;
};

Eigen::MatrixXd trace_states(const Store& ts, int layer, bool prompt) {
  const auto traces = load_traces(ts, layer >= 0 ? std::optional<int>(layer) : std::nullopt);
  std::vector<std::pair<const TraceRecord*, std::size_t>> rows;
  for (const auto& tr : traces) {
    for (std::size_t t = 0; t < tr.n_states(); ++t) {
      if ((t < tr.cot_start) == prompt) rows.emplace_back(&tr, t);
    }
  }
  if (rows.empty()) throw DataError(std::string("no ") + (prompt ? "prompt" : "cot") + " states in trace store");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), ts.manifest().hidden_dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto s = rows[r].first->state(rows[r].second);
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(static_cast<Eigen::Index>(r), j) = s[static_cast<std::size_t>(j)];
  }
  return X;
}

int cmd_dims(const DimsArgs& a) {
  std::optional<Store> store, ts;
  nlohmann::json groups = nlohmann::json::array();
  std::string csv = "group,mean,std,n_resamples,n_samples,k_at_threshold\n";
  std::uint64_t stream = 0;
  for (const auto& group : split(a.groups)) {
    Eigen::MatrixXd X;
    if (group == "solved" || group == "unsolved") {
      if (!store) store = Store::open(a.store);
      const int layer = pick_layer(*store, a.layer);
      X = load_snapshots(*store, layer, PositionTag::parse(a.position)).subset(parse_label(group)).X;
    } else if (group == "prompt" || group == "cot") {
      if (!ts) ts = Store::open(a.trace_store.empty() ? a.store : a.trace_store);
      X = trace_states(*ts, a.layer, group == "prompt");
    } else {
      throw CLI::ValidationError("--groups", "unknown group '" + group + "'");
    }
    const auto spectrum = dims::pca_spectrum(X);
    const auto est = dims::bootstrap_pr(X, a.resamples, derive_seed(g.seed, ++stream), group, g.threads);
    const int k = dims::k_at_threshold(spectrum, a.threshold);
    groups.push_back({{"group", group}, {"mean", est.mean}, {"std", est.std}, {"n_resamples", est.n_resamples},
                      {"n_samples", X.rows()}, {"k_at_threshold", k}});
    std::ostringstream row;
    row.precision(10);
    row << group << "," << est.mean << "," << est.std << "," << est.n_resamples << "," << X.rows() << "," << k << "\n";
    csv += row.str();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s PR %.1f ± %.1f   k%.0f = %d\n", group.c_str(), est.mean, est.std,
                  100 * a.threshold, k);
    info(buf);
    if (!a.curve_dir.empty()) {
      fs::create_directories(a.curve_dir);
      std::ostringstream curve;
      curve.precision(10);
      curve << "k,fraction\n";
      for (const auto& [kk, f] : dims::cumulative_variance_curve(spectrum)) curve << kk << "," << f << "\n";
      emit(curve.str(), (fs::path(a.curve_dir) / ("cumvar_" + group + ".csv")).string());
    }
  }
  if (g.format == "csv") {
    emit(csv);
  } else {
    emit(nlohmann::json{{"threshold", a.threshold}, {"groups", groups}}.dump(2) + "\n");
  }
  return kOk;
}

struct SteerArgs {
  std::string store;
  std::string probe;
  std::string alpha = "auto";
  std::string sign = "to_solved";
  std::string outcomes;
  double target = 0.95;
  int permutations = 10000;
};

int cmd_steer(const SteerArgs& a) {
  const Store store = Store::open(a.store);
  const auto probe = probes::probe_from_json(read_file(a.probe));
  const int layer = pick_layer(store, probe.meta.layer_index);
  const auto dir = steering::derive_direction(probe, layer, fs::path(a.probe).stem().string());
  const auto sign = steering::parse_sign(a.sign);
  const Label source = sign == steering::Sign::to_solved ? Label::unsolved : Label::solved;
  const auto t = load_snapshots(store, layer, PositionTag::last_input()).subset(source);

  double alpha = 0.0;
  std::optional<steering::AlphaSearch> search;
  if (a.alpha == "auto") {
    search = steering::auto_alpha(t.X, probe, dir, sign, a.target);
    alpha = (sign == steering::Sign::to_solved ? 1.0 : -1.0) * search->alpha;
    if (!search->reached) info("warning: belief target not reached within the alpha search range\n");
  } else {
    try {
      alpha = std::stod(a.alpha);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--alpha", "must be 'auto' or a number");
    }
  }
  auto rep = steering::belief_flip_experiment(t.X, t.ids, probe, dir, alpha, sign);
  rep.dataset = store.manifest().dataset_name;
  rep.alpha_search = search;
  if (!a.outcomes.empty()) {
    const auto files = split(a.outcomes);
    if (files.size() != 2) throw CLI::ValidationError("--outcomes", "expected baseline.csv,steered.csv");
    const auto base = steering::load_outcomes(files[0]);
    const auto steered = steering::load_outcomes(files[1]);
    const auto [b, s] = steering::pair_outcomes(base, steered);
    rep.outcome = steering::outcome_significance_test(b, s, a.permutations, g.seed);
  }
  emit(rep.to_json());
  info(rep.to_text());
  return kOk;
}

struct TraceArgs {
  std::string store;
  std::string snapshot_store;
  std::string assess_group = "prompt";
  std::string exec_group = "cot";
  double threshold = 0.9;
  int layer = -1;
};

int cmd_trace(const TraceArgs& a) {
  const Store ts = Store::open(a.store);
  std::optional<int> layer;
  if (a.layer >= 0) layer = a.layer;
  const auto traces = load_traces(ts, layer);
  if (traces.empty()) throw DataError("store has no traces");
  const int L = traces.front().layer_index;
  auto group = [&](const std::string& name) -> Eigen::MatrixXd {
    if (name == "prompt" || name == "cot") return trace_states(ts, L, name == "prompt");
    if (name == "belief") {
      const Store snap = Store::open(a.snapshot_store.empty() ? a.store : a.snapshot_store);
      const auto t = load_snapshots(snap, L, PositionTag::last_input());
      if (t.size() == 0) throw DataError("no last_input snapshots at layer " + std::to_string(L));
      return t.X;
    }
    throw CLI::ValidationError("group", "unknown group '" + name + "' (expected prompt, cot or belief)");
  };
  const auto assess = trajectory::fit_basis(group(a.assess_group), a.threshold, trajectory::BasisLabel::assessment);
  const auto exec = trajectory::fit_basis(group(a.exec_group), a.threshold, trajectory::BasisLabel::execution);
  std::vector<trajectory::FitProfile> profiles;
  int at_cot = 0;
  for (const auto& tr : traces) {
    profiles.push_back(trajectory::trajectory_profile(tr, assess, exec));
    at_cot += profiles.back().collapse_index == std::optional<std::size_t>(tr.cot_start) ? 1 : 0;
  }
  emit(trajectory::profiles_to_csv(profiles));
  char buf[200];
  std::snprintf(buf, sizeof buf, "k_assess %d, k_exec %d; collapse at cot_start in %d of %zu traces\n", assess.k,
                exec.k, at_cot, traces.size());
  info(buf);
  return kOk;
}

struct SynthArgs {
  int hidden_dim = 32;
  int n_per_class = 100;
  double separation = 4.0;
  int layers = 1;
  std::vector<int> signal_layers;
  std::string positions = "last_input";
  std::string signal_positions;
  bool ramp = false;
  int rank = 0;
  double shared_fraction = 0.0;
  std::string domains = "numerical";

  int assess_rank = 16;
  int exec_rank = 4;
  int prompt_len = 32;
  int gen_len = 32;
  double noise = 0.05;
  int n_traces = 20;
  int layer = 0;

  std::string store;
  double p_baseline = 0.5;
  double p_steered = 0.5;
};

std::vector<PositionTag> tags_of(const std::string& s) {
  std::vector<PositionTag> out;
  for (const auto& t : split(s)) out.push_back(PositionTag::parse(t));
  return out;
}

int cmd_synth(const std::string& what, const SynthArgs& a) {
  if (g.out.empty()) throw CLI::ValidationError("--out", "synth needs an output directory");
  if (what == "snapshots") {
    SyntheticSnapshotSpec spec;
    spec.hidden_dim = a.hidden_dim;
    spec.n_per_class = a.n_per_class;
    spec.class_mean_separation = a.separation;
    spec.n_layers = a.layers;
    spec.signal_layers = a.signal_layers;
    spec.positions = tags_of(a.positions);
    spec.signal_positions = tags_of(a.signal_positions);
    spec.ramp_with_prompt_percent = a.ramp;
    if (a.rank > 0) spec.covariance_spectrum.assign(static_cast<std::size_t>(a.rank), 1.0);
    spec.shared_fraction = a.shared_fraction;
    spec.domains = split(a.domains);
    spec.seed = g.seed;
    generate_synthetic_snapshot(spec).write(g.out);
  } else if (what == "traces") {
    SyntheticTraceSpec spec;
    spec.hidden_dim = a.hidden_dim;
    spec.assess_rank = a.assess_rank;
    spec.exec_rank = a.exec_rank;
    spec.prompt_len = a.prompt_len;
    spec.gen_len = a.gen_len;
    spec.noise = a.noise;
    spec.layer_index = a.layer;
    spec.seed = g.seed;
    generate_synthetic_trace_store(spec, a.n_traces).write(g.out);
  } else {
    // Independent Bernoulli outcomes for every record of a store: a null
    // steering effect, handy for exercising the significance test.
    const Store store = Store::open(a.store);
    Rng rng(g.seed);
    std::string base = "record_id,correct\n", steered = base;
    for (const auto& r : store.manifest().records) {
      base += r.record_id + (rng.uniform() < a.p_baseline ? ",1\n" : ",0\n");
      steered += r.record_id + (rng.uniform() < a.p_steered ? ",1\n" : ",0\n");
    }
    fs::create_directories(g.out);
    emit(base, (fs::path(g.out) / "baseline.csv").string());
    emit(steered, (fs::path(g.out) / "steered.csv").string());
  }
  info("wrote " + g.out + "\n");
  return kOk;
}

int cmd_validate(const std::string& dir) {
  const auto problems = validate_store(dir);
  for (const auto& p : problems) std::cout << p << "\n";
  if (problems.empty()) info("store is valid\n");
  return problems.empty() ? kOk : kData;
}

int cmd_run(const std::string& config_path) {
  const std::string text = read_file(config_path);
  auto cfg = pipeline::validate_config(text, fs::path(config_path).parent_path());
  if (!g.out.empty()) cfg.out = g.out;
  if (g.threads > 1) cfg.threads = g.threads;
  const auto report = pipeline::run_pipeline(cfg);
  for (const auto& s : report.stages) {
    info(s.name + ": " + s.status + (s.error.empty() ? "" : " (" + s.error + ")") + "\n");
  }
  if (report.ok()) return kOk;
  for (const auto& s : report.stages) {
    if (s.status == "failed") return s.numeric_failure ? kNumeric : kData;
  }
  return kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actgeo: activation geometry toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (directory for synth and run); stdout when omitted");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress human-readable summaries on stderr");
  app.add_option("--threads", g.threads, "Worker threads for sweeps and bootstraps")->check(CLI::PositiveNumber);

  std::function<int()> action;

  CurateArgs ca;
  auto* curate = app.add_subcommand("curate", "Filter, balance and length-match a store's records");
  curate->add_option("--store", ca.store, "Store directory")->required();
  curate->add_option("--keywords", ca.keywords, "Banned format keywords")->delimiter(',');
  curate->add_option("--tolerance", ca.tolerance, "Length match tolerance in tokens")->capture_default_str();
  curate->add_option("--alpha-floor", ca.alpha_floor, "Minimum Welch p for the length test")->capture_default_str();
  curate->add_option("--strata", ca.strata)->check(CLI::IsMember({"domain_tag", "domain_and_length_bucket"}));
  curate->add_option("--bucket-width", ca.bucket_width)->capture_default_str();
  curate->callback([&] { action = [&] { return cmd_curate(ca); }; });

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe", "Probe sweeps and training");
  probe->require_subcommand(1);
  auto* sweep = probe->add_subcommand("sweep", "k-fold CV accuracy per layer or position");
  sweep->add_option("--store", pa.store)->required();
  sweep->add_option("--axis", pa.axis)->check(CLI::IsMember({"layer", "position"}))->capture_default_str();
  sweep->add_option("--families", pa.families, "all or a comma list")->capture_default_str();
  sweep->add_option("--k", pa.k)->capture_default_str();
  sweep->add_option("--position", pa.position, "Position for the layer axis")->capture_default_str();
  sweep->add_option("--layer", pa.layer, "Layer for the position axis (default: last)");
  sweep->callback([&] { action = [&] { return cmd_probe_sweep(pa); }; });
  auto* train = probe->add_subcommand("train", "Train one probe and write it as JSON");
  train->add_option("--store", pa.store)->required();
  train->add_option("--family", pa.family)->capture_default_str();
  train->add_option("--layer", pa.layer, "Layer (default: last)");
  train->add_option("--position", pa.position)->capture_default_str();
  train->add_flag("--grid", pa.grid, "Grid-search hyperparameters with k-fold CV");
  train->add_option("--k", pa.k)->capture_default_str();
  train->callback([&] { action = [&] { return cmd_probe_train(pa); }; });

  GeometryArgs ga;
  std::string geometry_what;
  auto* geometry = app.add_subcommand("geometry", "CKA matrices, centroid maps and PCA projections");
  geometry->add_option("what", geometry_what)->required()->check(CLI::IsMember({"cka", "centroids", "project"}));
  geometry->add_option("--store", ga.store)->required();
  geometry->add_option("--condition-a", ga.condition_a)->check(CLI::IsMember({"solved", "unsolved"}))->capture_default_str();
  geometry->add_option("--condition-b", ga.condition_b)->check(CLI::IsMember({"solved", "unsolved"}))->capture_default_str();
  geometry->add_option("--subsample", ga.subsample)->capture_default_str();
  geometry->add_option("--repeats", ga.repeats)->capture_default_str();
  geometry->add_option("--layer", ga.layer);
  geometry->add_option("--position", ga.position)->capture_default_str();
  geometry->callback([&] { action = [&] { return cmd_geometry(geometry_what, ga); }; });

  DimsArgs da;
  auto* dims_cmd = app.add_subcommand("dims", "Bootstrap participation ratios per group");
  dims_cmd->add_option("--store", da.store)->required();
  dims_cmd->add_option("--trace-store", da.trace_store, "Trace store for the prompt and cot groups");
  dims_cmd->add_option("--groups", da.groups, "solved,unsolved,prompt,cot")->capture_default_str();
  dims_cmd->add_option("--resamples", da.resamples)->capture_default_str();
  dims_cmd->add_option("--threshold", da.threshold)->capture_default_str();
  dims_cmd->add_option("--layer", da.layer);
  dims_cmd->add_option("--position", da.position)->capture_default_str();
  dims_cmd->add_option("--curves", da.curve_dir, "Directory for cumulative-variance CSVs");
  dims_cmd->callback([&] { action = [&] { return cmd_dims(da); }; });

  SteerArgs sa;
  auto* steer = app.add_subcommand("steer", "Belief-flip intervention along the probe direction");
  steer->add_option("--store", sa.store)->required();
  steer->add_option("--probe", sa.probe, "Logistic probe JSON")->required();
  steer->add_option("--alpha", sa.alpha, "auto or a number")->capture_default_str();
  steer->add_option("--sign", sa.sign)->check(CLI::IsMember({"to_solved", "to_unsolved"}))->capture_default_str();
  steer->add_option("--outcomes", sa.outcomes, "baseline.csv,steered.csv");
  steer->add_option("--target", sa.target, "Belief target for auto alpha")->capture_default_str();
  steer->add_option("--permutations", sa.permutations)->capture_default_str();
  steer->callback([&] { action = [&] { return cmd_steer(sa); }; });

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "Subspace-fit profiles and collapse detection");
  trace->add_option("--store", ta.store, "Trace store")->required();
  trace->add_option("--snapshot-store", ta.snapshot_store, "Snapshot store for the belief group");
  trace->add_option("--assess-group", ta.assess_group)->check(CLI::IsMember({"prompt", "cot", "belief"}))->capture_default_str();
  trace->add_option("--exec-group", ta.exec_group)->check(CLI::IsMember({"prompt", "cot", "belief"}))->capture_default_str();
  trace->add_option("--threshold", ta.threshold)->capture_default_str();
  trace->add_option("--layer", ta.layer);
  trace->callback([&] { action = [&] { return cmd_trace(ta); }; });

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  run->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  run->callback([&] { action = [&] { return cmd_run(config_path); }; });

  SynthArgs sy;
  std::string synth_what;
  auto* synth = app.add_subcommand("synth", "Generate synthetic stores");
  synth->add_option("what", synth_what)->required()->check(CLI::IsMember({"snapshots", "traces", "outcomes"}));
  synth->add_option("--hidden-dim", sy.hidden_dim)->capture_default_str();
  synth->add_option("--n-per-class", sy.n_per_class)->capture_default_str();
  synth->add_option("--separation", sy.separation)->capture_default_str();
  synth->add_option("--layers", sy.layers)->capture_default_str();
  synth->add_option("--signal-layers", sy.signal_layers)->delimiter(',');
  synth->add_option("--positions", sy.positions)->capture_default_str();
  synth->add_option("--signal-positions", sy.signal_positions);
  synth->add_flag("--ramp", sy.ramp, "Scale the class signal with prompt percent");
  synth->add_option("--rank", sy.rank, "Isotropic covariance of this rank (0 = full)");
  synth->add_option("--shared-fraction", sy.shared_fraction)->capture_default_str();
  synth->add_option("--domains", sy.domains)->capture_default_str();
  synth->add_option("--assess-rank", sy.assess_rank)->capture_default_str();
  synth->add_option("--exec-rank", sy.exec_rank)->capture_default_str();
  synth->add_option("--prompt-len", sy.prompt_len)->capture_default_str();
  synth->add_option("--gen-len", sy.gen_len)->capture_default_str();
  synth->add_option("--noise", sy.noise)->capture_default_str();
  synth->add_option("--n-traces", sy.n_traces)->capture_default_str();
  synth->add_option("--layer", sy.layer)->capture_default_str();
  synth->add_option("--store", sy.store, "Store whose records get outcomes");
  synth->add_option("--p-baseline", sy.p_baseline)->capture_default_str();
  synth->add_option("--p-steered", sy.p_steered)->capture_default_str();
  synth->callback([&] { action = [&] { return cmd_synth(synth_what, sy); }; });

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check a store and list every problem");
  validate->add_option("--store", validate_dir)->required();
  validate->callback([&] { action = [&] { return cmd_validate(validate_dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const pipeline::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}
