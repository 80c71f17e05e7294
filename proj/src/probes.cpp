#include "actgeo/probes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"
#include "probe_models.hpp"

namespace actgeo::probes {

using json = nlohmann::json;

std::string_view to_string(Family family) {
  switch (family) {
    case Family::logistic: return "logistic";
    case Family::rbf_kernel: return "rbf_kernel";
    case Family::gradient_boosted_trees: return "gradient_boosted_trees";
    case Family::mlp2: return "mlp2";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "logistic") return Family::logistic;
  if (text == "rbf_kernel" || text == "rbf") return Family::rbf_kernel;
  if (text == "gradient_boosted_trees" || text == "gbt") return Family::gradient_boosted_trees;
  if (text == "mlp2" || text == "mlp") return Family::mlp2;
  throw std::invalid_argument("unknown probe family '" + std::string(text) + "'");
}

ProbeSpec ProbeSpec::defaults(Family family) {
  ProbeSpec s;
  s.family = family;
  if (family == Family::rbf_kernel) s.C = 0.9;
  return s;
}

void ProbeSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("hyperparameter ") + name + " must be positive");
    }
  };
  switch (family) {
    case Family::logistic: positive(C, "C"); break;
    case Family::rbf_kernel:
      positive(C, "C");
      if (gamma) positive(*gamma, "gamma");
      break;
    case Family::gradient_boosted_trees:
      positive(n_trees, "n_trees");
      positive(max_depth, "max_depth");
      positive(learning_rate, "learning_rate");
      break;
    case Family::mlp2:
      positive(hidden_width, "hidden_width");
      positive(mlp_learning_rate, "mlp_learning_rate");
      positive(max_epochs, "max_epochs");
      positive(patience, "patience");
      break;
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  s.mean = X.colwise().mean();
  s.scale = ((X.rowwise() - s.mean).array().square().colwise().mean()).sqrt().matrix();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale(j) > 1e-12)) s.scale(j) = 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(Eigen::Index d) {
  return {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Ones(d)};
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(k)];
    k = x(n.feature) < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(k)].value;
}

namespace {

void check_inputs(const Eigen::MatrixXd& X, std::span<const int> y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("X rows and y length differ");
  }
  if (!X.allFinite()) throw DataError("activation matrix contains NaN or Inf");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  const std::size_t neg = y.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("single-class labels; need both classes");
  if (pos < 2 || neg < 2) throw std::invalid_argument("need at least 2 rows per class");
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(idx[r]);
  return out;
}

std::vector<int> labels_of(std::span<const int> y, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(y[static_cast<std::size_t>(i)]);
  return out;
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TrainedProbe train_probe(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y) {
  spec.validate();
  check_inputs(X, y);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y[i];

  TrainedProbe probe;
  probe.spec = spec;
  probe.input_dim = X.cols();
  probe.meta.n_train = y.size();
  switch (spec.family) {
    case Family::logistic: probe.params = detail::train_logistic(spec, X, yv); break;
    case Family::rbf_kernel: probe.params = detail::train_rbf(spec, X, yv); break;
    case Family::gradient_boosted_trees: probe.params = detail::train_gbt(spec, X, yv); break;
    case Family::mlp2: probe.params = detail::train_mlp(spec, X, y); break;
  }
  return probe;
}

Eigen::VectorXd predict_proba(const TrainedProbe& probe, const Eigen::MatrixXd& X) {
  if (X.cols() != probe.input_dim) {
    throw DataError("dimension mismatch: probe expects " + std::to_string(probe.input_dim) +
                    " columns, got " + std::to_string(X.cols()));
  }
  Eigen::VectorXd z;
  if (const auto* p = std::get_if<LogisticParams>(&probe.params)) {
    z = (X * p->w).array() + p->b;
  } else if (const auto* p = std::get_if<RbfParams>(&probe.params)) {
    // Platt: P = 1 / (1 + exp(A f + B))  ==  sigmoid(-(A f + B))
    z = -(p->platt_a * detail::rbf_decision(*p, X).array() + p->platt_b);
  } else if (const auto* p = std::get_if<GbtParams>(&probe.params)) {
    z.resize(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double m = p->base_margin;
      for (const auto& t : p->trees) m += t.predict(X.row(i));
      z(i) = m;
    }
  } else {
    z = detail::mlp_logits(std::get<MlpParams>(probe.params), X);
  }
  return z.unaryExpr([](double v) { return detail::sigmoid(v); });
}

double accuracy(const TrainedProbe& probe, const Eigen::MatrixXd& X, std::span<const int> y) {
  if (y.empty()) return 0.0;
  const Eigen::VectorXd p = predict_proba(probe, X);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int pred = p(static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
    correct += pred == y[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

// ---- serialization ----

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json row_json(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::RowVectorXd r = m.row(i);
    rows.push_back(row_json(r));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat_from(const json& j) {
  Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& rows = j.at("data");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto r = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(r.size()) != m.cols()) throw DataError("ragged matrix in probe file");
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = r[static_cast<std::size_t>(c)];
  }
  return m;
}

json standardizer_json(const Standardizer& s) {
  return {{"mean", row_json(s.mean)}, {"scale", row_json(s.scale)}};
}

Standardizer standardizer_from(const json& j) {
  return {vec_from(j.at("mean")).transpose(), vec_from(j.at("scale")).transpose()};
}

json spec_json(const ProbeSpec& s) {
  json j = {{"family", std::string(to_string(s.family))},
            {"C", s.C},
            {"n_trees", s.n_trees},
            {"max_depth", s.max_depth},
            {"learning_rate", s.learning_rate},
            {"hidden_width", s.hidden_width},
            {"mlp_learning_rate", s.mlp_learning_rate},
            {"max_epochs", s.max_epochs},
            {"patience", s.patience},
            {"standardize", s.standardize},
            {"seed", s.seed}};
  j["gamma"] = s.gamma ? json(*s.gamma) : json("scale");
  return j;
}

ProbeSpec spec_from(const json& j) {
  ProbeSpec s;
  s.family = parse_family(j.at("family").get<std::string>());
  s.C = j.at("C").get<double>();
  if (j.at("gamma").is_string()) {
    s.gamma.reset();
  } else {
    s.gamma = j.at("gamma").get<double>();
  }
  s.n_trees = j.at("n_trees").get<int>();
  s.max_depth = j.at("max_depth").get<int>();
  s.learning_rate = j.at("learning_rate").get<double>();
  s.hidden_width = j.at("hidden_width").get<int>();
  s.mlp_learning_rate = j.at("mlp_learning_rate").get<double>();
  s.max_epochs = j.at("max_epochs").get<int>();
  s.patience = j.at("patience").get<int>();
  s.standardize = j.at("standardize").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

std::string probe_to_json(const TrainedProbe& probe) {
  json j = {{"spec", spec_json(probe.spec)},
            {"input_dim", probe.input_dim},
            {"meta",
             {{"n_train", probe.meta.n_train},
              {"layer_index", probe.meta.layer_index},
              {"position_tag", probe.meta.position_tag}}}};
  json params;
  if (const auto* p = std::get_if<LogisticParams>(&probe.params)) {
    params = {{"w", vec_json(p->w)}, {"b", p->b}, {"iterations", p->iterations},
              {"gradient_norm", p->gradient_norm}};
  } else if (const auto* p = std::get_if<RbfParams>(&probe.params)) {
    params = {{"standardizer", standardizer_json(p->standardizer)},
              {"support_vectors", mat_json(p->support_vectors)},
              {"dual_coef", vec_json(p->dual_coef)},
              {"intercept", p->intercept},
              {"gamma", p->gamma},
              {"platt_a", p->platt_a},
              {"platt_b", p->platt_b}};
  } else if (const auto* p = std::get_if<GbtParams>(&probe.params)) {
    json trees = json::array();
    for (const auto& t : p->trees) {
      json nodes = json::array();
      for (const auto& n : t.nodes) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
      }
      trees.push_back(std::move(nodes));
    }
    params = {{"base_margin", p->base_margin}, {"trees", std::move(trees)}};
  } else {
    const auto& mp = std::get<MlpParams>(probe.params);
    params = {{"standardizer", standardizer_json(mp.standardizer)},
              {"w1", mat_json(mp.w1)},
              {"b1", vec_json(mp.b1)},
              {"w2", vec_json(mp.w2)},
              {"b2", mp.b2},
              {"epochs_run", mp.epochs_run},
              {"best_epoch", mp.best_epoch}};
  }
  j["params"] = std::move(params);
  return j.dump(1) + "\n";
}

TrainedProbe probe_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    TrainedProbe probe;
    probe.spec = spec_from(j.at("spec"));
    probe.input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto& m = j.at("meta");
    probe.meta.n_train = m.at("n_train").get<std::size_t>();
    probe.meta.layer_index = m.at("layer_index").get<int>();
    probe.meta.position_tag = m.at("position_tag").get<std::string>();
    const auto& p = j.at("params");
    switch (probe.spec.family) {
      case Family::logistic: {
        LogisticParams lp;
        lp.w = vec_from(p.at("w"));
        lp.b = p.at("b").get<double>();
        lp.iterations = p.at("iterations").get<int>();
        lp.gradient_norm = p.at("gradient_norm").get<double>();
        if (lp.w.size() != probe.input_dim) throw DataError("probe weight length != input_dim");
        probe.params = std::move(lp);
        break;
      }
      case Family::rbf_kernel: {
        RbfParams rp;
        rp.standardizer = standardizer_from(p.at("standardizer"));
        rp.support_vectors = mat_from(p.at("support_vectors"));
        rp.dual_coef = vec_from(p.at("dual_coef"));
        rp.intercept = p.at("intercept").get<double>();
        rp.gamma = p.at("gamma").get<double>();
        rp.platt_a = p.at("platt_a").get<double>();
        rp.platt_b = p.at("platt_b").get<double>();
        probe.params = std::move(rp);
        break;
      }
      case Family::gradient_boosted_trees: {
        GbtParams gp;
        gp.base_margin = p.at("base_margin").get<double>();
        for (const auto& t : p.at("trees")) {
          Tree tree;
          for (const auto& n : t) {
            tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                  n.at(3).get<int>(), n.at(4).get<double>()});
          }
          gp.trees.push_back(std::move(tree));
        }
        probe.params = std::move(gp);
        break;
      }
      case Family::mlp2: {
        MlpParams mp;
        mp.standardizer = standardizer_from(p.at("standardizer"));
        mp.w1 = mat_from(p.at("w1"));
        mp.b1 = vec_from(p.at("b1"));
        mp.w2 = vec_from(p.at("w2"));
        mp.b2 = p.at("b2").get<double>();
        mp.epochs_run = p.at("epochs_run").get<int>();
        mp.best_epoch = p.at("best_epoch").get<int>();
        probe.params = std::move(mp);
        break;
      }
    }
    return probe;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed probe file: ") + e.what());
  }
}

// ---- evaluation ----

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] == 1 ? 1 : 0].push_back(static_cast<int>(i));
  for (const auto& c : by_class) {
    if (static_cast<int>(c.size()) < k) {
      throw std::invalid_argument("class with " + std::to_string(c.size()) +
                                  " rows is smaller than k = " + std::to_string(k));
    }
  }
  std::vector<int> fold(y.size(), 0);
  Rng rng(seed);
  int offset = 0;
  for (auto& c : by_class) {
    rng.shuffle(c);
    for (std::size_t r = 0; r < c.size(); ++r) {
      fold[static_cast<std::size_t>(c[r])] = static_cast<int>((r + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(k));
    }
    // Continue dealing where the previous class stopped so fold sizes stay even.
    offset = static_cast<int>((c.size() + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(k));
  }
  return fold;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(std::span<const int> y,
                                                               double holdout_fraction,
                                                               std::uint64_t seed) {
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] == 1 ? 1 : 0].push_back(static_cast<int>(i));
  Rng rng(seed);
  std::vector<int> keep, hold;
  for (auto& c : by_class) {
    rng.shuffle(c);
    std::size_t nh = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(c.size())));
    if (c.size() >= 2) nh = std::clamp<std::size_t>(nh, 1, c.size() - 1);
    else nh = 0;
    hold.insert(hold.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(nh));
    keep.insert(keep.end(), c.begin() + static_cast<std::ptrdiff_t>(nh), c.end());
  }
  std::sort(keep.begin(), keep.end());
  std::sort(hold.begin(), hold.end());
  return {keep, hold};
}

CvResult k_fold_cv(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y, int k,
                   std::uint64_t seed) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("X rows and y length differ");
  }
  const std::vector<int> fold = stratified_folds(y, k, seed);
  CvResult out;
  for (int f = 0; f < k; ++f) {
    std::vector<int> train, test;
    for (std::size_t i = 0; i < fold.size(); ++i) {
      (fold[i] == f ? test : train).push_back(static_cast<int>(i));
    }
    const TrainedProbe probe = train_probe(spec, rows_of(X, train), labels_of(y, train));
    out.fold_accuracies.push_back(accuracy(probe, rows_of(X, test), labels_of(y, test)));
  }
  out.mean = std::accumulate(out.fold_accuracies.begin(), out.fold_accuracies.end(), 0.0) / k;
  out.std = sample_std(out.fold_accuracies);
  return out;
}

Grid default_grid(Family family) {
  switch (family) {
    case Family::logistic: return {{"C", {0.01, 0.1, 1.0, 10.0, 100.0}}};
    case Family::rbf_kernel: return {{"C", {0.1, 1.0, 10.0, 100.0}}, {"gamma", {0.0, 0.001, 0.01, 0.1}}};
    case Family::gradient_boosted_trees:
      return {{"n_trees", {100, 200, 300}}, {"max_depth", {3, 5, 7}}, {"learning_rate", {0.01, 0.1, 0.2}}};
    case Family::mlp2:
      return {{"hidden_width", {128, 256, 512}}, {"mlp_learning_rate", {1e-4, 1e-3, 1e-2}}};
  }
  return {};
}

void set_hyperparameter(ProbeSpec& spec, const std::string& name, double value) {
  auto as_int = [&](int& field) {
    if (value != std::floor(value)) throw std::invalid_argument(name + " must be an integer");
    field = static_cast<int>(value);
  };
  if (name == "C") spec.C = value;
  else if (name == "gamma") spec.gamma = value == 0.0 ? std::nullopt : std::optional<double>(value);
  else if (name == "n_trees") as_int(spec.n_trees);
  else if (name == "max_depth") as_int(spec.max_depth);
  else if (name == "learning_rate") spec.learning_rate = value;
  else if (name == "hidden_width") as_int(spec.hidden_width);
  else if (name == "mlp_learning_rate") spec.mlp_learning_rate = value;
  else if (name == "max_epochs") as_int(spec.max_epochs);
  else if (name == "patience") as_int(spec.patience);
  else throw std::invalid_argument("unknown hyperparameter '" + name + "'");
}

namespace {

std::array<double, 9> canonical_tuple(const ProbeSpec& s) {
  return {s.C, s.gamma.value_or(0.0), static_cast<double>(s.n_trees),
          static_cast<double>(s.max_depth), s.learning_rate, static_cast<double>(s.hidden_width),
          s.mlp_learning_rate, static_cast<double>(s.max_epochs), static_cast<double>(s.patience)};
}

}  // namespace

GridSearchResult grid_search(Family family, const Grid& grid, const Eigen::MatrixXd& X,
                             std::span<const int> y, int k, std::uint64_t seed,
                             const ProbeSpec& base) {
  if (grid.empty() || std::any_of(grid.begin(), grid.end(), [](const auto& kv) { return kv.second.empty(); })) {
    throw std::invalid_argument("grid must be non-empty with at least one value per axis");
  }
  std::vector<std::pair<std::string, std::vector<double>>> axes(grid.begin(), grid.end());
  std::vector<std::size_t> pos(axes.size(), 0);

  GridSearchResult result;
  const GridCell* best = nullptr;
  bool done = false;
  while (!done) {
    ProbeSpec spec = base;
    spec.family = family;
    for (std::size_t a = 0; a < axes.size(); ++a) set_hyperparameter(spec, axes[a].first, axes[a].second[pos[a]]);
    result.cells.push_back({spec, k_fold_cv(spec, X, y, k, seed)});
    // odometer increment, last axis fastest
    done = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++pos[a] < axes[a].second.size()) {
        done = false;
        break;
      }
      pos[a] = 0;
    }
  }
  constexpr double kTie = 1e-12;
  for (const auto& cell : result.cells) {
    if (best == nullptr || cell.cv.mean > best->cv.mean + kTie ||
        (std::fabs(cell.cv.mean - best->cv.mean) <= kTie &&
         canonical_tuple(cell.spec) < canonical_tuple(best->spec))) {
      best = &cell;
    }
  }
  result.best = best->spec;
  result.model = train_probe(result.best, X, y);
  return result;
}

HeldOutEvaluation tune_and_evaluate(Family family, const Grid& grid, const Eigen::MatrixXd& X,
                                    std::span<const int> y, int k, std::uint64_t seed) {
  auto [train, test] = stratified_split(y, 0.2, derive_seed(seed, 1));
  const Eigen::MatrixXd Xtr = rows_of(X, train);
  const std::vector<int> ytr = labels_of(y, train);
  auto [rest, validation] = stratified_split(ytr, 0.2, derive_seed(seed, 2));
  (void)rest;

  HeldOutEvaluation out;
  out.search = grid_search(family, grid, rows_of(Xtr, validation), labels_of(ytr, validation), k, seed);
  out.search.model = train_probe(out.search.best, Xtr, ytr);
  out.test_accuracy = accuracy(out.search.model, rows_of(X, test), labels_of(y, test));
  out.n_train = train.size();
  out.n_test = test.size();
  return out;
}

std::string grid_search_to_json(const GridSearchResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"spec", spec_json(c.spec)}, {"mean", c.cv.mean}, {"std", c.cv.std},
                     {"fold_accuracies", c.cv.fold_accuracies}});
  }
  json j = {{"best", spec_json(result.best)}, {"cells", std::move(cells)}};
  return j.dump(2) + "\n";
}

}  // namespace actgeo::probes
