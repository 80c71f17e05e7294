#include "actgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"
#include "parallel.hpp"

namespace actgeo::geometry {

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& X) { return X.rowwise() - X.colwise().mean(); }

// Self term ||Xc^T Xc||_F computed through whichever Gram is smaller.
double self_norm(const Eigen::MatrixXd& Xc) {
  if (Xc.rows() <= Xc.cols()) return (Xc * Xc.transpose()).norm();
  return (Xc.transpose() * Xc).norm();
}

double cross_term(const Eigen::MatrixXd& Xc, const Eigen::MatrixXd& Yc) {
  if (Xc.rows() < std::min(Xc.cols(), Yc.cols())) {
    const Eigen::MatrixXd K = Xc * Xc.transpose();
    const Eigen::MatrixXd L = Yc * Yc.transpose();
    return (K.array() * L.array()).sum();
  }
  return (Yc.transpose() * Xc).squaredNorm();
}

double cka_centered(const Eigen::MatrixXd& Xc, double nx, const Eigen::MatrixXd& Yc, double ny) {
  return std::clamp(cross_term(Xc, Yc) / (nx * ny), 0.0, 1.0);
}

struct Prepared {
  Eigen::MatrixXd c;
  double norm = 0.0;
};

Prepared prepare(const Eigen::MatrixXd& X, const char* what) {
  Prepared p{centered(X), 0.0};
  p.norm = self_norm(p.c);
  if (!(p.norm > 0.0)) throw NumericError(std::string("zero-variance input to CKA (") + what + ")");
  return p;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
  return out;
}

std::vector<Eigen::Index> sorted_subsample(Eigen::Index n, Eigen::Index m, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  rng.shuffle(idx);
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double linear_cka(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  if (X.rows() != Y.rows()) {
    throw DataError("CKA row mismatch: " + std::to_string(X.rows()) + " vs " +
                    std::to_string(Y.rows()));
  }
  if (X.rows() < 2) throw DataError("CKA needs at least 2 rows");
  const Prepared px = prepare(X, "X");
  const Prepared py = prepare(Y, "Y");
  return cka_centered(px.c, px.norm, py.c, py.norm);
}

CkaMatrix cka_layer_matrix(std::span<const int> layers, std::span<const Eigen::MatrixXd> a,
                           std::span<const Eigen::MatrixXd> b, bool same_condition,
                           const CkaOptions& options) {
  if (layers.size() != a.size() || layers.size() != b.size()) {
    throw std::invalid_argument("one matrix per layer is required for each condition");
  }
  if (layers.empty()) throw DataError("no layers to compare");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() == 0 || b[i].rows() == 0) {
      throw DataError("empty condition at layer " + std::to_string(layers[i]));
    }
    if (a[i].rows() != a[0].rows() || b[i].rows() != b[0].rows()) {
      throw DataError("record sets differ across layers");
    }
  }
  const std::size_t nl = layers.size();
  CkaMatrix m;
  m.row_layers.assign(layers.begin(), layers.end());
  m.col_layers = m.row_layers;
  m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nl), static_cast<Eigen::Index>(nl));

  if (same_condition) {
    std::vector<Prepared> p(nl);
    detail::parallel_for(nl, options.threads, [&](std::size_t i) { p[i] = prepare(a[i], "layer"); });
    detail::parallel_for(nl * nl, options.threads, [&](std::size_t cell) {
      const std::size_t i = cell / nl, j = cell % nl;
      if (j < i) return;
      const double v = i == j ? 1.0 : cka_centered(p[i].c, p[i].norm, p[j].c, p[j].norm);
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    return m;
  }

  if (options.subsample < 2 || options.repeats < 1) {
    throw std::invalid_argument("CKA subsample must be >= 2 and repeats >= 1");
  }
  const Eigen::Index n = std::min<Eigen::Index>({options.subsample, a[0].rows(), b[0].rows()});
  if (n < 2) throw DataError("cross-condition CKA needs at least 2 records per condition");
  for (int r = 0; r < options.repeats; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    const auto ia = sorted_subsample(a[0].rows(), n, rng);
    const auto ib = sorted_subsample(b[0].rows(), n, rng);
    std::vector<Prepared> pa(nl), pb(nl);
    detail::parallel_for(nl, options.threads, [&](std::size_t i) {
      pa[i] = prepare(take_rows(a[i], ia), "condition a");
      pb[i] = prepare(take_rows(b[i], ib), "condition b");
    });
    Eigen::MatrixXd acc(m.values.rows(), m.values.cols());
    detail::parallel_for(nl * nl, options.threads, [&](std::size_t cell) {
      const std::size_t i = cell / nl, j = cell % nl;
      acc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cka_centered(pa[i].c, pa[i].norm, pb[j].c, pb[j].norm);
    });
    m.values += acc;
  }
  m.values /= options.repeats;
  return m;
}

CkaMatrix cka_layer_matrix(const Store& store, Label condition_a, Label condition_b,
                           const CkaOptions& options) {
  const std::vector<int> layers = store.snapshot_layers();
  if (layers.empty()) throw DataError("store has no snapshot layers");
  std::vector<Eigen::MatrixXd> a, b;
  for (int layer : layers) {
    const SnapshotTable t = load_snapshots(store, layer, options.position);
    const SnapshotTable ta = t.subset(condition_a);
    if (ta.size() == 0) {
      throw DataError("condition " + std::string(to_string(condition_a)) + " is empty at layer " +
                      std::to_string(layer));
    }
    a.push_back(ta.X);
    if (condition_a != condition_b) {
      const SnapshotTable tb = t.subset(condition_b);
      if (tb.size() == 0) {
        throw DataError("condition " + std::string(to_string(condition_b)) +
                        " is empty at layer " + std::to_string(layer));
      }
      b.push_back(tb.X);
    }
  }
  const bool same = condition_a == condition_b;
  CkaMatrix m = cka_layer_matrix(layers, a, same ? std::span<const Eigen::MatrixXd>(a) : b, same, options);
  m.condition_a = condition_a;
  m.condition_b = condition_b;
  return m;
}

std::string CkaMatrix::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "layer";
  for (int c : col_layers) os << "," << c;
  os << "\n";
  for (std::size_t i = 0; i < row_layers.size(); ++i) {
    os << row_layers[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << "," << values(static_cast<Eigen::Index>(i), j);
    os << "\n";
  }
  return os.str();
}

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("cosine similarity of a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

std::vector<CentroidSimilarityMap> centroid_similarity_map(std::span<const SnapshotTable> tables) {
  const SnapshotTable* last = nullptr;
  std::map<int, const SnapshotTable*> by_percent;
  for (const auto& t : tables) {
    if (t.position == PositionTag::last_input()) last = &t;
    const auto p = t.position.prompt_percent();
    if (!p) continue;
    if (!by_percent.emplace(*p, &t).second) {
      throw DataError("two position tags map to " + std::to_string(*p) + "% of the prompt");
    }
  }
  if (last == nullptr || last->size() == 0) {
    throw DataError("last_input activations are required to define centroids");
  }
  std::vector<CentroidSimilarityMap> out;
  for (Label target : {Label::solved, Label::unsolved}) {
    const SnapshotTable ref = last->subset(target);
    if (ref.size() == 0) {
      throw DataError("no " + std::string(to_string(target)) + " records at last_input");
    }
    const Eigen::VectorXd centroid = ref.X.colwise().mean().transpose();
    CentroidSimilarityMap map;
    map.target = target;
    map.cols = {last->layer};
    map.values.resize(static_cast<Eigen::Index>(by_percent.size()), 1);
    Eigen::Index row = 0;
    for (const auto& [pct, table] : by_percent) {
      const SnapshotTable s = table->subset(target);
      if (s.size() == 0) {
        throw DataError("no " + std::string(to_string(target)) + " records at " +
                        table->position.to_string());
      }
      double sum = 0.0;
      for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
        sum += cosine_similarity(s.X.row(i).transpose(), centroid);
      }
      map.rows.push_back(pct);
      map.values(row++, 0) = sum / static_cast<double>(s.X.rows());
    }
    out.push_back(std::move(map));
  }
  return out;
}

std::vector<CentroidSimilarityMap> centroid_similarity_map(const Store& store,
                                                           std::vector<int> layers) {
  if (layers.empty()) layers = store.snapshot_layers();
  if (layers.empty()) throw DataError("store has no snapshot layers");
  std::vector<CentroidSimilarityMap> out;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    std::vector<SnapshotTable> tables;
    for (const auto& tag : snapshot_positions(store, layers[li])) {
      tables.push_back(load_snapshots(store, layers[li], tag));
    }
    if (tables.empty()) throw DataError("no snapshots at layer " + std::to_string(layers[li]));
    auto maps = centroid_similarity_map(tables);
    if (li == 0) {
      out = std::move(maps);
      continue;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (maps[k].rows != out[k].rows) {
        throw DataError("layer " + std::to_string(layers[li]) +
                        " has a different set of prompt positions");
      }
      out[k].cols.push_back(layers[li]);
      out[k].values.conservativeResize(Eigen::NoChange, out[k].values.cols() + 1);
      out[k].values.rightCols(1) = maps[k].values;
    }
  }
  return out;
}

std::string CentroidSimilarityMap::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "percent";
  for (int c : cols) os << ",layer_" << c;
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << "," << values(static_cast<Eigen::Index>(i), j);
    os << "\n";
  }
  return os.str();
}

Projection2d pca_project_2d(const Eigen::MatrixXd& X) {
  if (X.rows() < 3) throw DataError("PCA projection needs at least 3 rows");
  const Eigen::MatrixXd Xc = centered(X);
  const double total = Xc.squaredNorm();
  if (!(total > 0.0)) throw NumericError("PCA projection of a rank-0 matrix");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Projection2d out;
  out.components = Eigen::MatrixXd::Zero(X.cols(), 2);
  const Eigen::Index kept = std::min<Eigen::Index>(2, svd.matrixV().cols());
  for (Eigen::Index c = 0; c < kept; ++c) {
    Eigen::VectorXd v = svd.matrixV().col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.components.col(c) = v;
    out.explained[c] = s(c) * s(c) / total;
  }
  out.coordinates = Xc * out.components;
  return out;
}

std::string Projection2d::to_csv(std::span<const std::string> ids,
                                 std::span<const Label> labels) const {
  std::ostringstream os;
  os.precision(10);
  os << "record_id,label,pc1,pc2\n";
  for (Eigen::Index i = 0; i < coordinates.rows(); ++i) {
    const auto r = static_cast<std::size_t>(i);
    os << (r < ids.size() ? ids[r] : std::to_string(i)) << ","
       << (r < labels.size() ? std::string(to_string(labels[r])) : "") << "," << coordinates(i, 0)
       << "," << coordinates(i, 1) << "\n";
  }
  return os.str();
}

}  // namespace actgeo::geometry
