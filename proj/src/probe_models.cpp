#include "probe_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"

namespace actgeo::probes::detail {

namespace {

// Numerically stable log(1 + exp(z)).
double log1pexp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression: Newton / IRLS on
//   sum_i [log(1 + e^{eta_i}) - y_i eta_i] + ||w||^2 / (2C),  eta = Xw + b
// The bias is not penalised.

LogisticParams train_logistic(const ProbeSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
  const Standardizer st = spec.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
  const Eigen::MatrixXd Z = st.apply(X);
  const Eigen::Index n = Z.rows();
  const Eigen::Index d = Z.cols();
  const double lambda = 1.0 / spec.C;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  auto objective = [&](const Eigen::VectorXd& ww, double bb) {
    const Eigen::VectorXd eta = (Z * ww).array() + bb;
    double f = 0.5 * lambda * ww.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) f += log1pexp(eta(i)) - y(i) * eta(i);
    return f;
  };

  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 200;
  LogisticParams out;
  double f = objective(w, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd eta = (Z * w).array() + b;
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(eta(i));
      s(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd r = p - y;
    Eigen::VectorXd g(d + 1);
    g.head(d) = Z.transpose() * r + lambda * w;
    g(d) = r.sum();
    out.gradient_norm = g.norm();
    out.iterations = iter;
    if (out.gradient_norm <= kTol) break;

    Eigen::MatrixXd H(d + 1, d + 1);
    const Eigen::MatrixXd SZ = Z.array().colwise() * s.array();
    H.topLeftCorner(d, d).noalias() = Z.transpose() * SZ;
    H.topLeftCorner(d, d).diagonal().array() += lambda;
    H.topRightCorner(d, 1) = SZ.colwise().sum().transpose();
    H.bottomLeftCorner(1, d) = H.topRightCorner(d, 1).transpose();
    H(d, d) = s.sum() + 1e-12;
    const Eigen::VectorXd step = H.ldlt().solve(-g);

    // Backtracking line search; the slack term absorbs roundoff in f near the optimum.
    double t = 1.0;
    bool accepted = false;
    const double slope = g.dot(step);
    for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
      const Eigen::VectorXd w_new = w + t * step.head(d);
      const double b_new = b + t * step(d);
      const double f_new = objective(w_new, b_new);
      if (f_new <= f + 1e-4 * t * slope + 1e-12 * std::fabs(f)) {
        w = w_new;
        b = b_new;
        f = f_new;
        accepted = true;
      }
    }
    if (!accepted) break;
    out.iterations = iter + 1;
  }

  // Fold the standardisation into raw-space weights.
  out.w = (w.array() / st.scale.transpose().array()).matrix();
  out.b = b - (st.mean.transpose().array() * out.w.array()).sum();
  return out;
}

// ---------------------------------------------------------------------------
// RBF SVM: SMO with second-order working-set selection on the hinge dual,
// followed by Platt scaling of the training decision values.

namespace {

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma) {
  const Eigen::VectorXd na = A.rowwise().squaredNorm();
  const Eigen::VectorXd nb = B.rowwise().squaredNorm();
  Eigen::MatrixXd K = -2.0 * A * B.transpose();
  K.colwise() += na;
  K.rowwise() += nb.transpose();
  return (-gamma * K.array().max(0.0)).exp().matrix();
}

struct PlattFit {
  double a;
  double b;
};

PlattFit fit_platt(const Eigen::VectorXd& dec, const Eigen::VectorXd& y01) {
  const Eigen::Index n = dec.size();
  double prior1 = y01.sum();
  double prior0 = static_cast<double>(n) - prior1;
  const int max_iter = 100;
  const double min_step = 1e-10, sigma = 1e-12, eps = 1e-5;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = y01(i) > 0.5 ? hi : lo;

  double A = 0.0;
  double B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto fval_at = [&](double a, double b) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double fApB = dec(i) * a + b;
      if (fApB >= 0)
        f += t(i) * fApB + std::log1p(std::exp(-fApB));
      else
        f += (t(i) - 1.0) * fApB + std::log1p(std::exp(fApB));
    }
    return f;
  };
  double fval = fval_at(A, B);
  for (int iter = 0; iter < max_iter; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double fApB = dec(i) * A + B;
      double p, q;
      if (fApB >= 0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += dec(i) * dec(i) * d2;
      h22 += d2;
      h21 += dec(i) * d2;
      const double d1 = t(i) - p;
      g1 += dec(i) * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < eps && std::fabs(g2) < eps) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= min_step) {
      const double newA = A + step * dA;
      const double newB = B + step * dB;
      const double newf = fval_at(newA, newB);
      if (newf < fval + 1e-4 * step * gd) {
        A = newA;
        B = newB;
        fval = newf;
        break;
      }
      step *= 0.5;
    }
    if (step < min_step) break;
  }
  return {A, B};
}

}  // namespace

RbfParams train_rbf(const ProbeSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y01) {
  RbfParams out;
  out.standardizer = spec.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
  const Eigen::MatrixXd Z = out.standardizer.apply(X);
  const Eigen::Index n = Z.rows();
  if (spec.gamma) {
    out.gamma = *spec.gamma;
  } else {
    const double mean = Z.mean();
    const double var = (Z.array() - mean).square().mean();
    out.gamma = var > 0.0 ? 1.0 / (static_cast<double>(Z.cols()) * var) : 1.0;
  }
  const Eigen::MatrixXd K = rbf_kernel(Z, Z, out.gamma);
  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) ys(i) = y01(i) > 0.5 ? 1.0 : -1.0;

  const double C = spec.C;
  constexpr double kTau = 1e-12;
  constexpr double kEps = 1e-3;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);
  auto upper = [&](Eigen::Index i) { return alpha(i) >= C; };
  auto lower = [&](Eigen::Index i) { return alpha(i) <= 0.0; };

  const long max_iter = std::max<long>(10000000L, 100L * static_cast<long>(n));
  for (long iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (ys(t) > 0) {
        if (!upper(t) && -G(t) >= gmax) {
          gmax = -G(t);
          i = t;
        }
      } else if (!lower(t) && G(t) >= gmax) {
        gmax = G(t);
        i = t;
      }
    }
    if (i < 0) break;
    double obj_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (ys(t) > 0) {
        if (!lower(t)) {
          const double grad_diff = gmax + G(t);
          gmax2 = std::max(gmax2, G(t));
          if (grad_diff > 0) {
            const double quad = K(i, i) + K(t, t) - 2.0 * ys(t) * K(i, t);
            const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
            if (obj <= obj_min) {
              j = t;
              obj_min = obj;
            }
          }
        }
      } else if (!upper(t)) {
        const double grad_diff = gmax - G(t);
        gmax2 = std::max(gmax2, -G(t));
        if (grad_diff > 0) {
          const double quad = K(i, i) + K(t, t) + 2.0 * ys(t) * K(i, t);
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) {
            j = t;
            obj_min = obj;
          }
        }
      }
    }
    if (gmax + gmax2 < kEps || j < 0) break;

    const double qij = ys(i) * ys(j) * K(i, j);
    const double old_ai = alpha(i), old_aj = alpha(j);
    if (ys(i) != ys(j)) {
      double quad = K(i, i) + K(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G(i) - G(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = C - diff;
        }
      } else if (alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G(i) - G(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = sum - C;
        }
        if (alpha(j) > C) {
          alpha(j) = C;
          alpha(i) = sum - C;
        }
      } else {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = sum;
        }
        if (alpha(i) < 0) {
          alpha(i) = 0;
          alpha(j) = sum;
        }
      }
    }
    const double dai = alpha(i) - old_ai;
    const double daj = alpha(j) - old_aj;
    // G_k += Q_ki dai + Q_kj daj with Q_kl = y_k y_l K_kl
    G.array() += ys.array() * (K.col(i).array() * (ys(i) * dai) + K.col(j).array() * (ys(j) * daj));
  }

  // rho from free support vectors, falling back to the midpoint of bounds.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yG = ys(i) * G(i);
    if (upper(i)) {
      if (ys(i) < 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else if (lower(i)) {
      if (ys(i) > 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else {
      ++n_free;
      sum_free += yG;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha(i) > 0.0) sv.push_back(i);
  }
  out.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), Z.cols());
  out.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    out.support_vectors.row(static_cast<Eigen::Index>(s)) = Z.row(sv[s]);
    out.dual_coef(static_cast<Eigen::Index>(s)) = alpha(sv[s]) * ys(sv[s]);
  }
  out.intercept = -rho;

  Eigen::VectorXd dec(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = out.intercept;
    for (std::size_t s = 0; s < sv.size(); ++s) {
      f += out.dual_coef(static_cast<Eigen::Index>(s)) * K(sv[s], i);
    }
    dec(i) = f;
  }
  const PlattFit pf = fit_platt(dec, y01);
  out.platt_a = pf.a;
  out.platt_b = pf.b;
  return out;
}

Eigen::VectorXd rbf_decision(const RbfParams& p, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd Z = p.standardizer.apply(X);
  if (p.support_vectors.rows() == 0) return Eigen::VectorXd::Constant(X.rows(), p.intercept);
  const Eigen::MatrixXd K = rbf_kernel(Z, p.support_vectors, p.gamma);
  return (K * p.dual_coef).array() + p.intercept;
}

// ---------------------------------------------------------------------------
// Gradient-boosted trees: second-order logistic boosting, exact greedy splits
// found level by level over presorted feature columns.

namespace {

constexpr double kLambda = 1.0;
constexpr double kMinChildWeight = 1.0;
constexpr double kMinSplitGain = 1e-6;

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

}  // namespace

GbtParams train_gbt(const ProbeSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = static_cast<int>(X.rows());
  const auto d = static_cast<int>(X.cols());
  std::vector<std::vector<int>> sorted(static_cast<std::size_t>(d));
  for (int f = 0; f < d; ++f) {
    auto& idx = sorted[static_cast<std::size_t>(f)];
    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
  }

  GbtParams out;
  Eigen::VectorXd margin = Eigen::VectorXd::Constant(n, out.base_margin);
  std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
  std::vector<int> node_of(static_cast<std::size_t>(n));

  for (int t = 0; t < spec.n_trees; ++t) {
    for (int i = 0; i < n; ++i) {
      const double p = sigmoid(margin(i));
      g[static_cast<std::size_t>(i)] = p - y(i);
      h[static_cast<std::size_t>(i)] = std::max(p * (1.0 - p), 1e-16);
    }
    Tree tree;
    tree.nodes.push_back({});
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier = {0};

    for (int depth = 0; depth <= spec.max_depth && !frontier.empty(); ++depth) {
      const std::size_t m = tree.nodes.size();
      std::vector<double> G(m, 0.0), H(m, 0.0);
      for (int i = 0; i < n; ++i) {
        const int nd = node_of[static_cast<std::size_t>(i)];
        if (nd < 0) continue;
        G[static_cast<std::size_t>(nd)] += g[static_cast<std::size_t>(i)];
        H[static_cast<std::size_t>(nd)] += h[static_cast<std::size_t>(i)];
      }
      std::vector<SplitCandidate> best(m);
      if (depth < spec.max_depth) {
        std::vector<double> GL(m), HL(m), prev(m);
        std::vector<char> seen(m);
        for (int f = 0; f < d; ++f) {
          std::fill(GL.begin(), GL.end(), 0.0);
          std::fill(HL.begin(), HL.end(), 0.0);
          std::fill(seen.begin(), seen.end(), 0);
          for (int i : sorted[static_cast<std::size_t>(f)]) {
            const int nd = node_of[static_cast<std::size_t>(i)];
            if (nd < 0) continue;
            const auto u = static_cast<std::size_t>(nd);
            const double x = X(i, f);
            if (seen[u] && x > prev[u]) {
              const double hr = H[u] - HL[u];
              if (HL[u] >= kMinChildWeight && hr >= kMinChildWeight) {
                const double gr = G[u] - GL[u];
                const double gain = 0.5 * (GL[u] * GL[u] / (HL[u] + kLambda) +
                                           gr * gr / (hr + kLambda) -
                                           G[u] * G[u] / (H[u] + kLambda));
                if (gain > best[u].gain) best[u] = {gain, f, 0.5 * (prev[u] + x)};
              }
            }
            GL[u] += g[static_cast<std::size_t>(i)];
            HL[u] += h[static_cast<std::size_t>(i)];
            prev[u] = x;
            seen[u] = 1;
          }
        }
      }
      std::vector<int> next;
      for (int nd : frontier) {
        const auto u = static_cast<std::size_t>(nd);
        if (best[u].feature >= 0 && best[u].gain > kMinSplitGain) {
          const int left = static_cast<int>(tree.nodes.size());
          tree.nodes.push_back({});
          tree.nodes.push_back({});
          TreeNode& node = tree.nodes[u];
          node.feature = best[u].feature;
          node.threshold = best[u].threshold;
          node.left = left;
          node.right = left + 1;
          next.push_back(left);
          next.push_back(left + 1);
        } else {
          tree.nodes[u].value = -spec.learning_rate * G[u] / (H[u] + kLambda);
        }
      }
      // Route samples of split nodes to their children; leaves go inactive.
      for (int i = 0; i < n; ++i) {
        const int nd = node_of[static_cast<std::size_t>(i)];
        if (nd < 0) continue;
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(nd)];
        if (node.feature < 0) {
          node_of[static_cast<std::size_t>(i)] = -1;
        } else {
          node_of[static_cast<std::size_t>(i)] = X(i, node.feature) < node.threshold ? node.left : node.right;
        }
      }
      frontier = std::move(next);
    }
    for (int i = 0; i < n; ++i) margin(i) += tree.predict(X.row(i));
    out.trees.push_back(std::move(tree));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-layer MLP (ReLU hidden layer, sigmoid output), full-batch Adam on the
// mean binary cross-entropy, early stopping on a stratified 10% holdout.

namespace {

double bce(const Eigen::VectorXd& logits, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) s += log1pexp(logits(i)) - y(i) * logits(i);
  return logits.size() > 0 ? s / static_cast<double>(logits.size()) : 0.0;
}

struct Adam {
  Eigen::ArrayXXd m, v;
  void init(Eigen::Index r, Eigen::Index c) {
    m = Eigen::ArrayXXd::Zero(r, c);
    v = Eigen::ArrayXXd::Zero(r, c);
  }
  template <typename Param, typename Grad>
  void step(Param& p, const Grad& g, double lr, int t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * g.array();
    v = b2 * v + (1.0 - b2) * g.array().square();
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    p.array() -= lr * (m / c1) / ((v / c2).sqrt() + eps);
  }
};

}  // namespace

Eigen::VectorXd mlp_logits(const MlpParams& p, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd Z = p.standardizer.apply(X);
  Eigen::MatrixXd a1 = Z * p.w1.transpose();
  a1.rowwise() += p.b1.transpose();
  a1 = a1.cwiseMax(0.0);
  return (a1 * p.w2).array() + p.b2;
}

MlpParams train_mlp(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y) {
  MlpParams out;
  out.standardizer = spec.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
  const Eigen::MatrixXd Z = out.standardizer.apply(X);
  const Eigen::Index d = Z.cols();
  const Eigen::Index hw = spec.hidden_width;

  auto [train_idx, hold_idx] = stratified_split(y, 0.1, derive_seed(spec.seed, 17));
  auto gather = [&](const std::vector<int>& idx, Eigen::MatrixXd& Xo, Eigen::VectorXd& yo) {
    Xo.resize(static_cast<Eigen::Index>(idx.size()), d);
    yo.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      Xo.row(static_cast<Eigen::Index>(r)) = Z.row(idx[r]);
      yo(static_cast<Eigen::Index>(r)) = y[static_cast<std::size_t>(idx[r])];
    }
  };
  Eigen::MatrixXd Xt, Xh;
  Eigen::VectorXd yt, yh;
  gather(train_idx, Xt, yt);
  gather(hold_idx, Xh, yh);

  Rng rng(spec.seed);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hw));
  out.w1.resize(hw, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < hw; ++i) out.w1(i, j) = bound1 * (2.0 * rng.uniform() - 1.0);
  out.b1.resize(hw);
  for (Eigen::Index i = 0; i < hw; ++i) out.b1(i) = bound1 * (2.0 * rng.uniform() - 1.0);
  out.w2.resize(hw);
  for (Eigen::Index i = 0; i < hw; ++i) out.w2(i) = bound2 * (2.0 * rng.uniform() - 1.0);
  out.b2 = bound2 * (2.0 * rng.uniform() - 1.0);

  auto logits_of = [&](const Eigen::MatrixXd& A) {
    Eigen::MatrixXd a1 = A * out.w1.transpose();
    a1.rowwise() += out.b1.transpose();
    a1 = a1.cwiseMax(0.0);
    return Eigen::VectorXd((a1 * out.w2).array() + out.b2);
  };

  Adam opt_w1, opt_b1, opt_w2, opt_b2;
  opt_w1.init(hw, d);
  opt_b1.init(hw, 1);
  opt_w2.init(hw, 1);
  opt_b2.init(1, 1);

  MlpParams best = out;
  double best_loss = Xh.rows() > 0 ? bce(logits_of(Xh), yh) : bce(logits_of(Xt), yt);
  int since_best = 0;
  const double nt = static_cast<double>(Xt.rows());
  for (int epoch = 1; epoch <= spec.max_epochs; ++epoch) {
    Eigen::MatrixXd z1 = Xt * out.w1.transpose();
    z1.rowwise() += out.b1.transpose();
    const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    const Eigen::VectorXd z2 = (a1 * out.w2).array() + out.b2;
    Eigen::VectorXd dz2(z2.size());
    for (Eigen::Index i = 0; i < z2.size(); ++i) dz2(i) = (sigmoid(z2(i)) - yt(i)) / nt;
    const Eigen::VectorXd gw2 = a1.transpose() * dz2;
    Eigen::Matrix<double, 1, 1> gb2;
    gb2(0, 0) = dz2.sum();
    Eigen::MatrixXd dz1 = dz2 * out.w2.transpose();
    dz1 = (z1.array() > 0.0).select(dz1, 0.0);
    const Eigen::MatrixXd gw1 = dz1.transpose() * Xt;
    const Eigen::VectorXd gb1 = dz1.colwise().sum().transpose();

    opt_w1.step(out.w1, gw1, spec.mlp_learning_rate, epoch);
    opt_b1.step(out.b1, gb1, spec.mlp_learning_rate, epoch);
    opt_w2.step(out.w2, gw2, spec.mlp_learning_rate, epoch);
    Eigen::Matrix<double, 1, 1> b2m;
    b2m(0, 0) = out.b2;
    opt_b2.step(b2m, gb2, spec.mlp_learning_rate, epoch);
    out.b2 = b2m(0, 0);
    out.epochs_run = epoch;

    const double loss = Xh.rows() > 0 ? bce(logits_of(Xh), yh) : bce(logits_of(Xt), yt);
    if (loss < best_loss) {
      best_loss = loss;
      best = out;
      best.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= spec.patience) {
      break;
    }
  }
  best.epochs_run = out.epochs_run;
  return best;
}

}  // namespace actgeo::probes::detail
