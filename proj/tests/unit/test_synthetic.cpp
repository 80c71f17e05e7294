#include <doctest.h>

#include "actgeo/dimensionality.hpp"
#include "actgeo/probes.hpp"
#include "actgeo/synthetic.hpp"
#include "actgeo/trajectory.hpp"

using namespace actgeo;

namespace {

std::pair<Eigen::MatrixXd, std::vector<int>> as_table(const SyntheticStore& syn, int layer = 0) {
  const int d = syn.manifest.hidden_dim;
  std::vector<const ActivationRecord*> rows;
  for (const auto& r : syn.records) {
    const auto& a = std::get<ActivationRecord>(r);
    if (a.layer_index == layer) rows.push_back(&a);
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), d);
  std::vector<int> y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = rows[i]->vector[static_cast<std::size_t>(j)];
    y.push_back(syn.manifest.find(rows[i]->record_id)->label == Label::solved);
  }
  return {X, y};
}

}  // namespace

TEST_CASE("random_orthogonal is orthogonal") {
  Rng rng(1);
  const auto Q = random_orthogonal(12, rng);
  CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-12);
}

TEST_CASE("separation 0 leaves classes indistinguishable") {
  SyntheticSnapshotSpec spec;
  spec.hidden_dim = 8;
  spec.n_per_class = 500;
  spec.seed = 3;
  const auto [X, y] = as_table(generate_synthetic_snapshot(spec));
  const auto cv = probes::k_fold_cv(probes::ProbeSpec::defaults(probes::Family::logistic), X, y, 5, 1);
  CHECK(std::abs(cv.mean - 0.5) <= 0.03);
}

TEST_CASE("separation 10 is linearly separable") {
  SyntheticSnapshotSpec spec;
  spec.hidden_dim = 8;
  spec.n_per_class = 200;
  spec.class_mean_separation = 10.0;
  spec.seed = 4;
  const auto syn = generate_synthetic_snapshot(spec);
  const auto [X, y] = as_table(syn);
  const auto probe = probes::train_probe(probes::ProbeSpec::defaults(probes::Family::logistic), X, y);
  CHECK(probes::accuracy(probe, X, y) >= 0.99);
  CHECK(syn.class_direction.norm() == doctest::Approx(1.0));
  CHECK(syn.manifest.count(Label::solved) == 200);
}

TEST_CASE("isotropic spectrum in dim 4 gives PR near 4") {
  SyntheticSnapshotSpec spec;
  spec.hidden_dim = 4;
  spec.n_per_class = 1000;
  spec.covariance_spectrum = {1, 1, 1, 1};
  spec.seed = 5;
  const auto [X, y] = as_table(generate_synthetic_snapshot(spec));
  CHECK(dims::participation_ratio(dims::pca_spectrum(X)) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("signal only at the requested layers") {
  SyntheticSnapshotSpec spec;
  spec.hidden_dim = 6;
  spec.n_per_class = 100;
  spec.n_layers = 3;
  spec.signal_layers = {1};
  spec.class_mean_separation = 8.0;
  spec.seed = 6;
  const auto syn = generate_synthetic_snapshot(spec);
  const auto [X0, y0] = as_table(syn, 0);
  const auto [X1, y1] = as_table(syn, 1);
  const Eigen::VectorXd dir = syn.class_direction;
  auto gap = [&](const Eigen::MatrixXd& X, const std::vector<int>& y) {
    double s = 0, u = 0;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? s : u) += X.row(static_cast<Eigen::Index>(i)).dot(dir);
    return (s - u) / (static_cast<double>(y.size()) / 2);
  };
  CHECK(std::abs(gap(X0, y0)) < 0.5);
  CHECK(gap(X1, y1) == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("generator is deterministic under its seed") {
  SyntheticSnapshotSpec spec;
  spec.seed = 77;
  const auto a = generate_synthetic_snapshot(spec);
  const auto b = generate_synthetic_snapshot(spec);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(std::get<ActivationRecord>(a.records[i]).vector == std::get<ActivationRecord>(b.records[i]).vector);
  spec.seed = 78;
  const auto c = generate_synthetic_snapshot(spec);
  CHECK(std::get<ActivationRecord>(a.records[0]).vector != std::get<ActivationRecord>(c.records[0]).vector);
}

TEST_CASE("noise-free trace states lie in their generating subspaces") {
  SyntheticTraceSpec spec;
  spec.seed = 8;
  const auto tr = generate_synthetic_trace(spec);
  CHECK(tr.trace.cot_start == 32u);
  CHECK(tr.trace.n_states() == 64u);
  CHECK((tr.assess_basis.transpose() * tr.exec_basis).norm() < 1e-12);
  const auto A = trajectory::SubspaceBasis::from_columns(tr.assess_basis, trajectory::BasisLabel::assessment);
  const auto H = tr.trace.matrix();
  double gen_mass = 0.0;
  for (Eigen::Index t = 0; t < 32; ++t) CHECK(trajectory::subspace_fit(H.row(t).transpose(), A) >= 1.0 - 1e-6);
  for (Eigen::Index t = 32; t < 64; ++t) gen_mass += trajectory::subspace_fit(H.row(t).transpose(), A);
  // float32 storage leaves a tiny residue in the orthogonal complement.
  CHECK(gen_mass / 32 <= 16.0 / 64.0);
}

TEST_CASE("rank 40 prompt states have higher PR than rank 16 generation states") {
  SyntheticTraceSpec spec;
  spec.hidden_dim = 128;
  spec.assess_rank = 40;
  spec.exec_rank = 16;
  spec.prompt_len = 400;
  spec.gen_len = 400;
  spec.seed = 9;
  const auto H = generate_synthetic_trace(spec).trace.matrix();
  const double pr_prompt = dims::participation_ratio(dims::pca_spectrum(H.topRows(400)));
  const double pr_gen = dims::participation_ratio(dims::pca_spectrum(H.bottomRows(400)));
  CHECK(pr_prompt > pr_gen);
}

TEST_CASE("trace store alternates labels and shares geometry") {
  SyntheticTraceSpec spec;
  spec.hidden_dim = 16;
  spec.assess_rank = 4;
  spec.exec_rank = 2;
  spec.prompt_len = 6;
  spec.gen_len = 5;
  spec.seed = 10;
  const auto syn = generate_synthetic_trace_store(spec, 4);
  REQUIRE(syn.manifest.records.size() == 4);
  CHECK(syn.manifest.records[0].label == Label::solved);
  CHECK(syn.manifest.records[1].label == Label::unsolved);
  CHECK(syn.records.size() == 4);
  const auto& t = std::get<TraceRecord>(syn.records[2]);
  CHECK(t.cot_start == 6u);
  CHECK(t.n_states() == 11u);
}
