#include <doctest.h>

#include <fstream>

#include "actgeo/random.hpp"
#include "actgeo/steering.hpp"
#include "actgeo/synthetic.hpp"
#include "oracle_data.hpp"
#include "test_support.hpp"

using namespace actgeo;
using namespace actgeo::steering;
using probes::Family;
using testing::TempDir;

namespace {

probes::TrainedProbe fixed_probe(Eigen::VectorXd w, double b = 0.0) {
  probes::TrainedProbe p;
  p.spec = probes::ProbeSpec::defaults(Family::logistic);
  p.input_dim = w.size();
  probes::LogisticParams lp;
  lp.w = std::move(w);
  lp.b = b;
  p.params = lp;
  return p;
}

struct Fixture {
  Eigen::MatrixXd solved, unsolved;
  probes::TrainedProbe probe;
  SteeringDirection dir;
  Eigen::VectorXd class_direction;
};

// Gaussian classes separated along a known axis; probe trained on both.
Fixture gaussian_fixture(double separation = 4.0, int per_class = 150) {
  SyntheticSnapshotSpec spec;
  spec.hidden_dim = 10;
  spec.n_per_class = per_class;
  spec.class_mean_separation = separation;
  spec.seed = 31;
  const auto syn = generate_synthetic_snapshot(spec);
  Fixture f;
  const int n = 2 * per_class;
  Eigen::MatrixXd X(n, 10);
  std::vector<int> y;
  std::vector<Eigen::Index> s, u;
  for (int i = 0; i < n; ++i) {
    const auto& a = std::get<ActivationRecord>(syn.records[i]);
    for (int j = 0; j < 10; ++j) X(i, j) = a.vector[j];
    const bool solved = syn.manifest.find(a.record_id)->label == Label::solved;
    y.push_back(solved);
    (solved ? s : u).push_back(i);
  }
  f.solved = X(s, Eigen::all);
  f.unsolved = X(u, Eigen::all);
  f.probe = probes::train_probe(probes::ProbeSpec::defaults(Family::logistic), X, y);
  f.dir = derive_direction(f.probe, 0, "fixture");
  f.class_direction = syn.class_direction;
  return f;
}

std::vector<std::string> ids_for(Eigen::Index n) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  return ids;
}

}  // namespace

TEST_CASE("direction normalizes w") {
  const auto d = derive_direction(fixed_probe(Eigen::Vector2d(3, 4)), 7, "p");
  CHECK(d.unit_vector(0) == doctest::Approx(0.6));
  CHECK(d.unit_vector(1) == doctest::Approx(0.8));
  CHECK(d.derivation_norm == doctest::Approx(5.0));
  CHECK(d.source_layer == 7);
  CHECK_THROWS_AS(derive_direction(fixed_probe(Eigen::Vector2d(0, 0)), 0), NumericError);
  auto mlp = fixed_probe(Eigen::Vector2d(1, 0));
  mlp.spec.family = Family::mlp2;
  mlp.params = probes::MlpParams{};
  CHECK_THROWS_AS(derive_direction(mlp, 0), std::invalid_argument);
  CHECK(direction_to_json(d).find("\"unit_vector\"") != std::string::npos);
}

TEST_CASE("trained direction recovers the class axis") {
  const auto f = gaussian_fixture(4.0, 1000);
  CHECK(std::abs(f.dir.unit_vector.dot(f.class_direction)) >= 0.99);
}

TEST_CASE("apply_steer arithmetic") {
  SteeringDirection d;
  d.unit_vector = Eigen::Vector2d(1, 0);
  const Eigen::Vector2d h(1, 1);
  CHECK(apply_steer(h, 2.0, d) == Eigen::Vector2d(3, 1));
  CHECK(apply_steer(h, 0.0, d) == h);
  CHECK_THROWS_AS(apply_steer(Eigen::Vector3d(1, 1, 1), 1.0, d), DataError);
  Eigen::MatrixXd H(2, 2);
  H << 1, 1, 0, 5;
  Eigen::MatrixXd want(2, 2);
  want << 0.5, 1, -0.5, 5;
  CHECK(apply_steer_rows(H, -0.5, d) == want);
}

TEST_CASE("apply_steer properties: additive, orthogonal complement untouched") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + static_cast<int>(rng.index(30));
    Eigen::VectorXd w(dim), h(dim);
    for (int j = 0; j < dim; ++j) {
      w(j) = rng.normal();
      h(j) = rng.normal() * 10;
    }
    const auto d = derive_direction(fixed_probe(w), 0);
    const double a1 = rng.normal() * 5, a2 = rng.normal() * 5;
    const Eigen::VectorXd two_steps = apply_steer(apply_steer(h, a1, d), a2, d);
    CHECK((two_steps - apply_steer(h, a1 + a2, d)).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd delta = apply_steer(h, a1, d) - h;
    const Eigen::VectorXd residual = delta - delta.dot(d.unit_vector) * d.unit_vector;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(delta.dot(d.unit_vector) == doctest::Approx(a1));
  }
}

TEST_CASE("belief is monotone in alpha and crosses 0.5") {
  const auto f = gaussian_fixture();
  const Eigen::VectorXd h = f.unsolved.row(0).transpose();
  double prev = -1.0;
  bool below = false, above = false;
  for (int step = 0; step <= 60; ++step) {
    const double alpha = 0.25 * step;
    Eigen::MatrixXd row = apply_steer(h, alpha, f.dir).transpose();
    const double p = probes::predict_proba(f.probe, row)(0);
    CHECK(p >= prev);
    prev = p;
    below |= p < 0.5;
    above |= p > 0.5;
  }
  CHECK(below);
  CHECK(above);
}

TEST_CASE("belief flip experiments") {
  const auto f = gaussian_fixture(4.0);
  const auto ids = ids_for(f.unsolved.rows());

  const auto zero = belief_flip_experiment(f.unsolved, ids, f.probe, f.dir, 0.0);
  CHECK(zero.belief_flip_delta == 0.0);
  CHECK(zero.steered_per_record == zero.baseline_per_record);

  const auto fwd = belief_flip_experiment(f.unsolved, ids, f.probe, f.dir, 3.0 * 4.0);
  CHECK(fwd.baseline_belief.mean < 0.5);
  CHECK(fwd.steered_belief.mean >= 0.9);
  CHECK(fwd.belief_flip_delta == doctest::Approx(fwd.steered_belief.mean - fwd.baseline_belief.mean));
  CHECK(fwd.record_ids.size() == ids.size());

  const auto sids = ids_for(f.solved.rows());
  const auto inv = inverse_flip_experiment(f.solved, sids, f.probe, f.dir, -3.0 * 4.0);
  CHECK(inv.direction_sign == Sign::to_unsolved);
  CHECK(inv.steered_belief.mean <= 0.1);
  CHECK(inverse_flip_experiment(f.solved, sids, f.probe, f.dir, 0.0).belief_flip_delta == 0.0);

  CHECK_THROWS_AS(belief_flip_experiment(f.unsolved, ids, f.probe, f.dir, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_flip_experiment(f.solved, sids, f.probe, f.dir, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(belief_flip_experiment(Eigen::MatrixXd(0, 10), {}, f.probe, f.dir, 1.0), DataError);
}

TEST_CASE("report text shows baseline, steered and delta") {
  InterventionReport r;
  r.dataset = "gsm8k";
  r.alpha = 2.5;
  r.baseline_belief = {0.04, 0.01};
  r.steered_belief = {0.97, 0.02};
  r.belief_flip_delta = 0.93;
  const auto text = r.to_text();
  CHECK(text.find("0.04 -> 0.97") != std::string::npos);
  CHECK(text.find("+0.93") != std::string::npos);
  r.baseline_belief = {0.94, 0.01};
  r.steered_belief = {0.05, 0.02};
  r.belief_flip_delta = -0.89;
  CHECK(r.to_text().find("-0.89") != std::string::npos);
  CHECK(r.to_json().find("\"belief_flip_delta\"") != std::string::npos);
}

TEST_CASE("auto alpha reaches the target with the smallest magnitude") {
  const auto f = gaussian_fixture();
  const auto up = auto_alpha(f.unsolved, f.probe, f.dir, Sign::to_solved, 0.95);
  REQUIRE(up.reached);
  CHECK(up.alpha > 0.0);
  CHECK(up.alpha <= up.upper_bound);
  const auto ids = ids_for(f.unsolved.rows());
  CHECK(belief_flip_experiment(f.unsolved, ids, f.probe, f.dir, up.alpha).steered_belief.mean >= 0.95);
  CHECK(belief_flip_experiment(f.unsolved, ids, f.probe, f.dir, 0.99 * up.alpha).steered_belief.mean < 0.95);

  const auto down = auto_alpha(f.solved, f.probe, f.dir, Sign::to_unsolved, 0.95);
  REQUIRE(down.reached);
  const auto sids = ids_for(f.solved.rows());
  CHECK(inverse_flip_experiment(f.solved, sids, f.probe, f.dir, -down.alpha).steered_belief.mean <= 0.05);
  // Mirror-image classes need comparable effort in both directions.
  CHECK(down.alpha == doctest::Approx(up.alpha).epsilon(0.25));
  CHECK_THROWS_AS(auto_alpha(f.solved, f.probe, f.dir, Sign::to_solved, 1.5), std::invalid_argument);
}

TEST_CASE("permutation test: exact p matches brute-force enumeration") {
  const std::vector<int>* base[] = {&oracle::kPermBase0, &oracle::kPermBase1, &oracle::kPermBase2};
  const std::vector<int>* steer[] = {&oracle::kPermSteered0, &oracle::kPermSteered1, &oracle::kPermSteered2};
  const double want[] = {oracle::kPermP0, oracle::kPermP1, oracle::kPermP2};
  for (int i = 0; i < 3; ++i) {
    const auto t = outcome_significance_test(*base[i], *steer[i], 10000, 1);
    CHECK(t.exact);
    CHECK(t.p_value == doctest::Approx(want[i]).epsilon(1e-12));
    const auto forced = outcome_significance_test(*base[i], *steer[i], 10, 1, PermutationMode::exact);
    CHECK(forced.p_value == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("permutation test: Monte Carlo agrees with exact enumeration") {
  const auto exact = outcome_significance_test(oracle::kPermBase1, oracle::kPermSteered1, 20000, 3,
                                               PermutationMode::exact);
  const auto mc = outcome_significance_test(oracle::kPermBase1, oracle::kPermSteered1, 20000, 3,
                                            PermutationMode::monte_carlo);
  CHECK_FALSE(mc.exact);
  CHECK(mc.p_value == doctest::Approx(exact.p_value).epsilon(0.05));
}

TEST_CASE("permutation test edge cases") {
  const std::vector<int> a = {1, 0, 1, 1, 0};
  const auto same = outcome_significance_test(a, a);
  CHECK(same.p_value == 1.0);
  CHECK(same.performance_delta == 0.0);
  CHECK(same.discordant == 0);

  const std::vector<int> zeros(50, 0), ones(50, 1);
  const auto strong = outcome_significance_test(zeros, ones, 10000, 7);
  CHECK(strong.p_value < 0.001);
  CHECK(strong.performance_delta == 1.0);
  CHECK(strong.steered_accuracy.mean == 1.0);

  const std::vector<int> short_list = {1, 0};
  CHECK_THROWS_AS(outcome_significance_test(a, short_list), DataError);
  const std::vector<int> bad = {1, 0, 2, 1, 0};
  CHECK_THROWS_AS(outcome_significance_test(a, bad), DataError);
}

TEST_CASE("permutation test p-values are bounded and deterministic") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.index(100));
    std::vector<int> b(n), s(n);
    for (int i = 0; i < n; ++i) {
      b[i] = rng.uniform() < 0.5;
      s[i] = rng.uniform() < 0.6;
    }
    const auto t1 = outcome_significance_test(b, s, 2000, trial);
    const auto t2 = outcome_significance_test(b, s, 2000, trial);
    CHECK(t1.p_value == t2.p_value);
    CHECK(t1.p_value > 0.0);
    CHECK(t1.p_value <= 1.0);
    // Swapping the arms only flips the sign of the statistic.
    CHECK(outcome_significance_test(s, b, 2000, trial).p_value == doctest::Approx(t1.p_value).epsilon(0.15));
  }
}

TEST_CASE("outcome CSV parsing and pairing") {
  const auto base = parse_outcomes("record_id,correct\na,1\nb,0\r\nc,1\n");
  REQUIRE(base.size() == 3);
  CHECK(base[1].record_id == "b");
  CHECK(base[1].correct == 0);
  const auto steered = parse_outcomes("record_id,correct\nc,0\na,1\nb,1\n");
  const auto [x, y] = pair_outcomes(base, steered);
  CHECK(x == std::vector<int>{1, 0, 1});
  CHECK(y == std::vector<int>{1, 1, 0});

  CHECK_THROWS_AS(parse_outcomes("id,ok\na,1\n"), DataError);
  CHECK_THROWS_AS(parse_outcomes("record_id,correct\na,yes\n"), DataError);
  CHECK_THROWS_AS(parse_outcomes("record_id,correct\na\n"), DataError);
  const auto other = parse_outcomes("record_id,correct\na,1\nb,1\nz,0\n");
  CHECK_THROWS_AS(pair_outcomes(base, other), DataError);

  TempDir dir("outcomes");
  std::ofstream(dir / "o.csv") << "record_id,correct\nq,1\n";
  CHECK(load_outcomes(dir / "o.csv").size() == 1);
  CHECK_THROWS_AS(load_outcomes(dir / "missing.csv"), DataError);
}

TEST_CASE("sign names") {
  CHECK(parse_sign(to_string(Sign::to_solved)) == Sign::to_solved);
  CHECK(parse_sign(to_string(Sign::to_unsolved)) == Sign::to_unsolved);
  CHECK_THROWS_AS(parse_sign("up"), std::invalid_argument);
}
