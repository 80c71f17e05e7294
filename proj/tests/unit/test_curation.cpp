#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "actgeo/curation.hpp"
#include "actgeo/random.hpp"
#include "oracle_data.hpp"

using namespace actgeo;
using namespace actgeo::curation;

namespace {

RecordMeta rec(std::string id, Label label, std::string domain, int tokens, std::string prompt = "Solve it.") {
  return {std::move(id), label, std::move(domain), tokens, std::move(prompt)};
}

std::vector<RecordMeta> offset_corpus(int per_class, double offset, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RecordMeta> out;
  for (int i = 0; i < per_class; ++i) {
    const int s = std::max(1, static_cast<int>(std::lround(80 + 20 * rng.normal())));
    const int u = std::max(1, static_cast<int>(std::lround(80 + offset + 25 * rng.normal())));
    out.push_back(rec("s" + std::to_string(i), Label::solved, "math", s));
    out.push_back(rec("u" + std::to_string(i), Label::unsolved, "math", u));
  }
  return out;
}

std::set<std::string> ids(const std::vector<RecordMeta>& v) {
  std::set<std::string> out;
  for (const auto& r : v) out.insert(r.record_id);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> lengths(const std::vector<RecordMeta>& v) {
  std::vector<double> s, u;
  for (const auto& r : v) (r.label == Label::solved ? s : u).push_back(r.token_count);
  return {s, u};
}

}  // namespace

TEST_CASE("format keywords remove templated prompts") {
  const std::vector<RecordMeta> in = {
      rec("p1", Label::solved, "math", 10, "Is 117 a prime number? True or False."),
      rec("p2", Label::unsolved, "math", 10, "Compute 17 * 23."),
  };
  const std::vector<std::string> keys = {"true or false"};
  const auto r = filter_format_heuristics(in, keys);
  REQUIRE(r.removed.size() == 1);
  CHECK(r.removed[0].record.record_id == "p1");
  CHECK(r.removed[0].keyword == "true or false");
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].record_id == "p2");

  const auto empty = filter_format_heuristics({}, keys);
  CHECK(empty.kept.empty());
  CHECK(empty.removed.empty());

  auto no_text = in;
  no_text[1].prompt_text.reset();
  CHECK_THROWS_AS(filter_format_heuristics(no_text, keys), DataError);
}

TEST_CASE("balance keeps min(solved, unsolved) per stratum") {
  std::vector<RecordMeta> in;
  for (int i = 0; i < 5; ++i) in.push_back(rec("s" + std::to_string(i), Label::solved, "algebra", 10));
  for (int i = 0; i < 3; ++i) in.push_back(rec("u" + std::to_string(i), Label::unsolved, "algebra", 10));
  const auto r = stratified_balance(in, StrataKey::domain_tag, 1);
  std::size_t s = 0, u = 0;
  for (const auto& x : r.kept) (x.label == Label::solved ? s : u)++;
  CHECK(s == 3);
  CHECK(u == 3);
  CHECK(r.warnings.empty());
}

TEST_CASE("balance across two strata follows the min rule") {
  std::vector<RecordMeta> in;
  for (int i = 0; i < 10; ++i) in.push_back(rec("as" + std::to_string(i), Label::solved, "algebra", 10));
  for (int i = 0; i < 2; ++i) in.push_back(rec("au" + std::to_string(i), Label::unsolved, "algebra", 10));
  for (int i = 0; i < 4; ++i) in.push_back(rec("ls" + std::to_string(i), Label::solved, "logic", 10));
  for (int i = 0; i < 4; ++i) in.push_back(rec("lu" + std::to_string(i), Label::unsolved, "logic", 10));
  in.push_back(rec("x", Label::solved, "geometry", 10));
  const auto r = stratified_balance(in, StrataKey::domain_tag, 1);
  std::map<std::pair<std::string, Label>, int> c;
  for (const auto& x : r.kept) c[{x.domain_tag, x.label}]++;
  CHECK(c[{"algebra", Label::solved}] == 2);
  CHECK(c[{"algebra", Label::unsolved}] == 2);
  CHECK(c[{"logic", Label::solved}] == 4);
  CHECK(c[{"logic", Label::unsolved}] == 4);
  CHECK(c.count({"geometry", Label::solved}) == 0);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("geometry") != std::string::npos);
}

TEST_CASE("balanced input comes back unchanged; balancing is idempotent") {
  const auto in = offset_corpus(30, 0.0, 2);
  CHECK(ids(stratified_balance(in, StrataKey::domain_tag, 3).kept) == ids(in));

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RecordMeta> mixed;
    for (int i = 0; i < 60; ++i) {
      const char* domains[] = {"a", "b", "c"};
      mixed.push_back(rec(std::to_string(i), rng.uniform() < 0.3 ? Label::solved : Label::unsolved,
                          domains[rng.index(3)], 1 + static_cast<int>(rng.index(200))));
    }
    for (auto key : {StrataKey::domain_tag, StrataKey::domain_and_length_bucket}) {
      const auto once = stratified_balance(mixed, key, trial).kept;
      const auto twice = stratified_balance(once, key, trial).kept;
      CHECK(ids(once) == ids(twice));
      const auto [s, u] = lengths(once);
      CHECK(s.size() == u.size());
    }
  }
}

TEST_CASE("length matching boundary cases") {
  const std::vector<RecordMeta> close = {rec("s", Label::solved, "m", 80), rec("u", Label::unsolved, "m", 81)};
  const auto m = greedy_length_match(close, 1, 0);
  REQUIRE(m.size() == 2);
  CHECK(m[0].record_id == "s");
  CHECK(m[1].record_id == "u");
  const std::vector<RecordMeta> far = {rec("s", Label::solved, "m", 80), rec("u", Label::unsolved, "m", 90)};
  CHECK(greedy_length_match(far, 1, 0).empty());
  CHECK_THROWS_AS(greedy_length_match(far, -1, 0), std::invalid_argument);
}

TEST_CASE("length matching prefers the closest partner") {
  const std::vector<RecordMeta> in = {rec("s", Label::solved, "m", 100), rec("u1", Label::unsolved, "m", 98),
                                      rec("u2", Label::unsolved, "m", 100)};
  const auto m = greedy_length_match(in, 2, 0);
  REQUIRE(m.size() == 2);
  CHECK(m[1].record_id == "u2");
}

TEST_CASE("length matching properties: pairs within tolerance, idempotent, seeded") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int tol = static_cast<int>(rng.index(4));
    const auto in = offset_corpus(40, 15.0, 100 + trial);
    const auto m = greedy_length_match(in, tol, trial);
    REQUIRE(m.size() % 2 == 0);
    for (std::size_t i = 0; i < m.size(); i += 2) {
      CHECK(m[i].label == Label::solved);
      CHECK(m[i + 1].label == Label::unsolved);
      CHECK(std::abs(m[i].token_count - m[i + 1].token_count) <= tol);
    }
    CHECK(ids(m).size() == m.size());
    CHECK(ids(greedy_length_match(m, tol, trial)) == ids(m));
    CHECK(ids(greedy_length_match(in, tol, trial)) == ids(m));
  }
}

TEST_CASE("offset-length corpus passes the length test after matching") {
  const auto in = offset_corpus(500, 12.0, 7);
  const auto [s0, u0] = lengths(in);
  CHECK(welch_t_test(s0, u0).p_value < 1e-6);
  const auto m = greedy_length_match(in, 2, 1);
  const auto [s, u] = lengths(m);
  CHECK(s.size() >= 100);
  CHECK(welch_t_test(s, u).p_value > 0.4);
}

TEST_CASE("Welch t-test matches scipy") {
  struct Case {
    const std::vector<double>& a;
    const std::vector<double>& b;
    double t, df, p;
  };
  const Case cases[] = {
      {oracle::kWelchA0, oracle::kWelchB0, oracle::kWelchT0, oracle::kWelchDf0, oracle::kWelchP0},
      {oracle::kWelchA1, oracle::kWelchB1, oracle::kWelchT1, oracle::kWelchDf1, oracle::kWelchP1},
      {oracle::kWelchA2, oracle::kWelchB2, oracle::kWelchT2, oracle::kWelchDf2, oracle::kWelchP2},
  };
  for (const auto& c : cases) {
    const auto r = welch_t_test(c.a, c.b);
    CHECK(std::abs(r.t_statistic - c.t) <= 1e-9);
    CHECK(std::abs(r.degrees_of_freedom - c.df) <= 1e-9);
    CHECK(std::abs(r.p_value - c.p) <= 1e-9);
    const auto flipped = welch_t_test(c.b, c.a);
    CHECK(flipped.t_statistic == doctest::Approx(-r.t_statistic));
    CHECK(flipped.p_value == doctest::Approx(r.p_value));
  }
}

TEST_CASE("Welch t-test edge cases") {
  const std::vector<double> a = {1, 2, 3, 4};
  const auto same = welch_t_test(a, a);
  CHECK(same.t_statistic == 0.0);
  CHECK(same.p_value == 1.0);
  const std::vector<double> c1 = {5, 5, 5}, c2 = {5, 5}, c3 = {6, 6};
  CHECK(welch_t_test(c1, c2).degenerate);
  CHECK(welch_t_test(c1, c2).p_value == 1.0);
  CHECK(welch_t_test(c1, c3).p_value == 0.0);
  const std::vector<double> one = {1};
  CHECK_THROWS_AS(welch_t_test(one, a), std::invalid_argument);
}

TEST_CASE("run_curation applies filter, balance and match in order") {
  auto in = offset_corpus(200, 10.0, 8);
  in.push_back(rec("tf", Label::solved, "math", 80, "Is 7 prime? Yes or no."));
  CurationConfig cfg;
  cfg.seed = 5;
  const auto rep = run_curation(in, cfg);
  CHECK(rep.counts.input == 401);
  CHECK(rep.counts.after_filter == 400);
  CHECK(rep.counts.after_balance == 400);
  CHECK(rep.counts.after_match == rep.kept.size());
  CHECK(rep.counts.solved == rep.counts.unsolved);
  CHECK(rep.length_test_passed == (rep.length_test.p_value > 0.4));
  CHECK(rep.length_test_passed);
  const auto json = rep.to_json();
  CHECK(json.find("\"removed_by_filter\": 1") != std::string::npos);
  const auto text = rep.to_text();
  CHECK(text.find(" vs. ") != std::string::npos);

  const auto again = run_curation(in, cfg);
  CHECK(again.to_json() == json);

  cfg.banned_keywords.clear();
  CHECK_THROWS_AS(run_curation(in, cfg), std::invalid_argument);
}
