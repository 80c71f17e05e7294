#include "actgeo/steering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"

namespace actgeo::steering {

namespace {

MeanStd mean_std(std::span<const double> v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

void check_dim(Eigen::Index got, const SteeringDirection& d) {
  if (got != d.unit_vector.size()) {
    throw DataError("dimension mismatch: direction has " + std::to_string(d.unit_vector.size()) +
                    " entries, activation has " + std::to_string(got));
  }
}

double mean_belief(const Eigen::MatrixXd& H, const probes::TrainedProbe& probe,
                   const SteeringDirection& d, double alpha) {
  return probes::predict_proba(probe, apply_steer_rows(H, alpha, d)).mean();
}

}  // namespace

std::string_view to_string(Sign sign) { return sign == Sign::to_solved ? "to_solved" : "to_unsolved"; }

Sign parse_sign(std::string_view text) {
  if (text == "to_solved") return Sign::to_solved;
  if (text == "to_unsolved") return Sign::to_unsolved;
  throw std::invalid_argument("unknown steering sign '" + std::string(text) + "'");
}

SteeringDirection derive_direction(const probes::TrainedProbe& probe, int layer, std::string probe_id) {
  const auto* lp = std::get_if<probes::LogisticParams>(&probe.params);
  if (lp == nullptr) {
    throw std::invalid_argument("steering direction needs a logistic probe, got " +
                                std::string(probes::to_string(probe.spec.family)));
  }
  const double norm = lp->w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("probe weight vector is zero");
  SteeringDirection d;
  d.unit_vector = lp->w / norm;
  d.source_layer = layer;
  d.source_probe_id = std::move(probe_id);
  d.derivation_norm = norm;
  return d;
}

Eigen::VectorXd apply_steer(const Eigen::VectorXd& h, double alpha, const SteeringDirection& d) {
  check_dim(h.size(), d);
  return h + alpha * d.unit_vector;
}

Eigen::MatrixXd apply_steer_rows(const Eigen::MatrixXd& H, double alpha, const SteeringDirection& d) {
  check_dim(H.cols(), d);
  return H.rowwise() + alpha * d.unit_vector.transpose();
}

InterventionReport belief_flip_experiment(const Eigen::MatrixXd& H, std::span<const std::string> ids,
                                          const probes::TrainedProbe& probe,
                                          const SteeringDirection& d, double alpha, Sign sign) {
  if (H.rows() == 0) throw DataError("intervention subset is empty");
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != H.rows()) {
    throw std::invalid_argument("record id count does not match activation rows");
  }
  if ((sign == Sign::to_solved && alpha < 0.0) || (sign == Sign::to_unsolved && alpha > 0.0)) {
    throw std::invalid_argument("alpha sign contradicts steering sign " + std::string(to_string(sign)));
  }
  check_dim(H.cols(), d);
  InterventionReport r;
  r.direction_sign = sign;
  r.alpha = alpha;
  r.record_ids.assign(ids.begin(), ids.end());
  const Eigen::VectorXd base = probes::predict_proba(probe, H);
  const Eigen::VectorXd steered = alpha == 0.0 ? base : probes::predict_proba(probe, apply_steer_rows(H, alpha, d));
  r.baseline_per_record.assign(base.data(), base.data() + base.size());
  r.steered_per_record.assign(steered.data(), steered.data() + steered.size());
  r.baseline_belief = mean_std(r.baseline_per_record);
  r.steered_belief = mean_std(r.steered_per_record);
  r.belief_flip_delta = r.steered_belief.mean - r.baseline_belief.mean;
  return r;
}

InterventionReport inverse_flip_experiment(const Eigen::MatrixXd& H, std::span<const std::string> ids,
                                           const probes::TrainedProbe& probe,
                                           const SteeringDirection& d, double alpha) {
  return belief_flip_experiment(H, ids, probe, d, alpha, Sign::to_unsolved);
}

AlphaSearch auto_alpha(const Eigen::MatrixXd& H, const probes::TrainedProbe& probe,
                       const SteeringDirection& d, Sign sign, double target) {
  if (H.rows() == 0) throw DataError("intervention subset is empty");
  if (!(target > 0.5 && target < 1.0)) throw std::invalid_argument("belief target must be in (0.5, 1)");
  check_dim(H.cols(), d);
  const double s = sign == Sign::to_solved ? 1.0 : -1.0;
  auto reached = [&](double belief) { return sign == Sign::to_solved ? belief >= target : belief <= 1.0 - target; };

  AlphaSearch out;
  const Eigen::VectorXd proj = H * d.unit_vector;
  const double m = proj.mean();
  out.sigma_proj = proj.size() > 1 ? std::sqrt((proj.array() - m).square().sum() / static_cast<double>(proj.size() - 1)) : 0.0;
  out.upper_bound = 20.0 * (out.sigma_proj > 0.0 ? out.sigma_proj : 1.0);

  auto eval = [&](double a) {
    const double b = mean_belief(H, probe, d, s * a);
    out.trace.emplace_back(a, b);
    return b;
  };
  if (reached(eval(0.0))) {
    out.reached = true;
    return out;
  }
  if (!reached(eval(out.upper_bound))) {
    out.alpha = out.upper_bound;
    return out;
  }
  double lo = 0.0, hi = out.upper_bound;
  for (int it = 0; it < 60 && hi - lo > 1e-9 * out.upper_bound; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reached(eval(mid)) ? hi : lo) = mid;
  }
  out.alpha = hi;
  out.reached = true;
  return out;
}

OutcomeTest outcome_significance_test(std::span<const int> baseline, std::span<const int> steered,
                                      int n_permutations, std::uint64_t seed, PermutationMode mode) {
  if (baseline.size() != steered.size()) {
    throw DataError("outcome lists differ in length: " + std::to_string(baseline.size()) + " vs " +
                    std::to_string(steered.size()));
  }
  if (baseline.empty()) throw DataError("outcome lists are empty");
  if (n_permutations < 1) throw std::invalid_argument("n_permutations must be >= 1");
  std::vector<double> b, s;
  long observed = 0;  // sum of steered - baseline
  std::size_t m = 0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if ((baseline[i] != 0 && baseline[i] != 1) || (steered[i] != 0 && steered[i] != 1)) {
      throw DataError("outcomes must be 0 or 1");
    }
    b.push_back(baseline[i]);
    s.push_back(steered[i]);
    const int diff = steered[i] - baseline[i];
    observed += diff;
    m += diff != 0 ? 1 : 0;
  }
  OutcomeTest t;
  t.n = baseline.size();
  t.discordant = m;
  t.n_permutations = n_permutations;
  const double sqrt_n = std::sqrt(static_cast<double>(t.n));
  t.baseline_accuracy = mean_std(b);
  t.steered_accuracy = mean_std(s);
  t.baseline_accuracy.std /= sqrt_n;
  t.steered_accuracy.std /= sqrt_n;
  t.performance_delta = t.steered_accuracy.mean - t.baseline_accuracy.mean;

  const long target = std::labs(observed);
  const bool small = m < 63 && (std::uint64_t{1} << m) <= static_cast<std::uint64_t>(n_permutations);
  t.exact = mode == PermutationMode::exact || (mode == PermutationMode::automatic && small);
  if (target == 0) {
    t.p_value = 1.0;
    return t;
  }
  if (t.exact) {
    // Flipping the signs of m unit differences: the statistic is 2K - m with
    // K ~ Binomial(m, 1/2), so the full enumeration reduces to binomial counts.
    const double md = static_cast<double>(m);
    double p = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      const long stat = 2 * static_cast<long>(k) - static_cast<long>(m);
      if (std::labs(stat) < target) continue;
      const double kd = static_cast<double>(k);
      p += std::exp(std::lgamma(md + 1) - std::lgamma(kd + 1) - std::lgamma(md - kd + 1) - md * std::log(2.0));
    }
    t.p_value = std::clamp(p, 0.0, 1.0);
    return t;
  }
  Rng rng(seed);
  std::size_t hits = 0;
  for (int r = 0; r < n_permutations; ++r) {
    long pos = 0;
    std::size_t left = m;
    while (left > 0) {
      const std::size_t take = std::min<std::size_t>(left, 64);
      std::uint64_t bits = rng.next_u64();
      if (take < 64) bits &= (std::uint64_t{1} << take) - 1;
      pos += std::popcount(bits);
      left -= take;
    }
    const long stat = 2 * pos - static_cast<long>(m);
    hits += std::labs(stat) >= target ? 1 : 0;
  }
  t.p_value = (1.0 + static_cast<double>(hits)) / (1.0 + n_permutations);
  return t;
}

std::vector<Outcome> parse_outcomes(std::string_view csv) {
  std::vector<Outcome> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("outcome CSV line " + std::to_string(line_no) + ": expected 'record_id,correct'");
    }
    std::string id = line.substr(0, comma);
    std::string value = line.substr(comma + 1);
    if (!header_seen) {
      header_seen = true;
      if (id == "record_id") {
        if (value != "correct") throw DataError("outcome CSV header must be 'record_id,correct'");
        continue;
      }
      throw DataError("outcome CSV is missing the 'record_id,correct' header");
    }
    if (value != "0" && value != "1") {
      throw DataError("outcome CSV line " + std::to_string(line_no) + ": correct must be 0 or 1, got '" +
                      value + "'");
    }
    if (id.empty()) throw DataError("outcome CSV line " + std::to_string(line_no) + ": empty record_id");
    out.push_back({std::move(id), value == "1" ? 1 : 0});
  }
  return out;
}

std::vector<Outcome> load_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open outcome file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_outcomes(ss.str());
}

std::pair<std::vector<int>, std::vector<int>> pair_outcomes(std::span<const Outcome> baseline,
                                                            std::span<const Outcome> steered) {
  std::map<std::string, int> by_id;
  for (const auto& o : steered) {
    if (!by_id.emplace(o.record_id, o.correct).second) {
      throw DataError("duplicate record_id '" + o.record_id + "' in steered outcomes");
    }
  }
  if (baseline.size() != steered.size()) {
    throw DataError("outcome files list different numbers of records (" + std::to_string(baseline.size()) +
                    " vs " + std::to_string(steered.size()) + ")");
  }
  std::pair<std::vector<int>, std::vector<int>> out;
  for (const auto& o : baseline) {
    auto it = by_id.find(o.record_id);
    if (it == by_id.end()) throw DataError("record '" + o.record_id + "' missing from steered outcomes");
    out.first.push_back(o.correct);
    out.second.push_back(it->second);
  }
  return out;
}

std::string direction_to_json(const SteeringDirection& d) {
  nlohmann::json j = {{"source_layer", d.source_layer},
                      {"source_probe_id", d.source_probe_id},
                      {"derivation_norm", d.derivation_norm},
                      {"unit_vector", std::vector<double>(d.unit_vector.data(), d.unit_vector.data() + d.unit_vector.size())}};
  return j.dump(1) + "\n";
}

std::string InterventionReport::to_json() const {
  using nlohmann::json;
  auto ms = [](const MeanStd& v) { return json{{"mean", v.mean}, {"std", v.std}}; };
  json records = json::array();
  for (std::size_t i = 0; i < baseline_per_record.size(); ++i) {
    records.push_back({{"record_id", i < record_ids.size() ? record_ids[i] : std::to_string(i)},
                       {"baseline", baseline_per_record[i]},
                       {"steered", steered_per_record[i]}});
  }
  json j = {{"dataset", dataset},
            {"direction_sign", std::string(to_string(direction_sign))},
            {"alpha", alpha},
            {"baseline_belief", ms(baseline_belief)},
            {"steered_belief", ms(steered_belief)},
            {"belief_flip_delta", belief_flip_delta},
            {"records", std::move(records)}};
  if (alpha_search) {
    json tr = json::array();
    for (const auto& [a, b] : alpha_search->trace) tr.push_back({a, b});
    j["alpha_search"] = {{"alpha", alpha_search->alpha},
                         {"sigma_proj", alpha_search->sigma_proj},
                         {"upper_bound", alpha_search->upper_bound},
                         {"reached", alpha_search->reached},
                         {"trace", std::move(tr)}};
  }
  if (outcome) {
    j["baseline_accuracy"] = ms(outcome->baseline_accuracy);
    j["steered_accuracy"] = ms(outcome->steered_accuracy);
    j["performance_delta"] = outcome->performance_delta;
    j["p_value"] = outcome->p_value;
    j["outcome_test"] = {{"n", outcome->n},
                         {"discordant", outcome->discordant},
                         {"exact", outcome->exact},
                         {"n_permutations", outcome->n_permutations}};
  } else {
    j["baseline_accuracy"] = nullptr;
    j["steered_accuracy"] = nullptr;
    j["performance_delta"] = nullptr;
    j["p_value"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string InterventionReport::to_text() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%s  alpha %+.4g  (%s)\n", dataset.empty() ? "subset" : dataset.c_str(),
                alpha, std::string(to_string(direction_sign)).c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "belief   %.2f -> %.2f   delta %+.2f\n", baseline_belief.mean,
                steered_belief.mean, belief_flip_delta);
  out += buf;
  if (outcome) {
    std::snprintf(buf, sizeof buf, "accuracy %.1f%% ± %.1f -> %.1f%% ± %.1f   p = %.3f\n",
                  100 * outcome->baseline_accuracy.mean, 100 * outcome->baseline_accuracy.std,
                  100 * outcome->steered_accuracy.mean, 100 * outcome->steered_accuracy.std,
                  outcome->p_value);
    out += buf;
  }
  return out;
}

}  // namespace actgeo::steering
