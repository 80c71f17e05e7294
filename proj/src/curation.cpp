#include "actgeo/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "actgeo/random.hpp"

namespace actgeo::curation {

std::vector<std::string> CurationConfig::default_keywords() {
  return {"true or false", "select the correct option", "yes or no", "which of the following"};
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string stratum_of(const RecordMeta& r, StrataKey key, int bucket_width) {
  if (key == StrataKey::domain_tag) return r.domain_tag;
  return r.domain_tag + "#" + std::to_string(r.token_count / bucket_width);
}

struct Item {
  int length;
  std::size_t rank;  // seeded tie-break among equal lengths
  std::size_t index;
};

// One pass of the sorted two-pointer matcher at a fixed tolerance. Matched
// entries are removed from both lists.
void match_pass(std::vector<Item>& solved, std::vector<Item>& unsolved, int tolerance,
                std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<bool> used_s(solved.size(), false), used_u(unsolved.size(), false);
  std::size_t i = 0, j = 0;
  while (i < solved.size() && j < unsolved.size()) {
    const int s = solved[i].length;
    const int u = unsolved[j].length;
    if (u < s - tolerance) {
      ++j;
    } else if (s < u - tolerance) {
      ++i;
    } else {
      pairs.emplace_back(solved[i].index, unsolved[j].index);
      used_s[i] = used_u[j] = true;
      ++i;
      ++j;
    }
  }
  auto compact = [](std::vector<Item>& v, const std::vector<bool>& used) {
    std::size_t w = 0;
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (!used[r]) v[w++] = v[r];
    }
    v.resize(w);
  };
  compact(solved, used_s);
  compact(unsolved, used_u);
}

}  // namespace

FilterResult filter_format_heuristics(std::span<const RecordMeta> records,
                                      std::span<const std::string> banned_keywords) {
  FilterResult out;
  std::vector<std::string> keys;
  for (const auto& k : banned_keywords) keys.push_back(lowercase(k));
  for (const auto& r : records) {
    if (!r.prompt_text) {
      throw DataError("record '" + r.record_id + "': prompt_text missing, cannot filter");
    }
    const std::string text = lowercase(*r.prompt_text);
    auto hit = std::find_if(keys.begin(), keys.end(), [&](const std::string& k) {
      return !k.empty() && text.find(k) != std::string::npos;
    });
    if (hit != keys.end()) {
      out.removed.push_back({r, *hit});
    } else {
      out.kept.push_back(r);
    }
  }
  return out;
}

BalanceResult stratified_balance(std::span<const RecordMeta> records, StrataKey key,
                                 std::uint64_t seed, int length_bucket_width) {
  if (length_bucket_width <= 0) throw std::invalid_argument("length bucket width must be > 0");
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> strata;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& [solved, unsolved] = strata[stratum_of(records[i], key, length_bucket_width)];
    (records[i].label == Label::solved ? solved : unsolved).push_back(i);
  }
  BalanceResult out;
  std::vector<bool> keep(records.size(), false);
  std::uint64_t stream = 0;
  for (auto& [name, groups] : strata) {
    auto& [solved, unsolved] = groups;
    ++stream;
    if (solved.empty() || unsolved.empty()) {
      out.warnings.push_back("stratum '" + name + "' has a single label (" +
                             std::to_string(solved.size() + unsolved.size()) +
                             " records); dropped");
      continue;
    }
    const std::size_t n = std::min(solved.size(), unsolved.size());
    auto& majority = solved.size() > unsolved.size() ? solved : unsolved;
    if (majority.size() > n) {
      Rng rng(derive_seed(seed, stream));
      rng.shuffle(majority);
      majority.resize(n);
    }
    for (std::size_t i : solved) keep[i] = true;
    for (std::size_t i : unsolved) keep[i] = true;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.kept.push_back(records[i]);
  }
  return out;
}

std::vector<RecordMeta> greedy_length_match(std::span<const RecordMeta> records,
                                            int tolerance_tokens, std::uint64_t seed) {
  if (tolerance_tokens < 0) throw std::invalid_argument("tolerance must be >= 0");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::size_t> rank(records.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  std::vector<Item> solved, unsolved;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Item it{records[i].token_count, rank[i], i};
    (records[i].label == Label::solved ? solved : unsolved).push_back(it);
  }
  auto by_length = [](const Item& a, const Item& b) {
    return a.length != b.length ? a.length < b.length : a.rank < b.rank;
  };
  std::sort(solved.begin(), solved.end(), by_length);
  std::sort(unsolved.begin(), unsolved.end(), by_length);

  // Nearest lengths first: exact matches, then difference 1, and so on.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int tol = 0; tol <= tolerance_tokens; ++tol) {
    match_pass(solved, unsolved, tol, pairs);
    if (solved.empty() || unsolved.empty()) break;
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<RecordMeta> out;
  out.reserve(2 * pairs.size());
  for (auto [s, u] : pairs) {
    out.push_back(records[s]);
    out.push_back(records[u]);
  }
  return out;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("welch_t_test needs at least 2 observations per sample");
  }
  auto moments = [](std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  TTestResult r;
  r.mean_a = ma;
  r.mean_b = mb;
  r.sd_a = std::sqrt(va);
  r.sd_b = std::sqrt(vb);
  const double sa = va / na;
  const double sb = vb / nb;
  const double se2 = sa + sb;
  if (se2 == 0.0) {
    r.degenerate = true;
    r.degrees_of_freedom = na + nb - 2.0;
    if (ma == mb) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = ma > mb ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.t_statistic = (ma - mb) / std::sqrt(se2);
  r.degrees_of_freedom = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  boost::math::students_t dist(r.degrees_of_freedom);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t_statistic)));
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

CurationReport run_curation(std::span<const RecordMeta> records, const CurationConfig& config) {
  if (!(config.t_test_alpha_floor > 0.0 && config.t_test_alpha_floor < 1.0)) {
    throw std::invalid_argument("t_test_alpha_floor must be in (0, 1)");
  }
  if (config.banned_keywords.empty()) {
    throw std::invalid_argument("banned_keywords must be non-empty when filtering");
  }
  CurationReport rep;
  rep.counts.input = records.size();

  FilterResult filtered = filter_format_heuristics(records, config.banned_keywords);
  rep.counts.after_filter = filtered.kept.size();
  rep.filtered = std::move(filtered.removed);

  BalanceResult balanced = stratified_balance(filtered.kept, config.strata_key, config.seed,
                                              config.length_bucket_width);
  rep.counts.after_balance = balanced.kept.size();
  rep.warnings = std::move(balanced.warnings);

  rep.kept = greedy_length_match(balanced.kept, config.length_match_tolerance_tokens,
                                 derive_seed(config.seed, 0xC0FFEE));
  rep.counts.after_match = rep.kept.size();

  std::vector<double> solved_len, unsolved_len;
  for (const auto& r : rep.kept) {
    (r.label == Label::solved ? solved_len : unsolved_len).push_back(r.token_count);
  }
  rep.counts.solved = solved_len.size();
  rep.counts.unsolved = unsolved_len.size();
  if (solved_len.size() < 2) {
    throw NumericError("length matching left fewer than 2 pairs; cannot run the t-test");
  }
  rep.length_test = welch_t_test(solved_len, unsolved_len);
  rep.length_test_passed = rep.length_test.p_value > config.t_test_alpha_floor;
  return rep;
}

std::string CurationReport::to_json() const {
  using nlohmann::json;
  json removed = json::array();
  for (const auto& r : filtered) {
    removed.push_back({{"record_id", r.record.record_id}, {"keyword", r.keyword}});
  }
  json j = {
      {"counts",
       {{"input", counts.input},
        {"after_filter", counts.after_filter},
        {"after_balance", counts.after_balance},
        {"after_match", counts.after_match},
        {"solved", counts.solved},
        {"unsolved", counts.unsolved}}},
      {"removed_by_filter", counts.input - counts.after_filter},
      {"removed_by_balance", counts.after_filter - counts.after_balance},
      {"removed_by_match", counts.after_balance - counts.after_match},
      {"filtered", removed},
      {"warnings", warnings},
      {"length_t_test",
       {{"t_statistic", length_test.t_statistic},
        {"degrees_of_freedom", length_test.degrees_of_freedom},
        {"p_value", length_test.p_value},
        {"mean_solved", length_test.mean_a},
        {"mean_unsolved", length_test.mean_b},
        {"sd_solved", length_test.sd_a},
        {"sd_unsolved", length_test.sd_b},
        {"degenerate", length_test.degenerate},
        {"passed", length_test_passed}}},
  };
  return j.dump(2) + "\n";
}

std::string CurationReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "input records:        " << counts.input << "\n"
     << "after format filter:  " << counts.after_filter << " (-"
     << counts.input - counts.after_filter << ")\n"
     << "after balancing:      " << counts.after_balance << " (-"
     << counts.after_filter - counts.after_balance << ")\n"
     << "after length match:   " << counts.after_match << " (-"
     << counts.after_balance - counts.after_match << ")\n"
     << "final: " << counts.solved << " solved, " << counts.unsolved << " unsolved\n"
     << "token length means " << length_test.mean_a << " vs. " << length_test.mean_b
     << " (sd " << length_test.sd_a << " vs. " << length_test.sd_b << ")\n";
  os.precision(4);
  os << "Welch t = " << length_test.t_statistic << ", df = " << length_test.degrees_of_freedom
     << ", p = " << length_test.p_value << (length_test_passed ? " (ok)" : " (FAILED floor)")
     << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace actgeo::curation
