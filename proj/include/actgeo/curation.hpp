#pragma once

// Confound control over prompt metadata: format-keyword filtering, stratified
// label balancing and greedy length matching, applied in that order.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actgeo/store.hpp"

namespace actgeo::curation {

enum class StrataKey { domain_tag, domain_and_length_bucket };

struct CurationConfig {
  std::vector<std::string> banned_keywords = default_keywords();
  StrataKey strata_key = StrataKey::domain_tag;
  int length_bucket_width = 32;  // tokens per bucket for domain_and_length_bucket
  int length_match_tolerance_tokens = 2;
  double t_test_alpha_floor = 0.4;
  std::uint64_t seed = 0;

  static std::vector<std::string> default_keywords();
};

struct Removal {
  RecordMeta record;
  std::string keyword;
};

struct FilterResult {
  std::vector<RecordMeta> kept;
  std::vector<Removal> removed;
};

FilterResult filter_format_heuristics(std::span<const RecordMeta> records,
                                      std::span<const std::string> banned_keywords);

struct BalanceResult {
  std::vector<RecordMeta> kept;
  std::vector<std::string> warnings;  // one per dropped single-label stratum
};

BalanceResult stratified_balance(std::span<const RecordMeta> records, StrataKey key,
                                 std::uint64_t seed, int length_bucket_width = 32);

// Pairs solved with unsolved records whose token counts differ by at most
// tolerance. Both labels are sorted by length and matched with a two-pointer
// sweep, first at difference 0, then 1, ... up to tolerance, so the closest
// lengths pair first. Output lists pairs consecutively (solved, unsolved).
std::vector<RecordMeta> greedy_length_match(std::span<const RecordMeta> records,
                                            int tolerance_tokens, std::uint64_t seed);

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  double mean_a = 0.0, mean_b = 0.0;
  double sd_a = 0.0, sd_b = 0.0;
  bool degenerate = false;  // both samples had zero variance
};

// Welch's unequal-variance two-sample t-test, two-sided.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct StageCounts {
  std::size_t input = 0;
  std::size_t after_filter = 0;
  std::size_t after_balance = 0;
  std::size_t after_match = 0;
  std::size_t solved = 0;
  std::size_t unsolved = 0;
};

struct CurationReport {
  StageCounts counts;
  std::vector<Removal> filtered;
  std::vector<std::string> warnings;
  TTestResult length_test;
  bool length_test_passed = false;
  std::vector<RecordMeta> kept;

  std::string to_json() const;
  std::string to_text() const;
};

// Runs filter -> balance -> match and the final length t-test.
// length_test_passed is false when p <= t_test_alpha_floor; the pipeline
// treats that as a stage failure.
CurationReport run_curation(std::span<const RecordMeta> records, const CurationConfig& config);

}  // namespace actgeo::curation
