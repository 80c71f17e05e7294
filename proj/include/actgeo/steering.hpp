#pragma once

// Steering along the linear probe's belief direction: h' = h + alpha * d,
// belief-flip measurement and a paired permutation test on task outcomes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/probes.hpp"

namespace actgeo::steering {

struct SteeringDirection {
  Eigen::VectorXd unit_vector;
  int source_layer = -1;
  std::string source_probe_id;
  double derivation_norm = 0.0;  // ||w|| before normalization
};

// d = w / ||w||. Throws std::invalid_argument for a non-logistic probe and
// NumericError for a zero weight vector.
SteeringDirection derive_direction(const probes::TrainedProbe& probe, int layer,
                                   std::string probe_id = "");

// h + alpha * d. Throws DataError on a dimension mismatch.
Eigen::VectorXd apply_steer(const Eigen::VectorXd& h, double alpha, const SteeringDirection& d);
// Row-wise version for a matrix of activations.
Eigen::MatrixXd apply_steer_rows(const Eigen::MatrixXd& H, double alpha, const SteeringDirection& d);

enum class Sign { to_solved, to_unsolved };
std::string_view to_string(Sign sign);
Sign parse_sign(std::string_view text);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct AlphaSearch {
  double alpha = 0.0;  // magnitude; applied with the sign of the direction
  double sigma_proj = 0.0;
  double upper_bound = 0.0;
  bool reached = false;
  std::vector<std::pair<double, double>> trace;  // (alpha, mean belief) per evaluation
};

struct OutcomeTest {
  double p_value = 1.0;
  MeanStd baseline_accuracy;  // std is the standard error of the mean
  MeanStd steered_accuracy;
  double performance_delta = 0.0;
  std::size_t n = 0;
  std::size_t discordant = 0;
  bool exact = false;
  int n_permutations = 0;
};

struct InterventionReport {
  std::string dataset;
  Sign direction_sign = Sign::to_solved;
  double alpha = 0.0;  // signed value actually added
  MeanStd baseline_belief;
  MeanStd steered_belief;
  double belief_flip_delta = 0.0;
  std::vector<std::string> record_ids;
  std::vector<double> baseline_per_record;
  std::vector<double> steered_per_record;
  std::optional<AlphaSearch> alpha_search;
  std::optional<OutcomeTest> outcome;

  std::string to_json() const;
  std::string to_text() const;
};

// Beliefs before and after adding alpha * d to every row. alpha must be
// >= 0 for to_solved and <= 0 for to_unsolved. Throws DataError on an empty
// subset.
InterventionReport belief_flip_experiment(const Eigen::MatrixXd& H, std::span<const std::string> ids,
                                          const probes::TrainedProbe& probe,
                                          const SteeringDirection& d, double alpha,
                                          Sign sign = Sign::to_solved);

// Same as belief_flip_experiment with sign to_unsolved (alpha <= 0).
InterventionReport inverse_flip_experiment(const Eigen::MatrixXd& H, std::span<const std::string> ids,
                                           const probes::TrainedProbe& probe,
                                           const SteeringDirection& d, double alpha);

// Smallest |alpha| in [0, 20 * std(H d)] whose mean steered belief reaches
// `target` (to_solved) or drops to 1 - target (to_unsolved), by bisection.
AlphaSearch auto_alpha(const Eigen::MatrixXd& H, const probes::TrainedProbe& probe,
                       const SteeringDirection& d, Sign sign, double target = 0.95);

enum class PermutationMode { automatic, exact, monte_carlo };

// Two-sided paired sign-flip test on the mean of steered - baseline.
// automatic enumerates all 2^m sign patterns of the m nonzero differences
// when 2^m <= n_permutations and samples otherwise (with the +1 correction).
OutcomeTest outcome_significance_test(std::span<const int> baseline, std::span<const int> steered,
                                      int n_permutations = 10000, std::uint64_t seed = 0,
                                      PermutationMode mode = PermutationMode::automatic);

struct Outcome {
  std::string record_id;
  int correct = 0;
};

// CSV with header "record_id,correct" and correct in {0,1}.
std::vector<Outcome> parse_outcomes(std::string_view csv);
std::vector<Outcome> load_outcomes(const std::filesystem::path& path);

// Aligns two outcome lists by record id (baseline order). Throws DataError
// when the id sets differ.
std::pair<std::vector<int>, std::vector<int>> pair_outcomes(std::span<const Outcome> baseline,
                                                            std::span<const Outcome> steered);

std::string direction_to_json(const SteeringDirection& d);

}  // namespace actgeo::steering
