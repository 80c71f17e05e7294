#pragma once

// Probing classifiers over activation matrices (rows = samples, y in {0,1}
// with 1 = solved). Every family is deterministic under its seed.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace actgeo::probes {

enum class Family { logistic, rbf_kernel, gradient_boosted_trees, mlp2 };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);
inline constexpr Family kAllFamilies[] = {Family::logistic, Family::rbf_kernel,
                                          Family::gradient_boosted_trees, Family::mlp2};

// Hyperparameters for all families; only the ones belonging to `family` are
// read. Defaults are the tuned values used for the published probe suite.
struct ProbeSpec {
  Family family = Family::logistic;

  double C = 0.8;               // logistic: inverse L2 strength; rbf: box constraint
  std::optional<double> gamma;  // rbf kernel coefficient; nullopt = 'scale' = 1/(d*Var(X))

  int n_trees = 200;
  int max_depth = 5;
  double learning_rate = 0.1;  // gbt shrinkage

  int hidden_width = 512;
  double mlp_learning_rate = 5e-3;
  int max_epochs = 50;  // one full-batch Adam step per epoch
  int patience = 5;

  bool standardize = true;  // per-feature z-scoring fit on the training rows
  std::uint64_t seed = 0;

  static ProbeSpec defaults(Family family);
  // Throws std::invalid_argument when a hyperparameter of `family` is not positive.
  void validate() const;
};

// Per-feature affine map x -> (x - mean) / scale.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X);
  static Standardizer identity(Eigen::Index d);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

// Weights live in raw input space: P(solved | h) = sigmoid(h.w + b).
struct LogisticParams {
  Eigen::VectorXd w;
  double b = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct RbfParams {
  Standardizer standardizer;
  Eigen::MatrixXd support_vectors;  // standardized rows
  Eigen::VectorXd dual_coef;        // alpha_i * y_i (y in {-1,+1})
  double intercept = 0.0;           // decision = sum dual_coef_i K(sv_i, x) + intercept
  double gamma = 0.0;
  double platt_a = 0.0;  // P = 1 / (1 + exp(platt_a * decision + platt_b))
  double platt_b = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1 = leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf margin contribution (already shrunk)
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct GbtParams {
  double base_margin = 0.0;
  std::vector<Tree> trees;
};

struct MlpParams {
  Standardizer standardizer;
  Eigen::MatrixXd w1;  // hidden x d
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
  int epochs_run = 0;
  int best_epoch = 0;
};

struct TrainingMetadata {
  std::size_t n_train = 0;
  int layer_index = -1;
  std::string position_tag;
};

struct TrainedProbe {
  ProbeSpec spec;
  Eigen::Index input_dim = 0;
  std::variant<LogisticParams, RbfParams, GbtParams, MlpParams> params;
  TrainingMetadata meta;
};

// Throws std::invalid_argument for single-class y, fewer than 2 rows per
// class, or size mismatch; DataError for non-finite X.
TrainedProbe train_probe(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y);

// Probabilities of the solved class, each in [0, 1].
Eigen::VectorXd predict_proba(const TrainedProbe& probe, const Eigen::MatrixXd& X);

// Fraction of rows where (proba >= 0.5) equals y.
double accuracy(const TrainedProbe& probe, const Eigen::MatrixXd& X, std::span<const int> y);

std::string probe_to_json(const TrainedProbe& probe);
TrainedProbe probe_from_json(std::string_view text);

// ---- evaluation ----

// Fold index per row; each class is shuffled then dealt round-robin.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

// Row indices of a stratified split: `holdout_fraction` of each class (at
// least one row when the class has two or more) goes to the second list.
std::pair<std::vector<int>, std::vector<int>> stratified_split(std::span<const int> y,
                                                               double holdout_fraction,
                                                               std::uint64_t seed);

struct CvResult {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
  std::vector<double> fold_accuracies;
};

CvResult k_fold_cv(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y, int k,
                   std::uint64_t seed);

// Candidate values per hyperparameter name: C, gamma (0 stands for 'scale'),
// n_trees, max_depth, learning_rate, hidden_width, mlp_learning_rate,
// max_epochs, patience.
using Grid = std::map<std::string, std::vector<double>>;

// Table-style search space for a family.
Grid default_grid(Family family);

void set_hyperparameter(ProbeSpec& spec, const std::string& name, double value);

struct GridCell {
  ProbeSpec spec;
  CvResult cv;
};

struct GridSearchResult {
  ProbeSpec best;
  std::vector<GridCell> cells;  // Cartesian order
  TrainedProbe model;           // best spec retrained on all rows
};

// Exhaustive search; ties on mean accuracy go to the lexicographically
// smallest tuple (C, gamma ['scale' first], n_trees, max_depth,
// learning_rate, hidden_width, mlp_learning_rate, max_epochs, patience).
GridSearchResult grid_search(Family family, const Grid& grid, const Eigen::MatrixXd& X,
                             std::span<const int> y, int k, std::uint64_t seed,
                             const ProbeSpec& base = {});

struct HeldOutEvaluation {
  GridSearchResult search;  // run on the validation slice
  double test_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// 80/20 stratified train/test split; the grid search runs k-fold CV on a 20%
// validation slice carved from the training part, and the winner is
// retrained on the full training part before scoring the test part.
HeldOutEvaluation tune_and_evaluate(Family family, const Grid& grid, const Eigen::MatrixXd& X,
                                    std::span<const int> y, int k, std::uint64_t seed);

std::string grid_search_to_json(const GridSearchResult& result);

}  // namespace actgeo::probes
