#pragma once

// Representational similarity: linear CKA between layers, cosine similarity
// of intermediate prompt positions to final-token class centroids, and 2-D
// PCA projections for plotting.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/store.hpp"

namespace actgeo::geometry {

// ||Yc^T Xc||_F^2 / (||Xc^T Xc||_F ||Yc^T Yc||_F) with Xc, Yc column-centered.
// Rows must be aligned. Throws DataError on a row mismatch and NumericError
// when either input has zero variance.
double linear_cka(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

struct CkaMatrix {
  std::vector<int> row_layers;
  std::vector<int> col_layers;
  Eigen::MatrixXd values;  // values(i, j) = CKA(a at row_layers[i], b at col_layers[j])
  Label condition_a = Label::solved;
  Label condition_b = Label::solved;

  // Header row "layer,<col layers...>", then one row per row layer.
  std::string to_csv() const;
};

struct CkaOptions {
  PositionTag position = PositionTag::last_input();
  // Cross-condition cells compare random equal-size subsamples paired by
  // sorted index, averaged over `repeats` draws.
  int subsample = 200;
  int repeats = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// One matrix per layer, rows aligned across layers within a condition.
// same_condition uses every row and needs a == b in shape.
CkaMatrix cka_layer_matrix(std::span<const int> layers, std::span<const Eigen::MatrixXd> a,
                           std::span<const Eigen::MatrixXd> b, bool same_condition,
                           const CkaOptions& options);

CkaMatrix cka_layer_matrix(const Store& store, Label condition_a, Label condition_b,
                           const CkaOptions& options = {});

struct CentroidSimilarityMap {
  std::vector<int> rows;  // prompt percentages, ascending
  std::vector<int> cols;  // layer indices
  Eigen::MatrixXd values;
  Label target = Label::solved;

  std::string to_csv() const;
};

// For each label: centroid(label, L) is the mean last_input vector of that
// label at layer L; cell (p, L) is the mean cosine between the label's
// activations at p% of the prompt and that centroid. last_input counts as
// 100%, eos is ignored. Throws DataError if a layer lacks last_input vectors.
std::vector<CentroidSimilarityMap> centroid_similarity_map(const Store& store,
                                                           std::vector<int> layers = {});

// Tables for one layer in any order; the last_input table defines centroids.
// Results are for {solved, unsolved} in that order, with a single column.
std::vector<CentroidSimilarityMap> centroid_similarity_map(std::span<const SnapshotTable> tables);

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b);

struct Projection2d {
  Eigen::MatrixXd coordinates;  // n x 2
  Eigen::MatrixXd components;   // d x 2, unit columns
  double explained[2] = {0.0, 0.0};  // fraction of total variance per component

  std::string to_csv(std::span<const std::string> ids = {},
                     std::span<const Label> labels = {}) const;
};

// Top-2 principal components of column-centered X. Each component's
// largest-magnitude loading is made positive. Throws NumericError on rank-0 X.
Projection2d pca_project_2d(const Eigen::MatrixXd& X);

}  // namespace actgeo::geometry
