#pragma once

// Assessment / execution subspaces and the per-token subspace-fit profile of
// a generation trace.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/store.hpp"

namespace actgeo::trajectory {

enum class BasisLabel { assessment, execution };
std::string_view to_string(BasisLabel label);

struct SubspaceBasis {
  Eigen::MatrixXd columns;  // d x k, orthonormal
  Eigen::VectorXd mean;     // subtracted from states before projecting
  double variance_threshold = 1.0;
  int k = 0;
  BasisLabel source_label = BasisLabel::assessment;

  // Basis with the given orthonormal columns and a zero mean.
  static SubspaceBasis from_columns(Eigen::MatrixXd columns, BasisLabel label);
};

// Top-k principal directions of column-centered X with k minimal such that
// the cumulative variance fraction reaches threshold. Throws NumericError on
// zero variance, DataError for fewer than 2 rows.
SubspaceBasis fit_basis(const Eigen::MatrixXd& X, double threshold, BasisLabel label);

// ||B^T (h - mean)||^2 / ||h - mean||^2, in [0, 1]. Throws NumericError
// when h - mean is zero, DataError on a dimension mismatch.
double subspace_fit(const Eigen::Ref<const Eigen::VectorXd>& h, const SubspaceBasis& basis);

struct CollapseDiagnostics {
  std::optional<std::size_t> first_crossing;  // first t >= 1 with exec > assess
  std::optional<std::size_t> max_drop_index;  // t maximizing assess(t-1) - assess(t)
  double max_drop = 0.0;
};

struct FitProfile {
  std::string record_id;
  std::vector<double> assess_fit;
  std::vector<double> exec_fit;
  std::size_t cot_start = 0;
  std::optional<std::size_t> collapse_index;
  CollapseDiagnostics diagnostics;
};

// First t >= 1 where exec_fit(t) > assess_fit(t) and the step drop
// assess_fit(t-1) - assess_fit(t) equals the largest single-step drop of the
// trace. Absent for profiles shorter than 2 or with no such token.
std::optional<std::size_t> detect_collapse(std::span<const double> assess_fit,
                                           std::span<const double> exec_fit,
                                           CollapseDiagnostics* diagnostics = nullptr);

// Throws DataError for an empty trace or mismatched dimensions.
FitProfile trajectory_profile(const TraceRecord& trace, const SubspaceBasis& assess,
                              const SubspaceBasis& exec);

// Columns: record_id, token_index, phase, assess_fit, exec_fit, collapse_flag.
std::string profiles_to_csv(std::span<const FitProfile> profiles);

}  // namespace actgeo::trajectory
