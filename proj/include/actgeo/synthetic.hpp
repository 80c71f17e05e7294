#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/random.hpp"
#include "actgeo/store.hpp"

namespace actgeo {

// Haar-distributed d x d orthogonal matrix.
Eigen::MatrixXd random_orthogonal(int d, Rng& rng);

// Two Gaussian classes (solved / unsolved) whose means sit at +-separation/2
// along a fixed random unit direction; the shared covariance has the given
// eigenvalues along a random orthonormal basis (zero-padded to hidden_dim).
struct SyntheticSnapshotSpec {
  int hidden_dim = 16;
  int n_per_class = 100;
  double class_mean_separation = 0.0;
  std::vector<double> covariance_spectrum;  // empty = isotropic, unit variance
  std::uint64_t seed = 0;

  int n_layers = 1;
  std::vector<int> signal_layers;  // empty = every layer carries the class signal
  std::vector<PositionTag> positions = {PositionTag::last_input()};
  std::vector<PositionTag> signal_positions;  // empty = every position carries the signal
  // Scale the separation by prompt_percent/100 at each position instead of
  // using signal_positions. eos carries the full signal.
  bool ramp_with_prompt_percent = false;
  // Fraction of each record's noise variance shared across all its layers and
  // positions; 0 draws every vector independently.
  double shared_fraction = 0.0;

  std::string dataset_name = "synthetic";
  std::vector<std::string> domains = {"numerical"};  // assigned round-robin per class
  double mean_token_count = 80.0;
  double token_count_sd = 20.0;
};

struct SyntheticStore {
  DatasetManifest manifest;
  std::vector<StoredRecord> records;
  Eigen::VectorXd class_direction;  // unit vector the class means differ along

  Store write(const std::filesystem::path& dir) const {
    return write_store(manifest, records, dir);
  }
};

SyntheticStore generate_synthetic_snapshot(const SyntheticSnapshotSpec& spec);

// A trace whose first prompt_len states lie in a random assess_rank-dimensional
// subspace and whose remaining gen_len states lie in an orthogonal
// exec_rank-dimensional subspace, plus isotropic noise of std `noise`.
struct SyntheticTraceSpec {
  int hidden_dim = 64;
  int assess_rank = 16;
  int exec_rank = 4;
  int prompt_len = 32;
  int gen_len = 32;
  double noise = 0.0;
  std::uint64_t seed = 0;
  // Subspaces are drawn from basis_seed (defaults to seed) so that several
  // traces can share the same generating geometry.
  std::optional<std::uint64_t> basis_seed;
  int layer_index = 0;
  std::string record_id = "trace-0";
};

struct SyntheticTrace {
  TraceRecord trace;
  Eigen::MatrixXd assess_basis;  // hidden_dim x assess_rank, orthonormal columns
  Eigen::MatrixXd exec_basis;    // hidden_dim x exec_rank, orthonormal columns
};

SyntheticTrace generate_synthetic_trace(const SyntheticTraceSpec& spec);

// n_traces traces sharing one pair of generating subspaces; labels alternate
// solved / unsolved starting with solved.
SyntheticStore generate_synthetic_trace_store(const SyntheticTraceSpec& spec, int n_traces);

}  // namespace actgeo
