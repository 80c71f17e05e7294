#pragma once

// PCA spectra, cumulative-variance curves and participation ratios.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace actgeo::dims {

struct PcaSpectrum {
  std::vector<double> eigenvalues;  // descending, clamped at 0, length = column count
  double total_variance = 0.0;
  std::size_t n_samples = 0;
};

// Eigenvalues of the sample covariance (denominator n-1). Uses the n x n Gram
// matrix when n < d. Throws DataError for n < 2.
PcaSpectrum pca_spectrum(const Eigen::MatrixXd& X);

// (k, fraction of variance in the top k components) for k = 1..d.
// Throws NumericError on zero total variance.
std::vector<std::pair<int, double>> cumulative_variance_curve(const PcaSpectrum& spectrum);

// Smallest k whose cumulative fraction reaches threshold (in (0, 1]).
int k_at_threshold(const PcaSpectrum& spectrum, double threshold);

// (sum l)^2 / sum l^2 after zeroing eigenvalues below 1e-12 * max.
// Throws NumericError when no eigenvalue is positive.
double participation_ratio(std::span<const double> eigenvalues);
inline double participation_ratio(const PcaSpectrum& s) { return participation_ratio(s.eigenvalues); }

struct PrEstimate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over resamples
  int n_resamples = 0;
  std::string subspace_label;
  std::vector<double> values;
};

// Resamples rows with replacement (same n) n_resamples times; resample i
// draws from derive_seed(seed, i). Throws DataError for n < 10.
PrEstimate bootstrap_pr(const Eigen::MatrixXd& X, int n_resamples, std::uint64_t seed,
                        std::string label = "", unsigned threads = 1);

}  // namespace actgeo::dims
