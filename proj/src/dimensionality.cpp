#include "actgeo/dimensionality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"
#include "parallel.hpp"

namespace actgeo::dims {

namespace {

PcaSpectrum spectrum_of_centered(const Eigen::MatrixXd& Xc, std::size_t n) {
  const double denom = static_cast<double>(n) - 1.0;
  const Eigen::MatrixXd C = Xc.rows() < Xc.cols() ? Eigen::MatrixXd(Xc * Xc.transpose() / denom)
                                                  : Eigen::MatrixXd(Xc.transpose() * Xc / denom);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  PcaSpectrum s;
  s.n_samples = n;
  s.eigenvalues.assign(static_cast<std::size_t>(Xc.cols()), 0.0);
  const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    s.eigenvalues[static_cast<std::size_t>(i)] = std::max(0.0, ev(ev.size() - 1 - i));
  }
  s.total_variance = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
  return s;
}

}  // namespace

PcaSpectrum pca_spectrum(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) throw DataError("PCA spectrum needs at least 2 rows");
  if (!X.allFinite()) throw DataError("activation matrix contains NaN or Inf");
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  return spectrum_of_centered(Xc, static_cast<std::size_t>(X.rows()));
}

std::vector<std::pair<int, double>> cumulative_variance_curve(const PcaSpectrum& spectrum) {
  if (!(spectrum.total_variance > 0.0)) throw NumericError("zero total variance");
  std::vector<std::pair<int, double>> out;
  double acc = 0.0;
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    acc += spectrum.eigenvalues[i];
    out.emplace_back(static_cast<int>(i) + 1, std::min(1.0, acc / spectrum.total_variance));
  }
  if (!out.empty()) out.back().second = 1.0;
  return out;
}

int k_at_threshold(const PcaSpectrum& spectrum, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in (0, 1]");
  const auto curve = cumulative_variance_curve(spectrum);
  for (const auto& [k, f] : curve) {
    if (f >= threshold) return k;
  }
  return curve.back().first;
}

double participation_ratio(std::span<const double> eigenvalues) {
  double top = 0.0;
  for (double v : eigenvalues) top = std::max(top, v);
  if (!(top > 0.0)) throw NumericError("participation ratio of an all-zero spectrum");
  const double floor = 1e-12 * top;
  double s = 0.0, s2 = 0.0;
  for (double v : eigenvalues) {
    if (v < floor) continue;
    s += v;
    s2 += v * v;
  }
  return s * s / s2;
}

PrEstimate bootstrap_pr(const Eigen::MatrixXd& X, int n_resamples, std::uint64_t seed,
                        std::string label, unsigned threads) {
  if (X.rows() < 10) throw DataError("bootstrap PR needs at least 10 rows, got " + std::to_string(X.rows()));
  if (n_resamples < 1) throw std::invalid_argument("n_resamples must be >= 1");
  if (!X.allFinite()) throw DataError("activation matrix contains NaN or Inf");
  const Eigen::Index n = X.rows();
  PrEstimate est;
  est.n_resamples = n_resamples;
  est.subspace_label = std::move(label);
  est.values.resize(static_cast<std::size_t>(n_resamples));
  detail::parallel_for(est.values.size(), threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    Eigen::MatrixXd B(n, X.cols());
    for (Eigen::Index i = 0; i < n; ++i) B.row(i) = X.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
    B.rowwise() -= B.colwise().mean();
    est.values[r] = participation_ratio(spectrum_of_centered(B, static_cast<std::size_t>(n)));
  });
  est.mean = std::accumulate(est.values.begin(), est.values.end(), 0.0) / n_resamples;
  if (n_resamples > 1) {
    double ss = 0.0;
    for (double v : est.values) ss += (v - est.mean) * (v - est.mean);
    est.std = std::sqrt(ss / (n_resamples - 1));
  }
  return est;
}

}  // namespace actgeo::dims
