#include "actgeo/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "actgeo/errors.hpp"

namespace actgeo::trajectory {

std::string_view to_string(BasisLabel label) {
  return label == BasisLabel::assessment ? "assessment" : "execution";
}

SubspaceBasis SubspaceBasis::from_columns(Eigen::MatrixXd columns, BasisLabel label) {
  SubspaceBasis b;
  b.k = static_cast<int>(columns.cols());
  b.mean = Eigen::VectorXd::Zero(columns.rows());
  b.columns = std::move(columns);
  b.source_label = label;
  return b;
}

SubspaceBasis fit_basis(const Eigen::MatrixXd& X, double threshold, BasisLabel label) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("variance threshold must be in (0, 1]");
  if (X.rows() < 2) throw DataError("fit_basis needs at least 2 states");
  if (!X.allFinite()) throw DataError("states contain NaN or Inf");
  SubspaceBasis b;
  b.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd Xc = X.rowwise() - b.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinV);
  const Eigen::VectorXd var = svd.singularValues().array().square();
  const double total = var.sum();
  if (!(total > 0.0)) throw NumericError("fit_basis on zero-variance states");
  // Directions with negligible variance are rank deficiency, not signal.
  const double floor = 1e-12 * var(0);
  Eigen::Index k = 0;
  double acc = 0.0;
  while (k < var.size() && var(k) > floor) {
    acc += var(k);
    ++k;
    if (acc / total >= threshold - 1e-12) break;
  }
  b.columns = svd.matrixV().leftCols(k);
  b.k = static_cast<int>(k);
  b.variance_threshold = threshold;
  b.source_label = label;
  return b;
}

double subspace_fit(const Eigen::Ref<const Eigen::VectorXd>& h, const SubspaceBasis& basis) {
  if (h.size() != basis.columns.rows()) {
    throw DataError("dimension mismatch: basis has " + std::to_string(basis.columns.rows()) +
                    " rows, state has " + std::to_string(h.size()));
  }
  const Eigen::VectorXd c = basis.mean.size() == h.size() ? Eigen::VectorXd(h - basis.mean) : Eigen::VectorXd(h);
  const double denom = c.squaredNorm();
  if (!(denom > 0.0)) throw NumericError("subspace fit of a zero vector");
  return std::clamp((basis.columns.transpose() * c).squaredNorm() / denom, 0.0, 1.0);
}

std::optional<std::size_t> detect_collapse(std::span<const double> assess_fit,
                                           std::span<const double> exec_fit,
                                           CollapseDiagnostics* diagnostics) {
  CollapseDiagnostics diag;
  const std::size_t n = std::min(assess_fit.size(), exec_fit.size());
  std::optional<std::size_t> result;
  if (n >= 2) {
    for (std::size_t t = 1; t < n; ++t) {
      const double drop = assess_fit[t - 1] - assess_fit[t];
      if (!diag.max_drop_index || drop > diag.max_drop) {
        diag.max_drop = drop;
        diag.max_drop_index = t;
      }
      if (!diag.first_crossing && exec_fit[t] > assess_fit[t]) diag.first_crossing = t;
    }
    for (std::size_t t = 1; t < n; ++t) {
      if (exec_fit[t] > assess_fit[t] && assess_fit[t - 1] - assess_fit[t] == diag.max_drop) {
        result = t;
        break;
      }
    }
  }
  if (diagnostics) *diagnostics = diag;
  return result;
}

FitProfile trajectory_profile(const TraceRecord& trace, const SubspaceBasis& assess,
                              const SubspaceBasis& exec) {
  const std::size_t n = trace.n_states();
  if (n == 0) throw DataError("trace '" + trace.record_id + "' is empty");
  if (assess.columns.rows() != trace.hidden_dim || exec.columns.rows() != trace.hidden_dim) {
    throw DataError("trace '" + trace.record_id + "': basis dimension does not match hidden_dim " +
                    std::to_string(trace.hidden_dim));
  }
  FitProfile p;
  p.record_id = trace.record_id;
  p.cot_start = trace.cot_start;
  Eigen::VectorXd h(trace.hidden_dim);
  for (std::size_t t = 0; t < n; ++t) {
    const auto s = trace.state(t);
    for (int j = 0; j < trace.hidden_dim; ++j) h(j) = s[static_cast<std::size_t>(j)];
    p.assess_fit.push_back(subspace_fit(h, assess));
    p.exec_fit.push_back(subspace_fit(h, exec));
  }
  p.collapse_index = detect_collapse(p.assess_fit, p.exec_fit, &p.diagnostics);
  return p;
}

std::string profiles_to_csv(std::span<const FitProfile> profiles) {
  std::ostringstream os;
  os.precision(10);
  os << "record_id,token_index,phase,assess_fit,exec_fit,collapse_flag\n";
  for (const auto& p : profiles) {
    for (std::size_t t = 0; t < p.assess_fit.size(); ++t) {
      os << p.record_id << "," << t << "," << (t < p.cot_start ? "prompt" : "cot") << ","
         << p.assess_fit[t] << "," << p.exec_fit[t] << ","
         << (p.collapse_index && *p.collapse_index == t ? 1 : 0) << "\n";
    }
  }
  return os.str();
}

}  // namespace actgeo::trajectory
