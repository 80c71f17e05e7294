#pragma once

#include <span>

#include <Eigen/Dense>

#include "actgeo/probes.hpp"

namespace actgeo::probes::detail {

LogisticParams train_logistic(const ProbeSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);
RbfParams train_rbf(const ProbeSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
GbtParams train_gbt(const ProbeSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
MlpParams train_mlp(const ProbeSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y);

Eigen::VectorXd rbf_decision(const RbfParams& p, const Eigen::MatrixXd& X);
Eigen::VectorXd mlp_logits(const MlpParams& p, const Eigen::MatrixXd& X);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace actgeo::probes::detail
