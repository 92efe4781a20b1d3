#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace ccp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Fractional part, frac(t) = t - floor(t), always in [0, 1).
inline double frac(double t) { return t - std::floor(t); }

}  // namespace ccp
