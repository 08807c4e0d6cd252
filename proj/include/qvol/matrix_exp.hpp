#pragma once

#include <Eigen/Dense>

namespace qvol {

// exp(A) by scaling and squaring with the degree-13 Pade approximant (Higham 2005).
// Throws NumericalOverflow if the result has non-finite entries.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

// exp(A) v by sub-stepped Taylor series, never forming exp(A).
Eigen::VectorXd expm_action(const Eigen::MatrixXd& a, const Eigen::VectorXd& v);

}  // namespace qvol
