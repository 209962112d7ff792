#pragma once

#include <Eigen/Dense>

namespace gck {

// Lower Cholesky factor A = L L^T.  Blocked right-looking factorization in
// column-major storage; no pivoting and no jitter.  A non-positive pivot
// raises NotPositiveDefinite with its 0-based index.
class CholeskyFactor {
public:
    explicit CholeskyFactor(Eigen::MatrixXd a);

    Eigen::Index size() const { return l_.rows(); }
    const Eigen::MatrixXd& L() const { return l_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& b) const;
    // L^{-1} b
    Eigen::VectorXd forward(const Eigen::VectorXd& b) const;
    double log_det() const;
    // z^T A^{-1} z = |L^{-1} z|^2
    double quad_form(const Eigen::VectorXd& z) const;
    Eigen::MatrixXd reconstruct() const;

private:
    Eigen::MatrixXd l_;
};

constexpr Eigen::Index kCholeskyBlock = 96;

CholeskyFactor cholesky(const Eigen::MatrixXd& a);
Eigen::VectorXd solve(const CholeskyFactor& f, const Eigen::VectorXd& b);
double log_det(const CholeskyFactor& f);
double quad_form(const CholeskyFactor& f, const Eigen::VectorXd& z);

}  // namespace gck
