#include "gck/linalg.hpp"

#include <cmath>
#include <string>

#include "gck/errors.hpp"

namespace gck {

namespace {

void check_len(Eigen::Index n, Eigen::Index m) {
    if (n != m)
        throw ValidationError("dimension mismatch: factor is " + std::to_string(n) + ", vector is " +
                              std::to_string(m));
}

// Unblocked factorization of the diagonal block starting at (k, k).
template <typename Block>
void factor_diagonal(Block a, Eigen::Index offset) {
    const Eigen::Index b = a.rows();
    for (Eigen::Index j = 0; j < b; ++j) {
        double d = a(j, j) - a.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d)) throw NotPositiveDefinite(static_cast<std::size_t>(offset + j));
        double ljj = std::sqrt(d);
        a(j, j) = ljj;
        const Eigen::Index rest = b - j - 1;
        if (rest > 0) {
            a.col(j).tail(rest).noalias() -= a.block(j + 1, 0, rest, j) * a.row(j).head(j).transpose();
            a.col(j).tail(rest) /= ljj;
        }
    }
}

}  // namespace

CholeskyFactor::CholeskyFactor(Eigen::MatrixXd a) : l_(std::move(a)) {
    const Eigen::Index n = l_.rows();
    if (l_.cols() != n) throw ValidationError("cholesky: matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i)
            if (l_(i, j) != l_(j, i)) throw ValidationError("cholesky: matrix is not symmetric");

    for (Eigen::Index k = 0; k < n; k += kCholeskyBlock) {
        const Eigen::Index b = std::min(kCholeskyBlock, n - k);
        factor_diagonal(l_.block(k, k, b, b), k);
        const Eigen::Index rest = n - k - b;
        if (rest > 0) {
            auto l11 = l_.block(k, k, b, b);
            auto a21 = l_.block(k + b, k, rest, b);
            l11.triangularView<Eigen::Lower>().adjoint().solveInPlace<Eigen::OnTheRight>(a21);
            l_.block(k + b, k + b, rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(a21, -1.0);
        }
    }
    l_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Eigen::VectorXd CholeskyFactor::forward(const Eigen::VectorXd& b) const {
    check_len(size(), b.size());
    return l_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd y = forward(b);
    l_.triangularView<Eigen::Lower>().adjoint().solveInPlace(y);
    return y;
}

Eigen::MatrixXd CholeskyFactor::solve_matrix(const Eigen::MatrixXd& b) const {
    check_len(size(), b.rows());
    Eigen::MatrixXd y = l_.triangularView<Eigen::Lower>().solve(b);
    l_.triangularView<Eigen::Lower>().adjoint().solveInPlace(y);
    return y;
}

double CholeskyFactor::log_det() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
}

double CholeskyFactor::quad_form(const Eigen::VectorXd& z) const { return forward(z).squaredNorm(); }

Eigen::MatrixXd CholeskyFactor::reconstruct() const { return l_ * l_.transpose(); }

CholeskyFactor cholesky(const Eigen::MatrixXd& a) { return CholeskyFactor(a); }
Eigen::VectorXd solve(const CholeskyFactor& f, const Eigen::VectorXd& b) { return f.solve(b); }
double log_det(const CholeskyFactor& f) { return f.log_det(); }
double quad_form(const CholeskyFactor& f, const Eigen::VectorXd& z) { return f.quad_form(z); }

}  // namespace gck
