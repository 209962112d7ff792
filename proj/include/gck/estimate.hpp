#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gck/covmodels.hpp"

namespace gck {

// Correlation matrices of one location set over a varying scale.  Pairwise
// distances are computed once; for GC r^delta is cached and the matrix is
// evaluated with vectorized exp/log1p.
class ScaleFamily {
public:
    // Shape parameters come from `shape`; its scale and variance are ignored.
    ScaleFamily(const CovarianceModel& shape, const LocationSet& locs);

    std::size_t size() const { return n_; }
    const CovarianceModel& shape() const { return shape_; }
    Eigen::MatrixXd correlation(double scale) const;

private:
    CovarianceModel shape_;
    std::size_t n_ = 0;
    Eigen::ArrayXd dist_;  // packed strict lower triangle, column by column (r^delta for GC)
};

struct LikelihoodValue {
    double value = 0.0;
    bool factorized = true;  // false: the covariance matrix was not positive definite, value = -inf
};

// -1/2 (n log(2 pi sigma2) + log|R| + Z'R^{-1}Z / sigma2) with R the correlation
// matrix of `model` (its variance is ignored in favour of sigma2).
LikelihoodValue log_likelihood(const Eigen::VectorXd& z, const LocationSet& locs, double sigma2,
                               const CovarianceModel& model);

struct ProfilePoint {
    double scale = 0.0;
    double sigma2 = 0.0;   // Z'R^{-1}Z / n
    double log_det = 0.0;  // log|R|
    double value = 0.0;    // profile log-likelihood, -inf on failure
    bool factorized = true;
};

// Profile likelihood in the scale with the variance concentrated out:
//   PL(g) = -1/2 (log(2 pi) + n log s2(g) + log|R(g)| + n).
// The constant is log(2 pi), not n log(2 pi); only the argmax is used.
class ProfileLikelihood {
public:
    ProfileLikelihood(Eigen::VectorXd z, const LocationSet& locs, const CovarianceModel& shape);

    ProfilePoint evaluate(double scale) const;
    std::size_t size() const { return static_cast<std::size_t>(z_.size()); }
    const ScaleFamily& family() const { return fam_; }
    bool zero_data() const { return zero_; }

private:
    Eigen::VectorXd z_;
    ScaleFamily fam_;
    bool zero_ = false;
};

// GC convenience forms.  Factorization failure propagates as NotPositiveDefinite.
double profile_sigma2(const Eigen::VectorXd& z, const LocationSet& locs, double gamma, double delta, double lambda);
double profile_loglik(const Eigen::VectorXd& z, const LocationSet& locs, double gamma, double delta, double lambda);

struct ScalarMax {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
    bool at_boundary = false;
};

constexpr int kPrescanPoints = 32;

// Maximizes f on [lo, hi]: a log-spaced pre-scan picks the best bracket, then
// Brent's method (golden section with parabolic steps) refines it to absolute
// tolerance tol.  Values of -inf are allowed; all -inf raises FitFailure.
ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol,
                          int prescan = kPrescanPoints);

struct MLFit {
    double gamma_hat = 0.0;
    double sigma2_hat = 0.0;
    double profile_loglik = 0.0;
    double search_lo = 0.0;
    double search_hi = 0.0;
    int iterations = 0;
    bool at_boundary = false;
    bool degenerate = false;  // Z = 0: sigma2_hat = 0, no usable inference
};

// tol <= 0 selects 1e-8 (hi - lo).  lo == hi fixes the scale.
MLFit fit_scale(const ProfileLikelihood& pl, double lo, double hi, double tol = 0.0);
MLFit fit_scale(const Eigen::VectorXd& z, const LocationSet& locs, double delta, double lambda, double lo,
                double hi, double tol = 0.0);

// sqrt(n/2) (s2 g0^delta / (sigma0^2 x^delta) - 1).  lambda cancels in the
// ratio of microergodic parameters and is not needed.
double normalized_stat(double sigma2_hat, double x, double gamma0, double sigma0_2, double delta, std::size_t n);

double microergodic_value(double sigma2, double gamma, double delta, double lambda);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double estimate = 0.0;
};

// theta = s2 lambda / g^delta with sqrt(n)(theta_hat/theta - 1) ~ N(0, 2);
// inverting gives [theta_hat/(1 + h), theta_hat/(1 - h)], h = z sqrt(2/n),
// with an infinite upper end once h >= 1.
Interval microergodic_ci(const MLFit& fit, double delta, double lambda, std::size_t n, double level = 0.95);

}  // namespace gck
