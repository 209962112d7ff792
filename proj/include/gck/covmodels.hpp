#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gck {

enum class Family { GC, MT, GW, SqExp };

std::string family_name(Family f);

// Isotropic covariance model.  Parameter roles by family:
//   GC:    scale = gamma, shape1 = delta, shape2 = lambda
//   MT:    scale = alpha, shape1 = nu
//   GW:    scale = beta,  shape1 = kappa, shape2 = mu
//   SqExp: scale = alpha, correlation exp(-r^2/alpha)
struct CovarianceModel {
    Family family = Family::GC;
    double variance = 1.0;
    double scale = 1.0;
    double shape1 = 0.0;
    double shape2 = 0.0;
    int dim = 1;
    bool checked = true;

    static CovarianceModel gc(double sigma2, double delta, double lambda, double gamma, int d = 1);
    static CovarianceModel mt(double sigma2, double nu, double alpha, int d = 1);
    static CovarianceModel gw(double sigma2, double kappa, double mu, double beta, int d = 1);
    static CovarianceModel sqexp(double sigma2, double alpha, int d = 1);
    // Skips validity checks; for deliberately probing parameter regions
    // outside the positive-definiteness conditions.
    static CovarianceModel unchecked(Family f, double sigma2, double scale, double shape1, double shape2, int d);

    CovarianceModel with_scale(double s) const;
    CovarianceModel with_variance(double v) const;

    // Throws ValidationError describing the first violated condition.
    void validate() const;
    bool is_valid() const noexcept;

    double delta() const { return shape1; }
    double lambda() const { return shape2; }
    double nu() const { return shape1; }
    double kappa() const { return shape1; }
    double mu() const { return shape2; }

    std::string describe() const;
};

// Ordered points in [0,1]^d, stored row-major.
class LocationSet {
public:
    LocationSet() = default;
    LocationSet(int d, std::vector<double> coords);

    int dim() const { return d_; }
    std::size_t size() const { return coords_.size() / static_cast<std::size_t>(d_); }
    const double* point(std::size_t i) const { return coords_.data() + i * static_cast<std::size_t>(d_); }
    const std::vector<double>& coords() const { return coords_; }

    LocationSet subset(const std::vector<std::size_t>& idx) const;
    double distance(std::size_t i, std::size_t j) const;
    double distance_to(std::size_t i, const double* p) const;

private:
    int d_ = 1;
    std::vector<double> coords_;
};

double euclidean(const double* a, const double* b, int d);

// Precomputed evaluator for one model; the free function correlation() wraps it.
class CorrelationKernel {
public:
    explicit CorrelationKernel(const CovarianceModel& m);
    double operator()(double r) const;
    const CovarianceModel& model() const { return m_; }

private:
    enum class GwMethod { Power, Integer, HalfInteger, Quadrature };
    double gw_unit(double x) const;

    CovarianceModel m_;
    double gc_ratio_ = 0.0;      // lambda / delta
    double mt_log_norm_ = 0.0;   // (1 - nu) ln 2 - ln Gamma(nu)
    GwMethod gw_method_ = GwMethod::Power;
    std::vector<double> gw_coef_;  // coefficients of (1-x)^(mu + k + j) or w-polynomial data
    double gw_norm_ = 1.0;
};

double correlation(const CovarianceModel& model, double r);

// Evaluates the GW defining integral by adaptive quadrature regardless of
// whether a closed form exists; used to cross-check the closed forms.
double gw_correlation_quadrature(double kappa, double mu, double x);

// n x n correlation matrix (times the model variance when scaled = true).
// Duplicate locations raise ValidationError.
Eigen::MatrixXd covariance_matrix(const CovarianceModel& model, const LocationSet& locs, bool scaled = false);

// Correlations between every location and the point p.
Eigen::VectorXd cross_correlation(const CovarianceModel& model, const LocationSet& locs, const double* p);

// Scale such that correlation(model, x) = 0.05.  Shape parameters are taken
// from the given model; its scale is ignored.
double practical_range_to_scale(const CovarianceModel& shape_model, double x);
constexpr double kPracticalRangeLevel = 0.05;

double fractal_dimension(const CovarianceModel& model);
std::optional<double> hurst_coefficient(const CovarianceModel& model);

struct SqExpLimitReport {
    std::vector<double> shapes;
    std::vector<double> deviations;  // sup over the r-grid, one per shape
    bool monotone = false;
};

// Rescaled GC (delta = 2), MT and GW correlations approach exp(-r^2/alpha)
// as their shape parameter grows: lambda, nu or kappa respectively.
SqExpLimitReport sqexp_limit_check(Family family, const std::vector<double>& shapes, double alpha,
                                   const std::vector<double>& r_grid);

}  // namespace gck
