#include "gck/estimate.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "gck/errors.hpp"
#include "gck/linalg.hpp"
#include "gck/specfun.hpp"

namespace gck {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_data(const Eigen::VectorXd& z, const LocationSet& locs) {
    if (locs.size() == 0) throw ValidationError("empty location set");
    if (static_cast<std::size_t>(z.size()) != locs.size())
        throw ValidationError("data length " + std::to_string(z.size()) + " does not match " +
                              std::to_string(locs.size()) + " locations");
    if (!z.allFinite()) throw ValidationError("data contain non-finite values");
}

}  // namespace

ScaleFamily::ScaleFamily(const CovarianceModel& shape, const LocationSet& locs)
    : shape_(shape.with_scale(1.0).with_variance(1.0)), n_(locs.size()) {
    shape_.validate();
    if (n_ == 0) throw ValidationError("empty location set");
    if (shape_.dim != locs.dim()) throw ValidationError("model and location dimensions differ");
    dist_.resize(static_cast<Eigen::Index>(n_ * (n_ - 1) / 2));
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t i = j + 1; i < n_; ++i) {
            double r = locs.distance(i, j);
            if (r == 0.0) throw ValidationError("duplicate locations");
            dist_[k++] = r;
        }
    if (shape_.family == Family::GC) dist_ = dist_.pow(shape_.delta());
}

Eigen::MatrixXd ScaleFamily::correlation(double scale) const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be positive and finite");
    Eigen::ArrayXd v;
    if (shape_.family == Family::GC) {
        // (1 + r^d g^-d)^(-l/d)
        const double delta = shape_.delta();
        v = (-(shape_.lambda() / delta) * (dist_ * std::pow(scale, -delta)).log1p()).exp();
    } else {
        CorrelationKernel k(shape_.with_scale(scale));
        v.resize(dist_.size());
        for (Eigen::Index i = 0; i < dist_.size(); ++i) v[i] = k(dist_[i]);
    }
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd r(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        r(j, j) = 1.0;
        const Eigen::Index m = n - j - 1;
        r.col(j).tail(m) = v.segment(k, m).matrix();
        k += m;
    }
    r.triangularView<Eigen::StrictlyUpper>() = r.transpose();
    return r;
}

LikelihoodValue log_likelihood(const Eigen::VectorXd& z, const LocationSet& locs, double sigma2,
                               const CovarianceModel& model) {
    check_data(z, locs);
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("log_likelihood: sigma2 must be positive");
    model.validate();
    try {
        CholeskyFactor f(covariance_matrix(model, locs));
        const double n = static_cast<double>(z.size());
        double v = -0.5 * (n * (kLog2Pi + std::log(sigma2)) + f.log_det() + f.quad_form(z) / sigma2);
        return {v, true};
    } catch (const NotPositiveDefinite&) {
        return {kNegInf, false};
    }
}

ProfileLikelihood::ProfileLikelihood(Eigen::VectorXd z, const LocationSet& locs, const CovarianceModel& shape)
    : z_(std::move(z)), fam_(shape, locs) {
    check_data(z_, locs);
    zero_ = z_.isZero(0.0);
}

ProfilePoint ProfileLikelihood::evaluate(double scale) const {
    ProfilePoint p;
    p.scale = scale;
    try {
        CholeskyFactor f(fam_.correlation(scale));
        const double n = static_cast<double>(z_.size());
        p.sigma2 = f.quad_form(z_) / n;
        p.log_det = f.log_det();
        p.value = p.sigma2 > 0.0 ? -0.5 * (kLog2Pi + n * std::log(p.sigma2) + p.log_det + n) : kNegInf;
    } catch (const NotPositiveDefinite&) {
        p.factorized = false;
        p.value = kNegInf;
    }
    return p;
}

double profile_sigma2(const Eigen::VectorXd& z, const LocationSet& locs, double gamma, double delta, double lambda) {
    check_data(z, locs);
    auto m = CovarianceModel::gc(1.0, delta, lambda, gamma, locs.dim());
    return CholeskyFactor(covariance_matrix(m, locs)).quad_form(z) / static_cast<double>(z.size());
}

double profile_loglik(const Eigen::VectorXd& z, const LocationSet& locs, double gamma, double delta, double lambda) {
    check_data(z, locs);
    auto m = CovarianceModel::gc(1.0, delta, lambda, gamma, locs.dim());
    CholeskyFactor f(covariance_matrix(m, locs));
    const double n = static_cast<double>(z.size());
    return -0.5 * (kLog2Pi + n * std::log(f.quad_form(z) / n) + f.log_det() + n);
}

ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol, int prescan) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw ValidationError("search interval must satisfy 0 < lo < hi");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (prescan < 3) throw ValidationError("pre-scan needs at least 3 points");

    ScalarMax out;
    auto eval = [&](double x) {
        ++out.evaluations;
        double v = f(x);
        return std::isnan(v) ? kNegInf : v;
    };

    std::vector<double> g(prescan), fg(prescan);
    const double step = std::log(hi / lo) / (prescan - 1);
    int best = -1;
    for (int k = 0; k < prescan; ++k) {
        g[k] = k == 0 ? lo : k == prescan - 1 ? hi : lo * std::exp(step * k);
        fg[k] = eval(g[k]);
        if (fg[k] > kNegInf && (best < 0 || fg[k] > fg[best])) best = k;
    }
    if (best < 0) throw FitFailure("every likelihood evaluation failed on [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");

    const double a = g[std::max(best - 1, 0)], b = g[std::min(best + 1, prescan - 1)];
    // Brent stops within 2 (t |x| + t/4) of the optimum; pick t so that this is tol.
    const double t = tol / (2.0 * (b + 0.25));
    const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(t))), 8, std::numeric_limits<double>::digits);
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -eval(x); }, a, b, bits, max_iter);

    out.x = r.first;
    out.fx = -r.second;
    if (!(out.fx >= fg[best])) {
        out.x = g[best];
        out.fx = fg[best];
    }
    out.at_boundary = out.x - lo <= tol || hi - out.x <= tol;
    return out;
}

MLFit fit_scale(const ProfileLikelihood& pl, double lo, double hi, double tol) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw ValidationError("search interval must satisfy 0 < lo <= hi");
    if (tol <= 0.0) tol = 1e-8 * (hi - lo);
    MLFit fit;
    fit.search_lo = lo;
    fit.search_hi = hi;
    if (pl.zero_data()) {
        fit.degenerate = true;
        fit.gamma_hat = lo;
        fit.profile_loglik = kNegInf;
        return fit;
    }
    if (hi == lo) {
        ProfilePoint p = pl.evaluate(lo);
        if (!p.factorized) throw FitFailure("correlation matrix is not positive definite at the fixed scale");
        fit.gamma_hat = lo;
        fit.sigma2_hat = p.sigma2;
        fit.profile_loglik = p.value;
        fit.iterations = 1;
        fit.at_boundary = true;
        return fit;
    }
    ScalarMax m = maximize_scalar([&](double g) { return pl.evaluate(g).value; }, lo, hi, tol);
    ProfilePoint p = pl.evaluate(m.x);
    fit.gamma_hat = m.x;
    fit.sigma2_hat = p.sigma2;
    fit.profile_loglik = p.value;
    fit.iterations = m.evaluations + 1;
    fit.at_boundary = m.at_boundary;
    return fit;
}

MLFit fit_scale(const Eigen::VectorXd& z, const LocationSet& locs, double delta, double lambda, double lo, double hi,
                double tol) {
    return fit_scale(ProfileLikelihood(z, locs, CovarianceModel::gc(1.0, delta, lambda, 1.0, locs.dim())), lo, hi, tol);
}

double normalized_stat(double sigma2_hat, double x, double gamma0, double sigma0_2, double delta, std::size_t n) {
    const double ratio = sigma2_hat / sigma0_2 * std::pow(gamma0 / x, delta);
    return std::sqrt(static_cast<double>(n) / 2.0) * (ratio - 1.0);
}

double microergodic_value(double sigma2, double gamma, double delta, double lambda) {
    return sigma2 * lambda / std::pow(gamma, delta);
}

Interval microergodic_ci(const MLFit& fit, double delta, double lambda, std::size_t n, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    if (n == 0) throw ValidationError("sample size must be positive");
    if (fit.degenerate || !(fit.sigma2_hat > 0.0)) throw ValidationError("degenerate fit: no interval for zero data");
    Interval ci;
    ci.estimate = microergodic_value(fit.sigma2_hat, fit.gamma_hat, delta, lambda);
    const double h = normal_quantile(0.5 + 0.5 * level) * std::sqrt(2.0 / static_cast<double>(n));
    ci.lo = ci.estimate / (1.0 + h);
    ci.hi = h < 1.0 ? ci.estimate / (1.0 - h) : std::numeric_limits<double>::infinity();
    return ci;
}

}  // namespace gck
