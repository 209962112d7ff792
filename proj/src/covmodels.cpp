#include "gck/covmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gck/errors.hpp"
#include "gck/quadrature.hpp"
#include "gck/specfun.hpp"

namespace gck {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::GC: return "GC";
        case Family::MT: return "MT";
        case Family::GW: return "GW";
        case Family::SqExp: return "SqExp";
    }
    return "?";
}

CovarianceModel CovarianceModel::gc(double sigma2, double delta, double lambda, double gamma, int d) {
    CovarianceModel m{Family::GC, sigma2, gamma, delta, lambda, d, true};
    m.validate();
    return m;
}

CovarianceModel CovarianceModel::mt(double sigma2, double nu, double alpha, int d) {
    CovarianceModel m{Family::MT, sigma2, alpha, nu, 0.0, d, true};
    m.validate();
    return m;
}

CovarianceModel CovarianceModel::gw(double sigma2, double kappa, double mu, double beta, int d) {
    CovarianceModel m{Family::GW, sigma2, beta, kappa, mu, d, true};
    m.validate();
    return m;
}

CovarianceModel CovarianceModel::sqexp(double sigma2, double alpha, int d) {
    CovarianceModel m{Family::SqExp, sigma2, alpha, 0.0, 0.0, d, true};
    m.validate();
    return m;
}

CovarianceModel CovarianceModel::unchecked(Family f, double sigma2, double scale, double shape1, double shape2,
                                           int d) {
    return CovarianceModel{f, sigma2, scale, shape1, shape2, d, false};
}

CovarianceModel CovarianceModel::with_scale(double s) const {
    CovarianceModel m = *this;
    m.scale = s;
    if (m.checked) m.validate();
    return m;
}

CovarianceModel CovarianceModel::with_variance(double v) const {
    CovarianceModel m = *this;
    m.variance = v;
    if (m.checked) m.validate();
    return m;
}

void CovarianceModel::validate() const {
    auto fail = [&](const std::string& why) { throw ValidationError(family_name(family) + " model: " + why); };
    if (dim < 1 || dim > 3) fail("dimension must be 1, 2 or 3");
    if (!(variance > 0.0) || !std::isfinite(variance)) fail("variance must be positive, got " + num(variance));
    if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale must be positive, got " + num(scale));
    switch (family) {
        case Family::GC:
            if (!(shape1 > 0.0 && shape1 <= 2.0)) fail("delta must lie in (0, 2], got " + num(shape1));
            if (!(shape2 > 0.0) || !std::isfinite(shape2)) fail("lambda must be positive, got " + num(shape2));
            break;
        case Family::MT:
            if (!(shape1 > 0.0) || !std::isfinite(shape1)) fail("nu must be positive, got " + num(shape1));
            break;
        case Family::GW:
            if (!(shape1 >= 0.0) || !std::isfinite(shape1)) fail("kappa must be non-negative, got " + num(shape1));
            if (!(shape2 >= (dim + 1) / 2.0 + shape1) || !std::isfinite(shape2))
                fail("mu must be >= (d+1)/2 + kappa = " + num((dim + 1) / 2.0 + shape1) + ", got " + num(shape2));
            break;
        case Family::SqExp: break;
    }
}

bool CovarianceModel::is_valid() const noexcept {
    try {
        validate();
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

std::string CovarianceModel::describe() const {
    std::ostringstream os;
    os.precision(10);
    switch (family) {
        case Family::GC:
            os << "GC(sigma2=" << variance << ", delta=" << shape1 << ", lambda=" << shape2 << ", gamma=" << scale;
            break;
        case Family::MT: os << "MT(sigma2=" << variance << ", nu=" << shape1 << ", alpha=" << scale; break;
        case Family::GW:
            os << "GW(sigma2=" << variance << ", kappa=" << shape1 << ", mu=" << shape2 << ", beta=" << scale;
            break;
        case Family::SqExp: os << "SqExp(sigma2=" << variance << ", alpha=" << scale; break;
    }
    os << ", d=" << dim << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

LocationSet::LocationSet(int d, std::vector<double> coords) : d_(d), coords_(std::move(coords)) {
    if (d < 1 || d > 3) throw ValidationError("location set: dimension must be 1, 2 or 3");
    if (coords_.empty() || coords_.size() % static_cast<std::size_t>(d) != 0)
        throw ValidationError("location set: coordinate count must be a positive multiple of d");
    for (double c : coords_)
        if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("location set: coordinates must lie in [0, 1]");
}

LocationSet LocationSet::subset(const std::vector<std::size_t>& idx) const {
    std::vector<double> c;
    c.reserve(idx.size() * static_cast<std::size_t>(d_));
    for (std::size_t i : idx) {
        if (i >= size()) throw ValidationError("location subset index out of range");
        c.insert(c.end(), point(i), point(i) + d_);
    }
    return LocationSet(d_, std::move(c));
}

double euclidean(const double* a, const double* b, int d) {
    if (d == 1) return std::fabs(a[0] - b[0]);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        double t = a[k] - b[k];
        s += t * t;
    }
    return std::sqrt(s);
}

double LocationSet::distance(std::size_t i, std::size_t j) const { return euclidean(point(i), point(j), d_); }

double LocationSet::distance_to(std::size_t i, const double* p) const { return euclidean(point(i), p, d_); }

// ---------------------------------------------------------------------------
// GW correlation, unit support: phi(x) = B(2k, mu+1)^{-1} int_x^1 u (u^2-x^2)^{k-1} (1-u)^mu du.
//
// Integer kappa = k: the integral is the k-fold Wendland operator
// I f(x) = int_x^1 u f(u) du applied to (1-u)^mu (up to a constant that the
// normalization removes).  In the basis (1-x)^s,
// I[(1-u)^s] = (1-x)^{s+1}/(s+1) - (1-x)^{s+2}/(s+2).
//
// Half-integer kappa = k + 1/2 with integer mu = l: with w = sqrt(u^2 - x^2)
// the integral becomes int_0^s w^{2k} (1 - sqrt(w^2+x^2))^l dw, s = sqrt(1-x^2).
// Even powers of sqrt(w^2+x^2) give polynomials; odd powers reduce to
// A_j = int_0^s w^{2j} sqrt(w^2+x^2) dw, which satisfy
// A_0 = (s + x^2 ln((1+s)/x))/2 and A_j = (s^{2j-1} - (2j-1) x^2 A_{j-1}) / (2j+2).

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Integer-kappa coefficients: value(x) = sum_j c[j] (1-x)^{mu + k + j}.
std::vector<double> wendland_integer_coefficients(int k, double mu) {
    std::vector<double> c = {1.0};  // (1-x)^mu
    double base = mu;
    for (int step = 0; step < k; ++step) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            double s = base + static_cast<double>(j);
            next[j] += c[j] / (s + 1.0);
            next[j + 1] -= c[j] / (s + 2.0);
        }
        c = std::move(next);
        base += 1.0;
    }
    return c;
}

double eval_integer(const std::vector<double>& c, double mu_plus_k, double x) {
    double t = 1.0 - x;
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * t + c[j];
    return acc * std::pow(t, mu_plus_k);
}

double eval_half_integer(int k, int l, double x) {
    const double x2 = x * x;
    const double s2 = 1.0 - x2;
    const double s = std::sqrt(std::max(s2, 0.0));
    // int_0^s w^{2p} dw
    auto pw = [&](int p) { return std::pow(s, 2 * p + 1) / (2 * p + 1); };
    int jmax = k + l;
    std::vector<double> A(static_cast<std::size_t>(jmax) + 1, 0.0);
    if (x == 0.0) {
        for (int j = 0; j <= jmax; ++j) A[j] = 1.0 / (2 * j + 2);
    } else {
        A[0] = 0.5 * (s + x2 * std::log((1.0 + s) / x));
        for (int j = 1; j <= jmax; ++j) A[j] = (std::pow(s, 2 * j - 1) - (2 * j - 1) * x2 * A[j - 1]) / (2 * j + 2);
    }
    double total = 0.0;
    for (int m = 0; m <= l; ++m) {
        double cm = binom(l, m) * ((m % 2) ? -1.0 : 1.0);
        int j = m / 2;
        // (w^2 + x^2)^j = sum_i C(j,i) w^{2i} x^{2(j-i)}
        double part = 0.0;
        for (int i = 0; i <= j; ++i) {
            double coef = binom(j, i) * std::pow(x2, j - i);
            part += coef * ((m % 2) ? A[k + i] : pw(k + i));
        }
        total += cm * part;
    }
    return total;
}

double gw_integral_quadrature(double kappa, double mu, double x) {
    const double s2 = 1.0 - x * x;
    if (s2 <= 0.0) return 0.0;
    const double s = std::sqrt(s2);
    const double x2 = x * x;
    const double scale = std::exp(ln_beta(2.0 * kappa, mu + 1.0));
    QuadResult r;
    if (kappa < 1.0) {
        const double inv = 1.0 / kappa;
        auto f = [&](double t) {
            double w2 = std::pow(t, inv);
            double v = 1.0 - std::sqrt(w2 + x2);
            return v > 0.0 ? std::pow(v, mu) : 0.0;
        };
        double upper = std::pow(s, 2.0 * kappa);
        r = integrate(f, 0.0, upper, 1e-15 * scale * 2.0 * kappa, 1e-13, 2000);
        r.value /= 2.0 * kappa;
        r.abs_error /= 2.0 * kappa;
    } else {
        auto f = [&](double w) {
            double v = 1.0 - std::sqrt(w * w + x2);
            return v > 0.0 ? std::pow(w, 2.0 * kappa - 1.0) * std::pow(v, mu) : 0.0;
        };
        r = integrate(f, 0.0, s, 1e-15 * scale, 1e-13, 2000);
    }
    if (!r.converged && r.abs_error > 1e-11 * scale)
        throw EvaluationError("GW correlation quadrature did not converge", r.value / scale, r.abs_error / scale);
    return r.value / scale;
}

}  // namespace

double gw_correlation_quadrature(double kappa, double mu, double x) {
    if (!(kappa > 0.0)) throw DomainError("gw_correlation_quadrature: kappa must be positive");
    if (x >= 1.0) return 0.0;
    if (x <= 0.0) return 1.0;
    return gw_integral_quadrature(kappa, mu, x);
}

CorrelationKernel::CorrelationKernel(const CovarianceModel& m) : m_(m) {
    if (m_.checked) m_.validate();
    switch (m_.family) {
        case Family::GC: gc_ratio_ = m_.shape2 / m_.shape1; break;
        case Family::MT: mt_log_norm_ = (1.0 - m_.shape1) * std::log(2.0) - ln_gamma(m_.shape1); break;
        case Family::GW: {
            const double kappa = m_.shape1, mu = m_.shape2;
            if (kappa == 0.0) {
                gw_method_ = GwMethod::Power;
            } else if (is_integer(kappa) && kappa <= 6.0) {
                gw_method_ = GwMethod::Integer;
                gw_coef_ = wendland_integer_coefficients(static_cast<int>(kappa), mu);
                gw_norm_ = eval_integer(gw_coef_, mu + kappa, 0.0);
            } else if (is_integer(kappa - 0.5) && kappa <= 6.5 && is_integer(mu) && mu <= 12.0) {
                gw_method_ = GwMethod::HalfInteger;
                gw_norm_ = eval_half_integer(static_cast<int>(kappa - 0.5), static_cast<int>(mu), 0.0);
            } else {
                gw_method_ = GwMethod::Quadrature;
            }
            break;
        }
        case Family::SqExp: break;
    }
}

double CorrelationKernel::gw_unit(double x) const {
    if (x >= 1.0) return 0.0;
    if (x <= 0.0) return 1.0;
    const double kappa = m_.shape1, mu = m_.shape2;
    switch (gw_method_) {
        case GwMethod::Power: return std::pow(1.0 - x, mu);
        case GwMethod::Integer: return eval_integer(gw_coef_, mu + kappa, x) / gw_norm_;
        case GwMethod::HalfInteger:
            return std::max(0.0, eval_half_integer(static_cast<int>(kappa - 0.5), static_cast<int>(mu), x) / gw_norm_);
        case GwMethod::Quadrature: return gw_integral_quadrature(kappa, mu, x);
    }
    return 0.0;
}

double CorrelationKernel::operator()(double r) const {
    if (!(r >= 0.0)) throw DomainError("correlation: distance must be non-negative");
    if (r == 0.0) return 1.0;
    const double t = r / m_.scale;
    switch (m_.family) {
        case Family::GC: {
            // (1 + t^delta)^(-lambda/delta), evaluated as exp(-(lambda/delta) log1p(t^delta))
            return std::exp(-gc_ratio_ * std::log1p(std::pow(t, m_.shape1)));
        }
        case Family::MT: {
            const double nu = m_.shape1;
            if (nu == 0.5) return std::exp(-t);
            if (nu == 1.5) return std::exp(-t) * (1.0 + t);
            if (nu == 2.5) return std::exp(-t) * (1.0 + t + t * t / 3.0);
            if (t > 700.0 + 10.0 * nu) return 0.0;
            double lv = mt_log_norm_ + nu * std::log(t) + log_bessel_k(nu, t);
            return std::min(1.0, std::exp(lv));
        }
        case Family::GW: return gw_unit(t);
        case Family::SqExp: return std::exp(-r * r / m_.scale);
    }
    return 0.0;
}

double correlation(const CovarianceModel& model, double r) { return CorrelationKernel(model)(r); }

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model, const LocationSet& locs, bool scaled) {
    CorrelationKernel k(model);
    const std::size_t n = locs.size();
    if (n == 0) throw ValidationError("covariance_matrix: empty location set");
    if (model.dim != locs.dim()) throw ValidationError("covariance_matrix: model and location dimensions differ");
    Eigen::MatrixXd R(n, n);
    const double s = scaled ? model.variance : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        R(j, j) = s;
        for (std::size_t i = j + 1; i < n; ++i) {
            double r = locs.distance(i, j);
            if (r == 0.0) throw ValidationError("covariance_matrix: duplicate locations");
            R(i, j) = s * k(r);
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) R(j, i) = R(i, j);
    return R;
}

Eigen::VectorXd cross_correlation(const CovarianceModel& model, const LocationSet& locs, const double* p) {
    CorrelationKernel k(model);
    Eigen::VectorXd c(locs.size());
    for (std::size_t i = 0; i < locs.size(); ++i) c(i) = k(locs.distance_to(i, p));
    return c;
}

// ---------------------------------------------------------------------------

double practical_range_to_scale(const CovarianceModel& shape_model, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("practical range must be positive");
    const double level = kPracticalRangeLevel;
    const double delta = shape_model.shape1, lambda = shape_model.shape2;
    switch (shape_model.family) {
        case Family::GC: {
            CovarianceModel::gc(1.0, delta, lambda, 1.0, shape_model.dim);
            // (1 + (x/gamma)^delta)^(-lambda/delta) = level
            double base = std::expm1(-(delta / lambda) * std::log(level));
            return x / std::pow(base, 1.0 / delta);
        }
        case Family::SqExp: return x * x / std::log(1.0 / level);
        default: break;
    }
    CovarianceModel m = shape_model;
    m.variance = 1.0;
    m.scale = x;
    if (m.checked) m.validate();
    auto g = [&](double s) { return correlation(m.with_scale(s), x) - level; };
    // correlation at fixed distance increases with the scale
    double lo = x, hi = x;
    double glo = g(lo), ghi = glo;
    int grow = 0;
    while (glo > 0.0 && grow < 200) {
        hi = lo;
        ghi = glo;
        lo *= 0.5;
        glo = g(lo);
        ++grow;
    }
    while (ghi < 0.0 && grow < 200) {
        lo = hi;
        glo = ghi;
        hi *= 2.0;
        ghi = g(hi);
        ++grow;
    }
    if (!(glo <= 0.0 && ghi >= 0.0)) throw CalibrationError("practical_range_to_scale: root not bracketed");
    for (int it = 0; it < 300; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (std::fabs(gm) <= 1e-12 || hi - lo <= 1e-15 * hi) return mid;
        if (gm < 0.0) lo = mid;
        else hi = mid;
    }
    double mid = 0.5 * (lo + hi);
    if (std::fabs(g(mid)) > 1e-10) throw CalibrationError("practical_range_to_scale: bisection did not converge");
    return mid;
}

double fractal_dimension(const CovarianceModel& m) {
    m.validate();
    const double d = m.dim;
    switch (m.family) {
        case Family::GC: return m.shape1 < 2.0 ? d + 1.0 - m.shape1 / 2.0 : d;
        case Family::MT: return m.shape1 < 1.0 ? d + 1.0 - m.shape1 : d;
        case Family::GW: return m.shape1 < 0.5 ? d + 0.5 - m.shape1 : d;
        case Family::SqExp: return d;
    }
    return d;
}

std::optional<double> hurst_coefficient(const CovarianceModel& m) {
    m.validate();
    if (m.family == Family::GC && m.shape2 <= m.dim) return m.shape2 / 2.0;
    return std::nullopt;
}

SqExpLimitReport sqexp_limit_check(Family family, const std::vector<double>& shapes, double alpha,
                                   const std::vector<double>& r_grid) {
    if (!(alpha > 0.0)) throw ValidationError("sqexp_limit_check: alpha must be positive");
    SqExpLimitReport rep;
    rep.shapes = shapes;
    for (double s : shapes) {
        double dev = 0.0;
        for (double r : r_grid) {
            double target = std::exp(-r * r / alpha);
            double v = 0.0;
            if (std::isinf(s)) {
                v = target;
            } else if (family == Family::GC) {
                v = correlation(CovarianceModel::gc(1.0, 2.0, s, std::sqrt(s * alpha / 2.0)), r);
            } else if (family == Family::MT) {
                v = correlation(CovarianceModel::mt(1.0, s, std::sqrt(alpha) / (2.0 * std::sqrt(s))), r);
            } else if (family == Family::GW) {
                // mu at its lower bound (d+1)/2 + kappa with d = 1
                double mu = 1.0 + s;
                double g = std::sqrt(alpha) * (mu + 2.0 * s + 1.0) * std::exp(ln_gamma(s + 0.5) - ln_gamma(s + 1.0)) / 2.0;
                double x = r / g;
                v = x >= 1.0 ? 0.0 : (x <= 0.0 ? 1.0 : gw_correlation_quadrature(s, mu, x));
            } else {
                throw ValidationError("sqexp_limit_check: family must be GC, MT or GW");
            }
            dev = std::max(dev, std::fabs(v - target));
        }
        rep.deviations.push_back(dev);
    }
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.deviations.size(); ++i)
        if (!(rep.deviations[i] < rep.deviations[i - 1]) && rep.deviations[i] != 0.0) rep.monotone = false;
    return rep;
}

}  // namespace gck
