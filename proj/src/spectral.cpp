#include "gck/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gck/errors.hpp"
#include "gck/quadrature.hpp"
#include "gck/specfun.hpp"

namespace gck {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_dim(int d) {
    if (d < 1 || d > 3) throw ValidationError("spectral density: dimension must be 1, 2 or 3");
}

}  // namespace

std::string method_name(SpectralMethod m) {
    switch (m) {
        case SpectralMethod::ClosedForm: return "closed_form";
        case SpectralMethod::Series: return "series";
        case SpectralMethod::OscillatoryQuadrature: return "oscillatory_quadrature";
        case SpectralMethod::TailExpansion: return "tail_expansion";
    }
    return "?";
}

// ---------------------------------------------------------------------------

SpectralEvaluation matern_spectral(double z, double nu, double alpha, double sigma2, int d) {
    check_dim(d);
    CovarianceModel::mt(sigma2, nu, alpha, d);
    if (!(z >= 0.0)) throw DomainError("matern_spectral: z must be non-negative");
    double lc = ln_gamma(nu + 0.5 * d) - 0.5 * d * std::log(kPi) - ln_gamma(nu) + d * std::log(alpha);
    double v = sigma2 * std::exp(lc - (nu + 0.5 * d) * std::log1p(alpha * alpha * z * z));
    return {z, v, SpectralMethod::ClosedForm, 4 * std::numeric_limits<double>::epsilon()};
}

// ---------------------------------------------------------------------------

double gw_spectral_constant_L(double mu, double kappa, int d) {
    check_dim(d);
    const double lam = 0.5 * (d + 1) + kappa;
    // Gamma(kappa)/Gamma(2 kappa) written as 2 Gamma(kappa+1)/Gamma(2 kappa+1), finite at kappa = 0
    double l = ln_gamma(2 * kappa + mu + 1) + ln_gamma(2 * kappa + d) + std::log(2.0) + ln_gamma(kappa + 1) -
               ln_gamma(2 * kappa + 1) - d * std::log(2.0) - 0.5 * d * std::log(kPi) - ln_gamma(kappa + 0.5 * d) -
               ln_gamma(mu + 2 * lam);
    return std::exp(l);
}

double gw_tail_constant(double mu, double kappa, double beta, double sigma2, int d) {
    check_dim(d);
    const double nu = kappa + 0.5;
    double l = ln_gamma(2 * kappa + mu + 1) - ln_gamma(mu) + ln_gamma(nu + 0.5 * d) - 0.5 * d * std::log(kPi) -
               ln_gamma(nu) - (2 * kappa + 1) * std::log(beta);
    return sigma2 * std::exp(l);
}

SpectralEvaluation gw_spectral(double z, double mu, double kappa, double beta, double sigma2, int d) {
    CovarianceModel::gw(sigma2, kappa, mu, beta, d);
    if (!(z >= 0.0)) throw DomainError("gw_spectral: z must be non-negative");
    const double lam = 0.5 * (d + 1) + kappa;
    const double a = lam, b = lam + 0.5 * mu, c = lam + 0.5 * mu + 0.5;
    const double pref = sigma2 * gw_spectral_constant_L(mu, kappa, d) * std::pow(beta, d);
    const double x = z * beta;
    if (x >= kHyper1F2AsymptoticX) {
        SpecFunResult r = hyper_1f2_large_argument(a, b, c, x);
        if (r.est_abs_error <= 1e-13 * std::fabs(r.value))
            return {z, pref * r.value, SpectralMethod::TailExpansion,
                    r.est_abs_error / std::fabs(r.value) + 1e-15};
    }
    SpecFunResult r = hyper_1f2_eval(a, b, c, -0.25 * x * x);
    return {z, pref * r.value, SpectralMethod::Series, r.est_abs_error / std::fabs(r.value)};
}

// ---------------------------------------------------------------------------

double gc_rho(double delta, double lambda, double gamma, double sigma2, int d) {
    check_dim(d);
    double l = delta * std::log(2.0) + std::log(sigma2 * lambda) + ln_gamma(0.5 * (delta + d)) +
               ln_gamma(0.5 * (delta + 2)) - std::log(delta) - delta * std::log(gamma) - (0.5 * d + 1) * std::log(kPi);
    return std::exp(l) * sin_pi(0.5 * delta);
}

double gc_spectral_tail(double z, double delta, double lambda, double gamma, double sigma2, int d) {
    if (!(z > 0.0)) throw DomainError("gc_spectral_tail: z must be positive");
    return gc_rho(delta, lambda, gamma, sigma2, d) * std::pow(z, -(d + delta));
}

GcSpectral::GcSpectral(double delta, double lambda, double gamma, double sigma2, int d)
    : delta_(delta), lambda_(lambda), gamma_(gamma), sigma2_(sigma2), d_(d) {
    CovarianceModel::gc(sigma2, delta, lambda, gamma, d);
    if (!(delta < 2.0)) throw ValidationError("GC spectral density: the integral representation needs delta < 2");
    rho_ = gc_rho(delta, lambda, gamma, sigma2, d);
    const double rho1 = gc_rho(delta, lambda, 1.0, 1.0, d);
    // Walk down the grid w_i = 1.25^i from the top; the crossover is the
    // smallest w_i above which every grid point agrees within 0.5%.
    const int top = 72;
    wc_ = std::numeric_limits<double>::infinity();
    wprev_ = std::pow(1.25, top);
    for (int i = top; i >= 0; --i) {
        double w = std::pow(1.25, i);
        double err;
        double q = unit_quadrature(w, err);
        double t = rho1 * std::pow(w, -(d + delta));
        if (std::fabs(q / t - 1.0) > 0.005) {
            wprev_ = w;
            break;
        }
        wc_ = w;
        wprev_ = w / 1.25;
    }
}

// F(w) = w^{-d} / (2^{d/2-1} pi^{d/2+1}) int_0^inf K_{(d-2)/2}(u) u^{d/2} rho^{-lambda/delta} sin(lambda theta/delta) du
// with rho e^{i theta} = 1 + e^{i pi delta/2} (u/w)^delta.
double GcSpectral::unit_quadrature(double w, double& rel_err) const {
    const double cd = std::cos(0.5 * kPi * delta_), sd = sin_pi(0.5 * delta_);
    const double ratio = lambda_ / delta_;
    const int d = d_;
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        double kern;
        if (d == 1) kern = std::sqrt(0.5 * kPi) * std::exp(-u);
        else if (d == 3) kern = std::sqrt(0.5 * kPi) * u * std::exp(-u);
        else kern = u * bessel_k(0.0, u);
        double p = std::pow(u / w, delta_);
        double A = 1.0 + p * cd, B = p * sd;
        double lr = 0.5 * std::log1p(p * (2.0 * cd + p));
        double th = std::atan2(B, A);
        return kern * std::exp(-ratio * lr) * std::sin(ratio * th);
    };
    const double umax = 50.0;
    std::vector<double> br = {0.0, 1.0, 3.0, 10.0, 25.0, umax};
    if (d == 2) br.push_back(1e-6);
    for (double f : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
        double b = f * w;
        if (b > 0.0 && b < umax) br.push_back(b);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        QuadResult r = integrate(integrand, br[i], br[i + 1], 1e-300, 1e-12, 400);
        total += r.value;
        err += r.abs_error;
    }
    double pref = std::pow(w, -d) / (std::pow(2.0, 0.5 * d - 1.0) * std::pow(kPi, 0.5 * d + 1.0));
    rel_err = total != 0.0 ? err / std::fabs(total) : std::numeric_limits<double>::infinity();
    if (!(rel_err <= 1e-6))
        throw EvaluationError("GC spectral quadrature did not reach its target", pref * total, pref * err);
    return pref * total;
}

// Asymptotic series: expanding Im (1 + e^{i pi delta/2} s^delta)^{-lambda/delta}
// in powers of s = u/w and integrating term by term with
// int_0^inf K_{(d-2)/2}(u) u^{d/2 + k delta} du = 2^{d/2+k delta-1} Gamma(1 + k delta/2) Gamma((d + k delta)/2).
double GcSpectral::unit_tail(double w, double& rel_err) const {
    const double a = lambda_ / delta_;
    const double lw = std::log(w);
    const int kmax = 200;
    std::vector<double> mag(kmax + 1, 0.0), sgn(kmax + 1, 0.0);
    double lpoch = 0.0, lfact = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        lpoch += std::log(a + k - 1);
        lfact += std::log(static_cast<double>(k));
        double kd = k * delta_;
        double lm = lpoch - lfact + (0.5 * d_ + kd - 1.0) * std::log(2.0) + ln_gamma(1.0 + 0.5 * kd) +
                    ln_gamma(0.5 * (d_ + kd)) - kd * lw;
        mag[k] = std::exp(lm);
        sgn[k] = ((k % 2) ? 1.0 : -1.0) * sin_pi(0.5 * kd);
    }
    int m = 1;
    for (int k = 2; k <= kmax; ++k)
        if (mag[k] < mag[m]) m = k;
    double s = 0.0;
    for (int k = 1; k < m; ++k) s += sgn[k] * mag[k];
    double pref = std::pow(w, -d_) / (std::pow(2.0, 0.5 * d_ - 1.0) * std::pow(kPi, 0.5 * d_ + 1.0));
    rel_err = s != 0.0 ? mag[m] / std::fabs(s) : std::numeric_limits<double>::infinity();
    return pref * s;
}

SpectralEvaluation GcSpectral::quadrature(double z) const {
    if (!(z > 0.0)) throw DomainError("gc_spectral: z must be positive");
    double err;
    double f = unit_quadrature(gamma_ * z, err);
    return {z, sigma2_ * std::pow(gamma_, d_) * f, SpectralMethod::OscillatoryQuadrature, err};
}

SpectralEvaluation GcSpectral::tail_series(double z) const {
    if (!(z > 0.0)) throw DomainError("gc_spectral: z must be positive");
    double err;
    double f = unit_tail(gamma_ * z, err);
    return {z, sigma2_ * std::pow(gamma_, d_) * f, SpectralMethod::TailExpansion, err};
}

SpectralEvaluation GcSpectral::operator()(double z) const {
    if (!(z > 0.0)) throw DomainError("gc_spectral: z must be positive");
    if (gamma_ * z >= wc_) {
        SpectralEvaluation t = tail_series(z);
        if (t.est_rel_error <= 1e-8 && t.density > 0.0) return t;
    }
    return quadrature(z);
}

SpectralEvaluation gc_spectral(double z, double delta, double lambda, double gamma, double sigma2, int d) {
    return GcSpectral(delta, lambda, gamma, sigma2, d)(z);
}

// ---------------------------------------------------------------------------

namespace {

// k-th positive zero (k >= 1) of J_{d/2-1}; McMahon's expansion for J_0.
double kernel_zero(int d, int k) {
    if (d == 1) return (k - 0.5) * kPi;
    if (d == 3) return k * kPi;
    double b = (k - 0.25) * kPi;
    return b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b * b * b);
}

}  // namespace

OracleResult hankel_oracle(const std::function<double(double)>& phi, double z, int d, double r_max, double tol,
                           double support) {
    check_dim(d);
    if (!(z > 0.0)) throw DomainError("hankel_oracle: z must be positive");
    if (!(tol > 0.0)) throw DomainError("hankel_oracle: tolerance must be positive");
    const double nu = 0.5 * d - 1.0;
    const double pref = std::pow(2.0 * kPi, -0.5 * d) * std::pow(z, 1.0 - 0.5 * d);
    auto f = [&](double u) { return std::pow(u, 0.5 * d) * bessel_j(nu, u * z) * phi(u); };
    const double end = support > 0.0 ? std::min(support, r_max) : r_max;

    std::vector<double> partial;
    double sum = 0.0, qerr = 0.0, lo = 0.0;
    const int max_panels = 20000;
    double prev_est = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    for (int k = 1; k <= max_panels; ++k) {
        double hi = kernel_zero(d, k) / z;
        bool last = hi >= end;
        if (last) hi = end;
        const bool compact = support > 0.0 && support <= r_max;
        double atol = partial.empty() || compact ? 1e-300 : 1e-3 * tol * std::fabs(sum);
        QuadResult r = integrate(f, lo, hi, atol, compact ? 1e-13 : 1e-12, 400);
        sum += r.value;
        qerr += r.abs_error;
        partial.push_back(sum);
        lo = hi;
        if (last) {
            if (compact) {
                double err = qerr * pref;
                if (err > tol * std::fabs(sum * pref))
                    throw OracleInconclusive("hankel_oracle: quadrature error above tolerance", sum * pref, err);
                return {sum * pref, err, k};
            }
            // truncated at r_max: accept if the final panel is already negligible
            double last_panel = partial.size() > 1 ? std::fabs(partial.back() - partial[partial.size() - 2]) : INFINITY;
            if (last_panel <= 1e-3 * tol * std::fabs(sum)) return {sum * pref, (qerr + last_panel) * pref, k};
            break;
        }
        if (partial.size() < 12 || compact) continue;
        std::size_t take = std::min<std::size_t>(partial.size(), 40);
        std::vector<double> tailseq(partial.end() - static_cast<std::ptrdiff_t>(take), partial.end());
        double werr;
        double est = wynn_epsilon(tailseq, werr);
        double direct = std::fabs(partial.back() - partial[partial.size() - 2]);
        if (direct <= 1e-3 * tol * std::fabs(sum)) {
            est = sum;
            werr = direct;
        }
        double change = std::isnan(prev_est) ? std::numeric_limits<double>::infinity() : std::fabs(est - prev_est);
        prev_est = est;
        double e = std::max(werr, change);
        if (e <= 0.05 * tol * std::fabs(est)) {
            if (++stable >= 3) return {est * pref, (e + qerr) * pref, k};
        } else {
            stable = 0;
        }
    }
    double est = partial.empty() ? 0.0 : partial.back();
    throw OracleInconclusive("hankel_oracle: no converged estimate within r_max", est * pref,
                             std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------

EquivalenceIntegral equivalence_integral(const std::function<double(double)>& rho0_hat,
                                         const std::function<double(double)>& rho1_hat, double c, int d,
                                         double z_max) {
    check_dim(d);
    if (!(c > 0.0) || !(z_max > 10.0 * c)) throw DomainError("equivalence_integral: need 0 < c and z_max > 10 c");
    auto g = [&](double z) {
        double r0 = rho0_hat(z), r1 = rho1_hat(z);
        if (!(r0 > 0.0) || !(r1 > 0.0)) throw DomainError("equivalence_integral: non-positive spectral density");
        double q = (r1 - r0) / r0;
        return std::pow(z, d - 1) * q * q;
    };
    // integrate in t = ln z on panels of width ln(10)/10
    auto gt = [&](double t) {
        double z = std::exp(t);
        return g(z) * z;
    };
    const double t0 = std::log(c), t1 = std::log(z_max);
    const double width = std::log(10.0) / 10.0;
    int npan = std::max(10, static_cast<int>(std::ceil((t1 - t0) / width)));
    double h = (t1 - t0) / npan;
    EquivalenceIntegral out;
    std::vector<double> pan(npan);
    for (int i = 0; i < npan; ++i) {
        pan[i] = gauss_kronrod21(gt, t0 + i * h, t0 + (i + 1) * h).value;
        out.integral_estimate += pan[i];
    }
    // last decade: panel integrals J_i ~ z_i^{p+1}; least-squares slope gives p + 1
    int nlast = std::min(npan, static_cast<int>(std::ceil(std::log(10.0) / h)));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    bool all_zero = true;
    for (int i = npan - nlast; i < npan; ++i) {
        if (pan[i] > 0.0) {
            all_zero = false;
            double x = t0 + (i + 0.5) * h, y = std::log(pan[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++used;
        }
    }
    if (all_zero || used < 2) {
        out.tail_exponent = -std::numeric_limits<double>::infinity();
        out.consistent_with_finiteness = true;
        return out;
    }
    double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    out.tail_exponent = slope - 1.0;
    out.consistent_with_finiteness = out.tail_exponent < -1.0;
    return out;
}

}  // namespace gck
