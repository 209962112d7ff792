#pragma once

#include <functional>
#include <string>

#include "gck/covmodels.hpp"

namespace gck {

enum class SpectralMethod { ClosedForm, Series, OscillatoryQuadrature, TailExpansion };

std::string method_name(SpectralMethod m);

struct SpectralEvaluation {
    double z = 0.0;
    double density = 0.0;
    SpectralMethod method = SpectralMethod::ClosedForm;
    double est_rel_error = 0.0;
};

// Spectral densities use the isotropic transform
//   phi_hat(z) = (2 pi)^{-d/2} z^{1-d/2} int_0^inf u^{d/2} J_{d/2-1}(u z) phi(u) du.

SpectralEvaluation matern_spectral(double z, double nu, double alpha, double sigma2, int d);

// sigma2 L beta^d 1F2(lambda; lambda + mu/2, lambda + mu/2 + 1/2; -(z beta)^2/4),
// lambda = (d+1)/2 + kappa.
SpectralEvaluation gw_spectral(double z, double mu, double kappa, double beta, double sigma2, int d);
double gw_spectral_constant_L(double mu, double kappa, int d);
// Coefficient of z^{-(d+1+2 kappa)} in the large-z behaviour of gw_spectral.
double gw_tail_constant(double mu, double kappa, double beta, double sigma2, int d);

// rho = 2^delta sigma2 lambda Gamma((delta+d)/2) Gamma((delta+2)/2) sin(pi delta/2) / (delta gamma^delta pi^{d/2+1})
double gc_rho(double delta, double lambda, double gamma, double sigma2, int d);
// Leading term rho z^{-(d+delta)}.
double gc_spectral_tail(double z, double delta, double lambda, double gamma, double sigma2, int d);

// GC spectral density.  The density depends on z only through w = gamma z:
// phi_hat(z) = sigma2 gamma^d F(gamma z).  Below a crossover w_c the
// oscillatory-integral representation is integrated numerically; above it
// the large-z asymptotic series (optimally truncated) is used.  w_c is the
// smallest point of the geometric grid w_i = 1.25^i, i = 0..72, such that the
// leading tail term and the quadrature agree within 0.5% at w_c and at every
// grid point above it.
class GcSpectral {
public:
    GcSpectral(double delta, double lambda, double gamma, double sigma2, int d);

    SpectralEvaluation operator()(double z) const;
    SpectralEvaluation quadrature(double z) const;
    SpectralEvaluation tail_series(double z) const;

    double rho() const { return rho_; }
    double crossover_z() const { return wc_ / gamma_; }
    // Largest calibration-grid frequency strictly below the crossover.
    double largest_precrossover_z() const { return wprev_ / gamma_; }

private:
    double unit_quadrature(double w, double& rel_err) const;
    double unit_tail(double w, double& rel_err) const;

    double delta_, lambda_, gamma_, sigma2_;
    int d_;
    double rho_;
    double wc_ = 0.0, wprev_ = 0.0;
};

SpectralEvaluation gc_spectral(double z, double delta, double lambda, double gamma, double sigma2, int d);

// Numerical Hankel transform of a radial correlation function.  The range is
// split at the zeros of the Bessel kernel; compactly supported functions
// (support <= r_max) are integrated exactly up to r_max, otherwise the
// partial sums over half-periods are extrapolated with Wynn's epsilon
// algorithm.  Throws OracleInconclusive if the error estimate exceeds
// tol * |value|.
struct OracleResult {
    double value = 0.0;
    double abs_error = 0.0;
    int panels = 0;
};
OracleResult hankel_oracle(const std::function<double(double)>& phi, double z, int d, double r_max, double tol,
                           double support = 0.0);

struct EquivalenceIntegral {
    double integral_estimate = 0.0;
    double tail_exponent = 0.0;
    bool consistent_with_finiteness = false;
};

// int_c^{z_max} z^{d-1} ((rho1 - rho0)/rho0)^2 dz together with the log-log
// slope of the integrand over the last decade.  A slope below -1 is
// evidence (not proof) that the improper integral converges.
EquivalenceIntegral equivalence_integral(const std::function<double(double)>& rho0_hat,
                                         const std::function<double(double)>& rho1_hat, double c, int d,
                                         double z_max);

}  // namespace gck
