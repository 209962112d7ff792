#pragma once

#include <cstdint>

namespace gck {

struct SpecFunResult {
    double value = 0.0;
    double est_abs_error = 0.0;
};

double ln_gamma(double x);
// 1/Gamma(x) for any real x; zero at the poles of Gamma.
double rgamma(double x);
double ln_beta(double a, double b);
double beta(double a, double b);
double pochhammer(double q, std::int64_t k);

// Modified Bessel function of the second kind, K_nu(x) for x > 0.
double bessel_k(double nu, double x);
// e^x K_nu(x); avoids underflow for large x.
double bessel_k_scaled(double nu, double x);
// ln K_nu(x); usable for orders in the thousands where K_nu overflows.
double log_bessel_k(double nu, double x);

// Bessel function of the first kind, nu >= -1/2, x >= 0.
double bessel_j(double nu, double x);

// 1F2(a; b, c; z).
double hyper_1f2(double a, double b, double c, double z);
SpecFunResult hyper_1f2_eval(double a, double b, double c, double z);
// Large-argument expansion of 1F2(a; b, c; -x^2/4), x > 0, optimally truncated;
// est_abs_error is the magnitude of the first omitted terms.
SpecFunResult hyper_1f2_large_argument(double a, double b, double c, double x);
// Switch point in x = 2 sqrt(-z) above which the expansion is tried first.
constexpr double kHyper1F2AsymptoticX = 20.0;

// Standard normal quantile (Wichura AS 241) and CDF.
double normal_quantile(double p);
double normal_cdf(double x);

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

}  // namespace gck
