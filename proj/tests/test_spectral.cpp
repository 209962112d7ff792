#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gck/covmodels.hpp"
#include "gck/errors.hpp"
#include "gck/specfun.hpp"
#include "gck/spectral.hpp"

using namespace gck;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("Matern closed form") {
    CHECK(matern_spectral(1.0, 0.5, 1.0, 1.0, 1).density == doctest::Approx(0.5 / kPi).epsilon(1e-15));
    double z0 = std::exp(ln_gamma(1.7 + 1.0) - ln_gamma(1.7)) * 2.0 * 0.04 / kPi;
    CHECK(matern_spectral(0.0, 1.7, 0.2, 2.0, 2).density == doctest::Approx(z0).epsilon(1e-14));
    double z = 1e5, nu = 1.3, a = 0.4;
    double lead = std::pow(a, -2 * nu) * std::exp(ln_gamma(nu + 0.5) - ln_gamma(nu)) / std::sqrt(kPi);
    CHECK(rel(matern_spectral(z, nu, a, 1.0, 1).density * std::pow(z, 2 * nu + 1), lead) < 1e-8);
}

TEST_CASE("Matern and GW agree with the Hankel oracle") {
    for (int d = 1; d <= 3; ++d) {
        for (double nu : {0.5, 1.3, 2.5}) {
            auto m = CovarianceModel::mt(1.0, nu, 0.15, d);
            CorrelationKernel k(m);
            for (int i = 0; i < 10; ++i) {
                double z = 0.3 * std::pow(1.8, i);
                auto o = hankel_oracle([&](double r) { return k(r); }, z, d, 60.0, 1e-9);
                CHECK_MESSAGE(rel(matern_spectral(z, nu, 0.15, 1.0, d).density, o.value) < 1e-5,
                              m.describe() << " z=" << z);
            }
        }
        struct G {
            double kappa, mu;
        };
        for (G g : {G{0.0, 2.0 + d}, G{0.1, 2.1 + d}, G{1.0, 3.0 + d}, G{0.5, 3.0 + d}}) {
            auto m = CovarianceModel::gw(1.3, g.kappa, g.mu, 0.6, d);
            CorrelationKernel k(m);
            for (int i = 0; i < 10; ++i) {
                double z = 0.5 * std::pow(2.0, i);  // crosses the large-argument switch at z beta = 20
                INFO(m.describe() << " z=" << z);
                auto o = hankel_oracle([&](double r) { return k(r); }, z, d, 0.6, 1e-7, 0.6);
                CHECK_MESSAGE(rel(gw_spectral(z, g.mu, g.kappa, 0.6, 1.3, d).density, 1.3 * o.value) < 1e-5,
                              m.describe() << " z=" << z);
            }
        }
    }
}

TEST_CASE("GW constants") {
    CHECK(gw_spectral_constant_L(2.0, 0.0, 1) == doctest::Approx(1.0 / (3 * kPi)).epsilon(1e-14));
    CHECK(gw_spectral(0.0, 2.0, 0.0, 1.0, 1.0, 1).density == doctest::Approx(1.0 / (3 * kPi)).epsilon(1e-14));
    CHECK(gw_tail_constant(2.0, 0.0, 1.0, 1.0, 1) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
    // z^{d+1+2k} phi_hat stays between positive bounds on [50, 500] and its mean tends to the constant
    for (int d = 1; d <= 3; ++d) {
        double kappa = 0.1, mu = 2.1 + d, beta = 1.0;
        double c3 = gw_tail_constant(mu, kappa, beta, 1.0, d);
        double lo = INFINITY, hi = 0.0;
        for (double z = 50; z <= 500; z += 0.7) {
            double v = gw_spectral(z, mu, kappa, beta, 1.0, d).density * std::pow(z, d + 1 + 2 * kappa);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo > 0.2 * c3);
        CHECK(hi < 5.0 * c3);
    }
}

TEST_CASE("GC rho constant and tail") {
    CHECK(gc_rho(1.0, 1.0, 1.0, 1.0, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(gc_spectral_tail(4.0, 1.0, 1.0, 1.0, 1.0, 1) == doctest::Approx(1.0 / (16 * kPi)).epsilon(1e-14));
    CHECK(gc_rho(1.999999, 1.0, 1.0, 1.0, 2) < 1e-5);
    double r = gc_rho(0.8, 2.0, 0.5, 1.5, 2);
    CHECK(gc_rho(0.8, 4.0, 0.5, 1.5, 2) == doctest::Approx(2 * r).epsilon(1e-14));
    CHECK(gc_rho(0.8, 2.0, 0.5, 3.0, 2) == doctest::Approx(2 * r).epsilon(1e-14));
    CHECK(gc_rho(0.8, 2.0, 1.0, 1.5, 2) == doctest::Approx(r * std::pow(0.5, 0.8)).epsilon(1e-14));
}

TEST_CASE("GC Cauchy case against the oracle") {
    GcSpectral s(1.0, 1.0, 1.0, 1.0, 1);
    auto phi = [](double r) { return 1.0 / (1.0 + r); };
    for (double z : {0.5, 1.0, 5.0, 20.0, 100.0}) {
        auto o = hankel_oracle(phi, z, 1, 1e8, 1e-8);
        CHECK_MESSAGE(rel(s(z).density, o.value) < 1e-4, "z=" << z);
        CHECK(rel(s.quadrature(z).density, o.value) < 1e-8);
    }
    CHECK(rel(s(5.0).density, hankel_oracle(phi, 5.0, 1, 1e8, 1e-8).value) < 1e-4);
}

TEST_CASE("GC quadrature matches the oracle for d = 2, 3") {
    for (int d = 2; d <= 3; ++d) {
        for (double delta : {0.6, 1.0, 1.5}) {
            double lambda = d + 0.5, gamma = 0.2;
            GcSpectral s(delta, lambda, gamma, 1.0, d);
            CorrelationKernel k(CovarianceModel::gc(1.0, delta, lambda, gamma, d));
            for (double z : {1.0, 10.0, 60.0}) {
                auto o = hankel_oracle([&](double r) { return k(r); }, z, d, 1e8, 1e-7);
                CHECK_MESSAGE(rel(s(z).density, o.value) < 1e-5, "d=" << d << " delta=" << delta << " z=" << z);
            }
        }
    }
}

TEST_CASE("GC tail series and crossover") {
    for (double delta : {0.75, 1.0, 1.2}) {
        for (double lambda : {1.5, 5.0}) {
            double g = practical_range_to_scale(CovarianceModel::gc(1, delta, lambda, 1, 1), 0.3);
            GcSpectral s(delta, lambda, g, 1.0, 1);
            double zp = s.largest_precrossover_z();
            CHECK(zp < s.crossover_z());
            double ratio = s(zp).density * std::pow(zp, 1 + delta) / s.rho();
            CHECK_MESSAGE(std::fabs(ratio - 1) < 0.01, delta << " " << lambda << " " << ratio);
            // beyond the crossover the series and the quadrature agree closely
            double z = 4 * s.crossover_z();
            auto t = s.tail_series(z);
            if (t.est_rel_error < 1e-8) CHECK(rel(t.density, s.quadrature(z).density) < 1e-6);
        }
    }
}

TEST_CASE("GC positivity over a parameter grid") {
    for (int d = 1; d <= 3; ++d)
        for (double delta : {0.3, 0.9, 1.5, 1.9})
            for (double lambda : {0.5 * d + 0.1, 1.0 * d + 0.5, 6.0}) {
                GcSpectral s(delta, lambda, 0.1, 1.0, d);
                for (double z = 0.1; z <= 100; z *= 1.5) CHECK(s(z).density > 0.0);
            }
    CHECK_THROWS_AS(GcSpectral(2.0, 1.0, 1.0, 1.0, 1), ValidationError);
}

TEST_CASE("equivalence integral classification") {
    auto mt = [](double nu, double a, double s2) {
        return [=](double z) { return matern_spectral(z, nu, a, s2, 1).density; };
    };
    auto same = equivalence_integral(mt(0.5, 0.2, 1), mt(0.5, 0.2, 1), 1.0, 1, 1e5);
    CHECK(same.integral_estimate == 0.0);
    CHECK(same.consistent_with_finiteness);

    // equal microergodic parameter sigma2 / alpha^{2 nu}: relative difference O(z^{-2}), integrand ~ z^{-4}
    auto eq = equivalence_integral(mt(0.5, 0.2, 1), mt(0.5, 0.4, 2), 1.0, 1, 1e6);
    CHECK(eq.consistent_with_finiteness);
    CHECK(eq.tail_exponent == doctest::Approx(-4.0).epsilon(0.02));
    auto ne = equivalence_integral(mt(0.5, 0.2, 1), mt(0.5, 0.4, 1), 1.0, 1, 1e6);
    CHECK_FALSE(ne.consistent_with_finiteness);
    CHECK(ne.tail_exponent == doctest::Approx(0.0).epsilon(0.05));

    // GC pair with equal sigma2 lambda / gamma^delta, d = 1, delta = 0.75: integrand ~ z^{d-1} (z^{-delta})^2
    const double g1s = 0.4 * std::pow(2.0, 1 / 0.75);
    GcSpectral g0(0.75, 2.0, 0.4, 1.0, 1), g1(0.75, 4.0, g1s, 1.0, 1), g2(0.75, 4.0, 0.4, 1.0, 1);
    auto f0 = [&](double z) { return g0(z).density; };
    auto gceq = equivalence_integral(f0, [&](double z) { return g1(z).density; }, 1.0, 1, 1e6);
    CHECK(gceq.consistent_with_finiteness);
    CHECK(gceq.tail_exponent == doctest::Approx(-1.5).epsilon(0.1));
    auto gcne = equivalence_integral(f0, [&](double z) { return g2(z).density; }, 1.0, 1, 1e6);
    CHECK_FALSE(gcne.consistent_with_finiteness);

    CHECK_THROWS_AS(equivalence_integral(f0, [](double) { return -1.0; }, 1.0, 1, 1e3), DomainError);
}

TEST_CASE("oracle reports inconclusive results") {
    auto phi = [](double r) { return 1.0 / (1.0 + r); };
    CHECK_THROWS_AS(hankel_oracle(phi, 1.0, 1, 5.0, 1e-10), OracleInconclusive);
}
