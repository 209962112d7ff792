#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gck/equivalence.hpp"
#include "gck/errors.hpp"
#include "gck/specfun.hpp"
#include "gck/spectral.hpp"

using namespace gck;

namespace {

constexpr double kPi = 3.14159265358979323846;

CovarianceModel gc_range(double delta, double lambda, double range, double sigma2 = 1.0, int d = 1) {
    double g = practical_range_to_scale(CovarianceModel::gc(1, delta, lambda, 1, d), range);
    return CovarianceModel::gc(sigma2, delta, lambda, g, d);
}

}  // namespace

TEST_CASE("microergodic values") {
    auto gc = CovarianceModel::gc(1, 0.75, 1.5, 0.05707);
    CHECK(microergodic(gc).value == doctest::Approx(1.5 / std::pow(0.05707, 0.75)).epsilon(1e-15));
    CHECK(microergodic(gc).value == doctest::Approx(12.85).epsilon(1e-3));
    CHECK(microergodic(CovarianceModel::mt(1, 0.5, 1)).value == 1.0);
    CHECK(microergodic(CovarianceModel::gw(1, 0, 4, 1)).value == 4.0);
    CHECK_THROWS_AS(microergodic(CovarianceModel::sqexp(1, 1)), ValidationError);

    // sigma2 -> c sigma2, gamma -> c^{1/delta} gamma leaves the value unchanged
    for (double c : {0.3, 2.0, 17.0}) {
        auto m = CovarianceModel::gc(c, 0.75, 1.5, std::pow(c, 1 / 0.75) * 0.05707);
        CHECK(std::fabs(microergodic(m).value / microergodic(gc).value - 1) < 4e-15);
    }
}

TEST_CASE("bridge constant") {
    CHECK(bridge_constant(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // Gamma^2(0.6) sin(0.6 pi) / (2^{-0.2} pi), direct arithmetic
    double g = std::tgamma(0.6);
    CHECK(bridge_constant(1.2) == doctest::Approx(g * g * std::sin(0.6 * kPi) * std::pow(2.0, 0.2) / kPi).epsilon(1e-14));
    CHECK(bridge_constant(1.9999) < 1e-3);
    CHECK_THROWS_AS(bridge_constant(2.0), DomainError);
}

TEST_CASE("GC-GC compatibility") {
    auto m0 = CovarianceModel::gc(1, 1, 1, 1), m1 = CovarianceModel::gc(2, 1, 1, 2);
    auto v = gc_gc_compatible(m0, m1, 1);
    CHECK(v.verdict == Verdict::Compatible);
    CHECK(v.compatible);
    CHECK(v.reason.empty());
    CHECK(gc_gc_compatible(m1, m0, 1).compatible);
    auto w = gc_gc_compatible(m0, CovarianceModel::gc(3, 1, 1, 2), 1);
    CHECK(w.verdict == Verdict::Incompatible);
    CHECK(w.reason.rfind("microergodic_equal", 0) == 0);

    auto nc = gc_gc_compatible(CovarianceModel::gc(1, 0.4, 1, 1), CovarianceModel::gc(1, 0.4, 1, 1), 1);
    CHECK(nc.verdict == Verdict::NotCovered);
    CHECK_FALSE(nc.compatible);
    CHECK(gc_gc_compatible(CovarianceModel::gc(1, 1, 1, 1), CovarianceModel::gc(1, 1.5, 1, 1), 1).verdict ==
          Verdict::NotCovered);
    // delta = 1 is not above d/2 for d = 2
    CHECK(gc_gc_compatible(m0, m1, 2).verdict == Verdict::NotCovered);
    CHECK(gc_gc_compatible(m0, m1, 3).verdict == Verdict::NotCovered);
    for (const auto& c : v.conditions) CHECK(c.passed);
}

TEST_CASE("MT-GC compatibility and the equivalent Matern scale") {
    auto gc = CovarianceModel::gc(1.0, 1.0, 3.0, 0.5);
    auto mt = CovarianceModel::mt(1.0, 0.5, 1.0 / 6.0);  // sigma2/alpha = sigma1^2 lambda / gamma = 6
    CHECK(mt_gc_compatible(mt, gc, 1).compatible);
    CHECK(mt_gc_compatible(gc, mt, 1).compatible);
    auto bad = mt_gc_compatible(CovarianceModel::mt(1.0, 0.7, 1.0 / 6.0), gc, 1);
    CHECK(bad.verdict == Verdict::Incompatible);
    CHECK(bad.reason.find("smoothness mismatch") != std::string::npos);

    // unit bridge constant at delta = 1
    auto unit = CovarianceModel::gc(2.0, 1.0, 1.5, 3.0);
    CHECK(equivalent_mt_scale(unit, 2.0 * 1.5 / 3.0) == doctest::Approx(1.0).epsilon(1e-14));

    for (int d = 1; d <= 3; ++d) {
        double delta = d == 3 ? 1.7 : 1.2;
        auto g = gc_range(delta, 5.0, 0.3, 1.0, d);
        double prev = 0.0;
        for (double s2 : {0.5, 1.0, 2.0, 4.0}) {
            double a = equivalent_mt_scale(g, s2);
            CHECK(a > prev);
            prev = a;
            auto v = mt_gc_compatible(CovarianceModel::mt(s2, 0.5 * delta, a, d), g, d);
            CHECK_MESSAGE(v.compatible, v.reason);
        }
    }
    CHECK(mt_gc_compatible(CovarianceModel::mt(1, 0.3, 1), CovarianceModel::gc(1, 0.6, 1, 1), 2).verdict ==
          Verdict::NotCovered);
}

TEST_CASE("equivalent GW support") {
    auto gc = gc_range(1.2, 5.0, 0.3);
    CHECK(gc.scale == doctest::Approx(0.287515515707565).epsilon(1e-12));
    auto s = equivalent_gw_support(gc, 0.1, 2.1, 1.0, 2);
    CHECK(std::fabs(s.beta - 0.204) <= 0.001);
    CHECK(s.beta == doctest::Approx(0.204651).epsilon(1e-5));

    // independent evaluation of the bracketed expression
    double kappa = 0.1, mu = 2.1, delta = 1.2;
    double br = std::pow(gc.scale, -delta) * 5.0 / mu * std::pow(2.0, delta - 1) * std::sin(kPi * delta / 2) *
                std::pow(std::tgamma(delta / 2), 2) * std::tgamma(mu + 1) / (std::tgamma(2 * kappa + mu + 1) * kPi);
    CHECK(s.beta == doctest::Approx(std::pow(br, -1 / (2 * kappa + 1))).epsilon(1e-13));

    // mu = 2.1 is below d + kappa + 1/2 = 2.6 in d = 2 but not in d = 1
    CHECK_FALSE(s.mu_bound_ok);
    CHECK_FALSE(s.warnings.empty());
    auto v2 = gw_gc_compatible(CovarianceModel::gw(1, kappa, mu, s.beta, 2), gc, 2);
    CHECK(v2.verdict == Verdict::Incompatible);
    CHECK(v2.reason.rfind("mu_bound", 0) == 0);
    auto s1 = equivalent_gw_support(gc, kappa, mu, 1.0, 1);
    CHECK(s1.mu_bound_ok);
    CHECK(s1.beta == s.beta);
    auto v1 = gw_gc_compatible(CovarianceModel::gw(1, kappa, mu, s1.beta, 1), gc, 1);
    CHECK_MESSAGE(v1.compatible, v1.reason);

    // doubling gamma^delta scales beta by 2^{1/(2 kappa + 1)}
    auto gc2 = gc.with_scale(gc.scale * std::pow(2.0, 1 / delta));
    CHECK(equivalent_gw_support(gc2, kappa, mu, 1.0, 1).beta ==
          doctest::Approx(s.beta * std::pow(2.0, 1 / (2 * kappa + 1))).epsilon(1e-13));

    // round trips over a grid
    for (int d = 1; d <= 3; ++d)
        for (double dl : {1.0, 1.4, 1.8}) {
            if (!(dl > 0.5 * d)) continue;
            double k = 0.5 * (dl - 1), m = d + k + 1.0;
            auto g = gc_range(dl, 4.0, 0.5, 1.3, d);
            auto sup = equivalent_gw_support(g, k, m, 0.7, d);
            CHECK(sup.mu_bound_ok);
            auto v = gw_gc_compatible(g, CovarianceModel::gw(0.7, k, m, sup.beta, d), d);
            CHECK_MESSAGE(v.compatible, v.reason);
        }

    CHECK_THROWS_AS(equivalent_gw_support(gc, 0.2, 2.1, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(equivalent_gw_support(gc_range(0.8, 5, 0.3), 0.0, 2.1, 1.0, 1), ValidationError);
    CHECK(gw_gc_compatible(CovarianceModel::gw(1, 0, 3, 1), CovarianceModel::gc(1, 0.8, 1, 1), 1).verdict ==
          Verdict::NotCovered);
    auto wrongk = gw_gc_compatible(CovarianceModel::gw(1, 0.2, 3, 1), gc, 1);
    CHECK(wrongk.verdict == Verdict::Incompatible);
    CHECK(wrongk.reason.rfind("smoothness", 0) == 0);
    auto mub = gw_gc_compatible(CovarianceModel::gw(1, 0.1, 1 + 0.1 + 0.4, 1), gc, 1);
    CHECK(mub.reason.rfind("mu_bound", 0) == 0);
}

TEST_CASE("MT-GW compatibility") {
    // nu = 0.5, kappa = 0, mu = 3, d = 1: sigma0^2/alpha = 3 sigma1^2 / beta
    auto gw = CovarianceModel::gw(1.0, 0.0, 3.0, 0.6);
    auto mt = CovarianceModel::mt(1.0, 0.5, 0.2);
    auto v = mt_gw_compatible(mt, gw, 1);
    CHECK_MESSAGE(v.compatible, v.reason);
    CHECK(mt_gw_compatible(gw, mt, 1).compatible);
    CHECK(mt_gw_compatible(CovarianceModel::mt(1.0, 1.0, 0.2), gw, 1).verdict == Verdict::Incompatible);
    CHECK(mt_gw_compatible(CovarianceModel::mt(1.0, 0.4, 0.2), gw, 1).verdict == Verdict::NotCovered);

    // round trip with kappa > 0 in d = 2
    double kappa = 0.5, mu = 3.5, beta = 0.4, s1 = 1.2;
    double rhs = std::exp(ln_gamma(2 * kappa + mu + 1) - ln_gamma(mu + 1)) * mu * s1 / std::pow(beta, 2 * kappa + 1);
    double alpha = std::pow(2.0 / rhs, 1.0 / (2 * (kappa + 0.5)));
    auto r = mt_gw_compatible(CovarianceModel::mt(2.0, kappa + 0.5, alpha, 2), CovarianceModel::gw(s1, kappa, mu, beta, 2), 2);
    CHECK_MESSAGE(r.compatible, r.reason);
}

TEST_CASE("dispatch") {
    auto gc = CovarianceModel::gc(1, 1, 1, 1);
    CHECK(compatible(gc, CovarianceModel::gc(2, 1, 1, 2), 1).compatible);
    CHECK(compatible(CovarianceModel::mt(1, 0.5, 1), CovarianceModel::mt(2, 0.5, 2), 1).compatible);
    auto se = compatible(CovarianceModel::sqexp(1, 1), gc, 1);
    CHECK(se.verdict == Verdict::NotCovered);
    CHECK_THROWS_AS(gw_gc_compatible(gc, gc, 1), ValidationError);
}

TEST_CASE("squared-exponential spectral ratio limit") {
    auto a0 = CovarianceModel::sqexp(1, 0.5);
    CHECK(sqexp_spectral_ratio_limit(a0, CovarianceModel::sqexp(1, 0.7)).kind == SqExpRatioLimit::Zero);
    CHECK(sqexp_spectral_ratio_limit(a0, CovarianceModel::sqexp(1, 0.3)).kind == SqExpRatioLimit::Infinite);
    auto r = sqexp_spectral_ratio_limit(a0, CovarianceModel::sqexp(2, 0.5));
    CHECK(r.kind == SqExpRatioLimit::Ratio);
    CHECK(r.ratio == 2.0);
}

TEST_CASE("spectral evidence agrees with the compatibility verdicts") {
    // compatible pairs: integrand decays faster than z^{-1}; microergodic mismatch: it does not
    const int d = 1;
    auto g0 = gc_range(1.5, 3.0, 0.4);
    GcSpectral s0(g0.delta(), g0.lambda(), g0.scale, g0.variance, d);
    auto f0 = [&](double z) { return s0(z).density; };

    auto g1 = CovarianceModel::gc(2.0, 1.5, 3.0, g0.scale * std::pow(2.0, 1 / 1.5));
    REQUIRE(gc_gc_compatible(g0, g1, d).compatible);
    GcSpectral s1(g1.delta(), g1.lambda(), g1.scale, g1.variance, d);
    CHECK(equivalence_integral(f0, [&](double z) { return s1(z).density; }, 1.0, d, 1e6).consistent_with_finiteness);
    GcSpectral s2(1.5, 3.0, g0.scale * 1.3, 1.0, d);
    CHECK_FALSE(equivalence_integral(f0, [&](double z) { return s2(z).density; }, 1.0, d, 1e6).consistent_with_finiteness);

    double a = equivalent_mt_scale(g0, 1.0);
    REQUIRE(mt_gc_compatible(CovarianceModel::mt(1, 0.75, a), g0, d).compatible);
    auto fm = [&](double z) { return matern_spectral(z, 0.75, a, 1.0, d).density; };
    CHECK(equivalence_integral(f0, fm, 1.0, d, 1e6).consistent_with_finiteness);
    auto fm2 = [&](double z) { return matern_spectral(z, 0.75, 1.2 * a, 1.0, d).density; };
    CHECK_FALSE(equivalence_integral(f0, fm2, 1.0, d, 1e6).consistent_with_finiteness);

    auto gc12 = gc_range(1.2, 5.0, 0.3);
    GcSpectral s12(gc12.delta(), gc12.lambda(), gc12.scale, 1.0, d);
    double beta = equivalent_gw_support(gc12, 0.1, 2.1, 1.0, d).beta;
    auto fc = [&](double z) { return s12(z).density; };
    auto fw = [&](double z) { return gw_spectral(z, 2.1, 0.1, beta, 1.0, d).density; };
    CHECK(equivalence_integral(fc, fw, 1.0, d, 1e5).consistent_with_finiteness);
    auto fw2 = [&](double z) { return gw_spectral(z, 2.1, 0.1, 1.3 * beta, 1.0, d).density; };
    CHECK_FALSE(equivalence_integral(fc, fw2, 1.0, d, 1e5).consistent_with_finiteness);
}
