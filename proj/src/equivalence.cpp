#include "gck/equivalence.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "gck/errors.hpp"
#include "gck/specfun.hpp"

namespace gck {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

bool rel_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b)); }

void check_dim(int d) {
    if (d < 1 || d > 3) throw ValidationError("equivalence: dimension must be 1, 2 or 3");
}

// Orders (a, b) so that the first has family f; throws if the pair is not {f, g}.
std::pair<const CovarianceModel*, const CovarianceModel*> order(const CovarianceModel& a, const CovarianceModel& b,
                                                                Family f, Family g, const char* who) {
    if (a.family == f && b.family == g) return {&a, &b};
    if (a.family == g && b.family == f) return {&b, &a};
    throw ValidationError(std::string(who) + ": expected one " + family_name(f) + " and one " + family_name(g) +
                          " model");
}

class VerdictBuilder {
public:
    explicit VerdictBuilder(std::string dim_constraint) { v_.dimension_constraint = std::move(dim_constraint); }

    // Range conditions: failure means the theorem says nothing.
    bool coverage(const std::string& name, bool ok, const std::string& detail) {
        add(name, ok, detail);
        if (!ok && !not_covered_) {
            not_covered_ = true;
            v_.reason = name + ": " + detail;
        }
        return ok;
    }
    bool require(const std::string& name, bool ok, const std::string& detail) {
        add(name, ok, detail);
        if (!ok && v_.reason.empty()) v_.reason = name + ": " + detail;
        return ok;
    }
    CompatibilityVerdict finish() {
        bool all = true;
        for (const auto& c : v_.conditions) all = all && c.passed;
        v_.compatible = all;
        v_.verdict = all ? Verdict::Compatible : (not_covered_ ? Verdict::NotCovered : Verdict::Incompatible);
        return v_;
    }

private:
    void add(const std::string& name, bool ok, const std::string& detail) { v_.conditions.push_back({name, ok, detail}); }
    CompatibilityVerdict v_;
    bool not_covered_ = false;
};

// Gamma(2 kappa + mu + 1) / Gamma(mu + 1)
double gw_gamma_ratio(double kappa, double mu) { return std::exp(ln_gamma(2 * kappa + mu + 1) - ln_gamma(mu + 1)); }

}  // namespace

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Compatible: return "compatible";
        case Verdict::Incompatible: return "incompatible";
        case Verdict::NotCovered: return "not_covered";
    }
    return "?";
}

MicroergodicValue microergodic(const CovarianceModel& m) {
    m.validate();
    switch (m.family) {
        case Family::GC:
            return {m.variance * m.lambda() * std::pow(m.scale, -m.delta()), m.family, "sigma2*lambda/gamma^delta"};
        case Family::MT:
            return {m.variance * std::pow(m.scale, -2 * m.nu()), m.family, "sigma2/alpha^(2nu)"};
        case Family::GW:
            return {m.variance * m.mu() * std::pow(m.scale, -(2 * m.kappa() + 1)), m.family,
                    "sigma2*mu/beta^(2kappa+1)"};
        case Family::SqExp: break;
    }
    throw ValidationError("microergodic: not defined for the squared-exponential family");
}

double bridge_constant(double delta) {
    if (!(delta > 0.0 && delta < 2.0)) throw DomainError("bridge_constant: delta must lie in (0, 2)");
    return std::exp(2 * ln_gamma(0.5 * delta) - (1 - delta) * std::log(2.0)) * sin_pi(0.5 * delta) / kPi;
}

CompatibilityVerdict gc_gc_compatible(const CovarianceModel& m0, const CovarianceModel& m1, int d, double tol) {
    check_dim(d);
    if (m0.family != Family::GC || m1.family != Family::GC) throw ValidationError("gc_gc_compatible: expected two GC models");
    m0.validate();
    m1.validate();
    VerdictBuilder b("delta in (d/2, 2), d = 1, 2, 3");
    b.coverage("equal_delta", m0.delta() == m1.delta(),
               "delta0 = " + num(m0.delta()) + ", delta1 = " + num(m1.delta()));
    b.coverage("delta_range", m0.delta() > 0.5 * d && m0.delta() < 2.0,
               "delta = " + num(m0.delta()) + " must lie in (" + num(0.5 * d) + ", 2)");
    double a = microergodic(m0).value, c = microergodic(m1).value;
    b.require("microergodic_equal", rel_equal(a, c, tol), num(a) + " vs " + num(c));
    return b.finish();
}

CompatibilityVerdict mt_mt_compatible(const CovarianceModel& m0, const CovarianceModel& m1, int d, double tol) {
    check_dim(d);
    if (m0.family != Family::MT || m1.family != Family::MT) throw ValidationError("mt_mt_compatible: expected two MT models");
    m0.validate();
    m1.validate();
    VerdictBuilder b("d = 1, 2, 3");
    b.coverage("equal_nu", m0.nu() == m1.nu(), "nu0 = " + num(m0.nu()) + ", nu1 = " + num(m1.nu()));
    double a = microergodic(m0).value, c = microergodic(m1).value;
    b.require("microergodic_equal", rel_equal(a, c, tol), num(a) + " vs " + num(c));
    return b.finish();
}

CompatibilityVerdict mt_gc_compatible(const CovarianceModel& x, const CovarianceModel& y, int d, double tol) {
    check_dim(d);
    auto [mt, gc] = order(x, y, Family::MT, Family::GC, "mt_gc_compatible");
    mt->validate();
    gc->validate();
    const double delta = gc->delta();
    VerdictBuilder b("delta in (d/2, 2), d = 1, 2, 3");
    if (!b.coverage("delta_range", delta > 0.5 * d && delta < 2.0,
                    "delta = " + num(delta) + " must lie in (" + num(0.5 * d) + ", 2)"))
        return b.finish();
    b.require("smoothness", rel_equal(mt->nu(), 0.5 * delta, tol),
              "smoothness mismatch: nu = " + num(mt->nu()) + ", delta/2 = " + num(0.5 * delta));
    double lhs = microergodic(*mt).value;
    double rhs = bridge_constant(delta) * microergodic(*gc).value;
    b.require("bridge_equation", rel_equal(lhs, rhs, tol), num(lhs) + " vs " + num(rhs));
    return b.finish();
}

CompatibilityVerdict gw_gc_compatible(const CovarianceModel& x, const CovarianceModel& y, int d, double tol) {
    check_dim(d);
    auto [gw, gc] = order(x, y, Family::GW, Family::GC, "gw_gc_compatible");
    gw->validate();
    gc->validate();
    const double delta = gc->delta(), kappa = gw->kappa(), mu = gw->mu();
    VerdictBuilder b("delta in (d/2, 2) and delta >= 1, d = 1, 2, 3");
    if (!b.coverage("delta_range", delta > 0.5 * d && delta < 2.0 && delta >= 1.0,
                    "delta = " + num(delta) + " must lie in (" + num(0.5 * d) + ", 2) and be >= 1"))
        return b.finish();
    b.require("smoothness", rel_equal(kappa + 0.5, 0.5 * delta, tol),
              "smoothness mismatch: kappa = " + num(kappa) + ", (delta-1)/2 = " + num(0.5 * (delta - 1)));
    b.require("mu_bound", mu > d + kappa + 0.5, "mu = " + num(mu) + " must exceed d + kappa + 1/2 = " + num(d + kappa + 0.5));
    double lhs = gw_gamma_ratio(kappa, mu) * microergodic(*gw).value;
    double rhs = bridge_constant(delta) * microergodic(*gc).value;
    b.require("bridge_equation", rel_equal(lhs, rhs, tol), num(lhs) + " vs " + num(rhs));
    return b.finish();
}

CompatibilityVerdict mt_gw_compatible(const CovarianceModel& x, const CovarianceModel& y, int d, double tol) {
    check_dim(d);
    auto [mt, gw] = order(x, y, Family::MT, Family::GW, "mt_gw_compatible");
    mt->validate();
    gw->validate();
    const double nu = mt->nu(), kappa = gw->kappa(), mu = gw->mu();
    VerdictBuilder b("nu >= 1/2, kappa >= 0, d = 1, 2, 3");
    if (!b.coverage("nu_range", nu >= 0.5, "nu = " + num(nu) + " must be >= 1/2")) return b.finish();
    b.require("smoothness", rel_equal(nu, kappa + 0.5, tol),
              "smoothness mismatch: nu = " + num(nu) + ", kappa + 1/2 = " + num(kappa + 0.5));
    b.require("mu_bound", mu > d + kappa + 0.5, "mu = " + num(mu) + " must exceed d + kappa + 1/2 = " + num(d + kappa + 0.5));
    double lhs = microergodic(*mt).value;
    double rhs = gw_gamma_ratio(kappa, mu) * microergodic(*gw).value;
    b.require("equation", rel_equal(lhs, rhs, tol), num(lhs) + " vs " + num(rhs));
    return b.finish();
}

CompatibilityVerdict compatible(const CovarianceModel& a, const CovarianceModel& b, int d, double tol) {
    auto is = [&](Family f, Family g) {
        return (a.family == f && b.family == g) || (a.family == g && b.family == f);
    };
    if (is(Family::GC, Family::GC)) return gc_gc_compatible(a, b, d, tol);
    if (is(Family::MT, Family::MT)) return mt_mt_compatible(a, b, d, tol);
    if (is(Family::MT, Family::GC)) return mt_gc_compatible(a, b, d, tol);
    if (is(Family::GW, Family::GC)) return gw_gc_compatible(a, b, d, tol);
    if (is(Family::MT, Family::GW)) return mt_gw_compatible(a, b, d, tol);
    CompatibilityVerdict v;
    v.verdict = Verdict::NotCovered;
    v.reason = "no equivalence result for the pair " + family_name(a.family) + "/" + family_name(b.family);
    v.conditions.push_back({"family_pair", false, v.reason});
    return v;
}

GwSupport equivalent_gw_support(const CovarianceModel& gc, double kappa, double mu, double sigma2_3, int d) {
    check_dim(d);
    if (gc.family != Family::GC) throw ValidationError("equivalent_gw_support: expected a GC model");
    gc.validate();
    const double delta = gc.delta();
    if (!(delta >= 1.0 && delta < 2.0))
        throw ValidationError("equivalent_gw_support: needs delta in [1, 2), got " + num(delta));
    if (!rel_equal(kappa, 0.5 * (delta - 1), 1e-12))
        throw ValidationError("equivalent_gw_support: kappa must equal (delta - 1)/2 = " + num(0.5 * (delta - 1)));
    if (!(sigma2_3 > 0.0)) throw ValidationError("equivalent_gw_support: sigma2_3 must be positive");
    if (!(mu >= 0.5 * (d + 1) + kappa))
        throw ValidationError("equivalent_gw_support: mu = " + num(mu) + " gives no valid GW model in d = " +
                              std::to_string(d));
    // beta^{2 kappa + 1} = Gamma(2k+mu+1)/Gamma(mu+1) sigma3^2 mu / (K sigma1^2 lambda / gamma^delta)
    double lb = ln_gamma(2 * kappa + mu + 1) - ln_gamma(mu + 1) + std::log(sigma2_3 * mu) -
                std::log(bridge_constant(delta)) - std::log(microergodic(gc).value);
    GwSupport out;
    out.beta = std::exp(lb / (2 * kappa + 1));
    out.mu_bound_ok = mu > d + kappa + 0.5;
    if (!out.mu_bound_ok)
        out.warnings.push_back("mu = " + num(mu) + " does not exceed d + kappa + 1/2 = " + num(d + kappa + 0.5) +
                               "; the equivalence result does not cover this GW model");
    return out;
}

double equivalent_mt_scale(const CovarianceModel& gc, double sigma2) {
    if (gc.family != Family::GC) throw ValidationError("equivalent_mt_scale: expected a GC model");
    gc.validate();
    if (!(sigma2 > 0.0)) throw ValidationError("equivalent_mt_scale: sigma2 must be positive");
    const double delta = gc.delta();
    if (!(delta < 2.0)) throw ValidationError("equivalent_mt_scale: needs delta < 2");
    // sigma2 / alpha^delta = K * sigma1^2 lambda / gamma^delta
    return std::pow(sigma2 / (bridge_constant(delta) * microergodic(gc).value), 1.0 / delta);
}

SqExpRatio sqexp_spectral_ratio_limit(const CovarianceModel& a0, const CovarianceModel& a1) {
    if (a0.family != Family::SqExp || a1.family != Family::SqExp)
        throw ValidationError("sqexp_spectral_ratio_limit: expected two squared-exponential models");
    a0.validate();
    a1.validate();
    if (a1.scale > a0.scale) return {SqExpRatioLimit::Zero, 0.0};
    if (a1.scale < a0.scale) return {SqExpRatioLimit::Infinite, INFINITY};
    return {SqExpRatioLimit::Ratio, a1.variance / a0.variance};
}

}  // namespace gck
