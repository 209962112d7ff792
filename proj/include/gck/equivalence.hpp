#pragma once

#include <string>
#include <vector>

#include "gck/covmodels.hpp"

namespace gck {

struct MicroergodicValue {
    double value = 0.0;
    Family family = Family::GC;
    std::string formula;  // "sigma2*lambda/gamma^delta", "sigma2/alpha^(2nu)" or "sigma2*mu/beta^(2kappa+1)"
};

// Throws ValidationError for SqExp, whose equivalence depends on sigma2 and
// alpha separately.
MicroergodicValue microergodic(const CovarianceModel& model);

// Gamma^2(delta/2) sin(pi delta/2) / (2^{1-delta} pi); equals 1 at delta = 1.
double bridge_constant(double delta);

enum class Verdict { Compatible, Incompatible, NotCovered };
std::string verdict_name(Verdict v);

struct Condition {
    std::string name;
    bool passed = false;
    std::string detail;
};

// The sufficient conditions are stated on restricted parameter ranges.  Outside
// them the verdict is NotCovered, which is distinct from Incompatible.
struct CompatibilityVerdict {
    Verdict verdict = Verdict::NotCovered;
    bool compatible = false;
    std::vector<Condition> conditions;
    std::string dimension_constraint;
    std::string reason;  // first failed condition, empty when compatible
};

constexpr double kEquivalenceRelTol = 1e-12;

// Cross-family predicates accept their two models in either order.
CompatibilityVerdict gc_gc_compatible(const CovarianceModel& m0, const CovarianceModel& m1, int d,
                                      double rel_tol = kEquivalenceRelTol);
CompatibilityVerdict mt_gc_compatible(const CovarianceModel& a, const CovarianceModel& b, int d,
                                      double rel_tol = kEquivalenceRelTol);
CompatibilityVerdict gw_gc_compatible(const CovarianceModel& a, const CovarianceModel& b, int d,
                                      double rel_tol = kEquivalenceRelTol);
CompatibilityVerdict mt_gw_compatible(const CovarianceModel& a, const CovarianceModel& b, int d,
                                      double rel_tol = kEquivalenceRelTol);
CompatibilityVerdict mt_mt_compatible(const CovarianceModel& m0, const CovarianceModel& m1, int d,
                                      double rel_tol = kEquivalenceRelTol);
// Dispatches on the two families.
CompatibilityVerdict compatible(const CovarianceModel& a, const CovarianceModel& b, int d,
                                double rel_tol = kEquivalenceRelTol);

struct GwSupport {
    double beta = 0.0;
    bool mu_bound_ok = false;  // mu > d + kappa + 1/2
    std::vector<std::string> warnings;
};

// Compact support beta such that GW(mu, kappa, beta, sigma2_3) satisfies the
// GC-GW equivalence equation.  Requires kappa = (delta - 1)/2.
GwSupport equivalent_gw_support(const CovarianceModel& gc, double kappa, double mu, double sigma2_3, int d);

// Matern scale alpha with nu = delta/2 and variance sigma2 equivalent to gc.
double equivalent_mt_scale(const CovarianceModel& gc, double sigma2);

enum class SqExpRatioLimit { Zero, Infinite, Ratio };
struct SqExpRatio {
    SqExpRatioLimit kind = SqExpRatioLimit::Ratio;
    double ratio = 0.0;  // sigma1^2 / sigma0^2 when kind == Ratio
};
// Limit of the spectral density ratio phi_hat_1 / phi_hat_0 as z -> infinity.
SqExpRatio sqexp_spectral_ratio_limit(const CovarianceModel& a0, const CovarianceModel& a1);

}  // namespace gck
