#include "gck/predict.hpp"

#include "gck/errors.hpp"

namespace gck {

namespace {

double clamp_mse(double v, double sigma2) {
    if (v >= 0.0) return v;
    if (v >= -kMseClampTol * sigma2) return 0.0;
    throw EvaluationError("mean squared error is negative beyond round-off: " + std::to_string(v), v,
                          kMseClampTol * sigma2);
}

bool same_system(const KrigingSystem& a, const KrigingSystem& b) {
    const CovarianceModel &x = a.model(), &y = b.model();
    return x.family == y.family && x.variance == y.variance && x.scale == y.scale && x.shape1 == y.shape1 &&
           x.shape2 == y.shape2 && x.dim == y.dim && a.locations().coords() == b.locations().coords();
}

}  // namespace

KrigingSystem::KrigingSystem(const CovarianceModel& model, const LocationSet& locs) : model_(model), locs_(locs) {
    model_.validate();
    if (locs_.size() == 0) return;
    if (model_.dim != locs_.dim()) throw ValidationError("model and location dimensions differ");
    r_ = covariance_matrix(model_, locs_);
    chol_.emplace(r_);
}

std::optional<std::size_t> KrigingSystem::observed_index(const double* s0) const {
    for (std::size_t i = 0; i < locs_.size(); ++i)
        if (locs_.distance_to(i, s0) == 0.0) return i;
    return std::nullopt;
}

Eigen::VectorXd KrigingSystem::cross(const double* s0) const {
    if (size() == 0) return Eigen::VectorXd();
    return cross_correlation(model_, locs_, s0);
}

Eigen::VectorXd KrigingSystem::weights(const double* s0) const {
    if (size() == 0) return Eigen::VectorXd();
    if (auto j = observed_index(s0)) return Eigen::VectorXd::Unit(static_cast<Eigen::Index>(size()), *j);
    return chol_->solve(cross(s0));
}

double KrigingSystem::predict(const Eigen::VectorXd& z, const double* s0) const {
    if (static_cast<std::size_t>(z.size()) != size()) throw ValidationError("data length does not match locations");
    return size() == 0 ? 0.0 : weights(s0).dot(z);
}

double KrigingSystem::mse(const double* s0) const {
    const double s2 = model_.variance;
    if (size() == 0) return s2;
    if (observed_index(s0)) return 0.0;
    return clamp_mse(s2 * (1.0 - chol_->quad_form(cross(s0))), s2);
}

double KrigingSystem::mse_of(const Eigen::VectorXd& w, const double* s0) const {
    const double s2 = model_.variance;
    if (static_cast<std::size_t>(w.size()) != size()) throw ValidationError("weight length does not match locations");
    if (size() == 0) return s2;
    if (auto j = observed_index(s0); j && w == Eigen::VectorXd::Unit(w.size(), *j)) return 0.0;
    const Eigen::VectorXd c = cross(s0);
    const double quad = w.dot(r_.selfadjointView<Eigen::Lower>() * w);
    return clamp_mse(s2 * (1.0 - 2.0 * w.dot(c) + quad), s2);
}

Eigen::VectorXd blup_weights(const CovarianceModel& working, const LocationSet& locs, const double* s0) {
    return KrigingSystem(working, locs).weights(s0);
}

double mse_true(const CovarianceModel& model, const LocationSet& locs, const double* s0) {
    return KrigingSystem(model, locs).mse(s0);
}

double mse_misspecified(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                        const double* s0) {
    KrigingSystem t(truth, locs), w(working, locs);
    return t.mse_of(w.weights(s0), s0);
}

double ratio_u1(const KrigingSystem& truth, const KrigingSystem& working, const double* s0) {
    if (same_system(truth, working)) return 1.0;
    const double num = truth.mse_of(working.weights(s0), s0), den = truth.mse(s0);
    if (den == 0.0) return 1.0;
    return num / den;
}

double ratio_u1(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                const double* s0) {
    return ratio_u1(KrigingSystem(truth, locs), KrigingSystem(working, locs), s0);
}

double ratio_u2(const KrigingSystem& truth, const KrigingSystem& working, const double* s0) {
    if (same_system(truth, working)) return 1.0;
    const double num = working.mse(s0), den = truth.mse_of(working.weights(s0), s0);
    if (den == 0.0) return 1.0;
    return num / den;
}

double ratio_u2(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                const double* s0) {
    return ratio_u2(KrigingSystem(truth, locs), KrigingSystem(working, locs), s0);
}

PredictionAssessment assess_prediction(const CovarianceModel& truth, const CovarianceModel& working,
                                       const LocationSet& locs, const Eigen::VectorXd& z, const double* s0) {
    KrigingSystem t(truth, locs), w(working, locs);
    PredictionAssessment a;
    a.weights = w.weights(s0);
    a.prediction = w.predict(z, s0);
    a.mse_under["working"] = w.mse(s0);
    a.mse_under["truth"] = t.mse_of(a.weights, s0);
    a.u1 = ratio_u1(t, w, s0);
    a.u2 = ratio_u2(t, w, s0);
    return a;
}

}  // namespace gck
