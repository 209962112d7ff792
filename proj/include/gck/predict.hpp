#pragma once

#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gck/covmodels.hpp"
#include "gck/linalg.hpp"

namespace gck {

// Simple kriging with one model on one location set.  The correlation matrix
// and its Cholesky factor are built once and reused for every target point.
// An empty location set is allowed: no data, weights of length 0.
class KrigingSystem {
public:
    KrigingSystem(const CovarianceModel& model, const LocationSet& locs);

    const CovarianceModel& model() const { return model_; }
    const LocationSet& locations() const { return locs_; }
    std::size_t size() const { return locs_.size(); }
    const Eigen::MatrixXd& correlation() const { return r_; }

    std::optional<std::size_t> observed_index(const double* s0) const;
    Eigen::VectorXd cross(const double* s0) const;
    // R^{-1} c; the unit vector when s0 is an observed site.
    Eigen::VectorXd weights(const double* s0) const;
    double predict(const Eigen::VectorXd& z, const double* s0) const;
    // sigma^2 (1 - c'R^{-1}c): the MSE this model assigns to its own predictor.
    double mse(const double* s0) const;
    // sigma^2 (1 - 2 w'c + w'R w): MSE of the predictor w'Z when this model is true.
    double mse_of(const Eigen::VectorXd& w, const double* s0) const;

private:
    CovarianceModel model_;
    LocationSet locs_;
    Eigen::MatrixXd r_;
    std::optional<CholeskyFactor> chol_;
};

// Round-off below zero is clamped when above -kMseClampTol * sigma^2;
// anything more negative raises EvaluationError.
constexpr double kMseClampTol = 1e-10;

Eigen::VectorXd blup_weights(const CovarianceModel& working, const LocationSet& locs, const double* s0);
double mse_true(const CovarianceModel& model, const LocationSet& locs, const double* s0);
// MSE under `truth` of the BLUP built from `working`.
double mse_misspecified(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                        const double* s0);

// Efficiency ratio: MSE of the working predictor over MSE of the optimal one,
// both under the truth.  With a GC truth and a GW working model this is U(beta);
// with the roles swapped it is U_1(beta) of the GW-truth statement.
// Equals 1 at an observed site, where both MSEs vanish.
double ratio_u1(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                const double* s0);
double ratio_u1(const KrigingSystem& truth, const KrigingSystem& working, const double* s0);
// Self-assessed MSE of the working predictor over its MSE under the truth.
double ratio_u2(const CovarianceModel& truth, const CovarianceModel& working, const LocationSet& locs,
                const double* s0);
double ratio_u2(const KrigingSystem& truth, const KrigingSystem& working, const double* s0);

struct PredictionAssessment {
    Eigen::VectorXd weights;
    double prediction = 0.0;
    std::map<std::string, double> mse_under;  // keys "truth", "working"
    std::optional<double> u1;
    std::optional<double> u2;
};

// Predicts z at s0 with the working model and reports both MSEs and ratios.
PredictionAssessment assess_prediction(const CovarianceModel& truth, const CovarianceModel& working,
                                       const LocationSet& locs, const Eigen::VectorXd& z, const double* s0);

}  // namespace gck
