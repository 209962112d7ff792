#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "gck/covmodels.hpp"
#include "gck/errors.hpp"
#include "gck/linalg.hpp"

using namespace gck;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Eigen::MatrixXd gc_matrix(std::size_t n, int d, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> c(n * d);
    for (auto& v : c) v = u(g);
    return covariance_matrix(CovarianceModel::gc(1.0, 0.75, 1.5, 0.05707, d), LocationSet(d, c));
}

}  // namespace

TEST_CASE("small cases") {
    CholeskyFactor id(Eigen::MatrixXd::Identity(4, 4));
    CHECK(id.L() == Eigen::MatrixXd::Identity(4, 4));
    CHECK(id.log_det() == 0.0);
    Eigen::VectorXd b(4);
    b << 1, -2, 3, 0.5;
    CHECK(id.solve(b) == b);
    CHECK(id.quad_form(b) == doctest::Approx(b.squaredNorm()));

    Eigen::MatrixXd a(2, 2);
    a << 1, 0.5, 0.5, 1;
    CholeskyFactor f = cholesky(a);
    CHECK(f.L()(0, 0) == 1.0);
    CHECK(f.L()(1, 0) == 0.5);
    CHECK(f.L()(0, 1) == 0.0);
    CHECK(f.L()(1, 1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
    Eigen::VectorXd x = solve(f, e1);
    CHECK(x[0] == doctest::Approx(4.0 / 3).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(-2.0 / 3).epsilon(1e-15));
    CHECK(log_det(f) == doctest::Approx(std::log(0.75)).epsilon(1e-15));
    CHECK(quad_form(f, a.col(0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("errors") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    try {
        cholesky(a);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.pivot() == 1);
    }
    // failing pivot beyond the first block
    Eigen::MatrixXd big = Eigen::MatrixXd::Identity(300, 300);
    big(150, 150) = 0.0;
    try {
        cholesky(big);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.pivot() == 150);
    }
    Eigen::MatrixXd ns(2, 2);
    ns << 1, 0.1, 0.2, 1;
    CHECK_THROWS_AS(cholesky(ns), ValidationError);
    CHECK_THROWS_AS(CholeskyFactor(Eigen::MatrixXd::Identity(3, 3)).solve(Eigen::VectorXd::Ones(2)), ValidationError);
    CHECK_THROWS_AS(CholeskyFactor(Eigen::MatrixXd::Identity(3, 3)).quad_form(Eigen::VectorXd::Ones(4)), ValidationError);
    // coincident points make the correlation matrix singular
    Eigen::MatrixXd s = Eigen::MatrixXd::Ones(3, 3);
    CHECK_THROWS_AS(cholesky(s), NotPositiveDefinite);
}

TEST_CASE("random correlation matrices") {
    for (int d = 1; d <= 3; ++d) {
        for (std::size_t n : {50, 97, 250}) {
            Eigen::MatrixXd a = gc_matrix(n, d, 11 * n + d);
            CholeskyFactor f(a);
            double resid = (f.reconstruct() - a).cwiseAbs().maxCoeff();
            CHECK(resid < 1e-12);
            CHECK(resid <= 64.0 * n * kEps);
            for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(f.L()(i, i) > 0.0);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
            double ev = es.eigenvalues().array().log().sum();
            CHECK(std::fabs(f.log_det() - ev) < 1e-9 * std::max(1.0, std::fabs(ev)));
            CHECK(f.log_det() <= 0.0);

            Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(a.rows(), -1.0, 2.0);
            Eigen::VectorXd b = a * x;
            double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
            CHECK((f.solve(b) - x).norm() / x.norm() < 1e-15 * cond + 1e-12);

            Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(a.rows(), 0.3, -0.7);
            double q1 = f.quad_form(z), q2 = z.dot(f.solve(z));
            CHECK(q1 >= 0.0);
            CHECK(std::fabs(q1 - q2) <= 1e-12 * q1 * std::max(1.0, cond * kEps * 1e3));
            CHECK(f.quad_form(Eigen::VectorXd::Zero(a.rows())) == 0.0);

            Eigen::MatrixXd bb(a.rows(), 2);
            bb.col(0) = b;
            bb.col(1) = a.col(0);
            Eigen::MatrixXd xx = f.solve_matrix(bb);
            CHECK((xx.col(0) - x).norm() / x.norm() < 1e-15 * cond + 1e-12);
        }
    }
}

TEST_CASE("large factorization residual") {
    const std::size_t n = 1500;
    Eigen::MatrixXd a = gc_matrix(n, 2, 5);
    CholeskyFactor f(a);
    CHECK((f.reconstruct() - a).cwiseAbs().maxCoeff() <= 64.0 * n * kEps);
}
