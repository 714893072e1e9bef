#include <doctest.h>

#include <cmath>
#include <random>

#include "sada/error.hpp"
#include "sada/weighting.hpp"
#include "test_support.hpp"

using namespace sada;
using sada::testing::mean_dataset;
using sada::testing::random_dataset;
using sada::testing::vec;

namespace {

ErrorCode error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoError;
}

// Estimated variance of ybar_L + w'(mean_U yhat - mean_L yhat), constant dropped.
double mean_objective(const MomentEstimates& m, const VectorXd& w, Index n, Index N) {
    const double nn = static_cast<double>(n), NN = static_cast<double>(N);
    return NN / (nn * (NN - nn)) * w.dot(m.gram * w) - 2.0 * w.dot(m.cross.col(0)) / nn;
}

}  // namespace

TEST_CASE("regularize_gram") {
    SUBCASE("identity") {
        const RegularizedGram r = regularize_gram(MatrixXd::Identity(3, 3), 1e-8);
        CHECK(r.ridge == doctest::Approx(1e-8).epsilon(1e-12));
        CHECK((r.matrix - (1 + 1e-8) * MatrixXd::Identity(3, 3)).norm() <= 1e-15);
    }
    SUBCASE("rank deficient") {
        MatrixXd g(2, 2);
        g << 1, 1, 1, 1;
        const RegularizedGram r = regularize_gram(g, 1e-8);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.matrix);
        CHECK(es.eigenvalues()(0) == doctest::Approx(r.ridge).epsilon(1e-6));
        CHECK(es.eigenvalues()(1) == doctest::Approx(2 + r.ridge));
        CHECK(r.ridge == doctest::Approx(1e-8));
        CHECK(r.matrix.fullPivLu().isInvertible());
    }
    SUBCASE("zero") {
        CHECK(error_of([] { regularize_gram(MatrixXd::Zero(2, 2), 1e-8); }) ==
              ErrorCode::ZeroGram);
        CHECK(error_of([] { solve_gram(MatrixXd::Zero(2, 2), MatrixXd::Ones(2, 1), 1e-8); }) ==
              ErrorCode::SingularGram);
    }
    SUBCASE("bad inputs") {
        CHECK(error_of([] { regularize_gram(MatrixXd::Identity(2, 2), -1.0); }) ==
              ErrorCode::ConfigError);
        CHECK(error_of([] { regularize_gram(MatrixXd::Ones(2, 3), 0.0); }) ==
              ErrorCode::DimensionMismatch);
    }
    SUBCASE("singular without ridge") {
        MatrixXd g(2, 2);
        g << 1, 1, 1, 1;
        CHECK(error_of([&] { solve_gram(g, MatrixXd::Ones(2, 1), 0.0); }) ==
              ErrorCode::SingularGram);
    }
}

TEST_CASE("WeightMatrix helpers") {
    const WeightMatrix u = WeightMatrix::unit(3, 2, 1);
    CHECK(u.blocks.rows() == 6);
    CHECK(u.block(1) == MatrixXd::Identity(2, 2));
    CHECK(u.block(0) == MatrixXd::Zero(2, 2));
    CHECK_THROWS_AS(u.as_vector(), Error);
    CHECK(WeightMatrix::unit(2, 1, 0).as_vector() == vec({1, 0}));
    CHECK_THROWS_AS(WeightMatrix::unit(2, 1, 2), Error);
}

TEST_CASE("mean weights: large-sample population cases") {
    std::mt19937_64 eng(11);
    std::normal_distribution<double> z;
    const Index N = 40000, n = 20000;
    VectorXd y(N);
    MatrixXd preds(N, 2);
    for (Index i = 0; i < N; ++i) {
        y(i) = z(eng);
        preds(i, 0) = y(i);
        preds(i, 1) = z(eng);
    }
    SUBCASE("perfect first column") {
        const WeightEstimate w = estimate_mean_weights(mean_dataset(y.head(n), preds));
        CHECK(w.includes_unlabeled_fraction);
        CHECK(w.weights.as_vector()(0) == doctest::Approx(0.5).epsilon(0.03));
        CHECK(std::abs(w.weights.as_vector()(1)) <= 0.02);
    }
    SUBCASE("uncorrelated predictions") {
        const WeightEstimate w =
            estimate_mean_weights(mean_dataset(y.head(n), preds.rightCols(1)));
        CHECK(std::abs(w.weights.as_vector()(0)) <= 0.02);
    }
}

TEST_CASE("mean weights: 6-row fixture against hand 2x2 solve") {
    const VectorXd y = vec({1.0, 2.5, -0.5});
    MatrixXd p(6, 2);
    p << 1.2, 0.3,   //
        2.0, 1.1,    //
        -0.1, 0.4,   //
        0.7, -1.0,   //
        1.5, 0.2,    //
        0.0, 0.9;
    // Independent moment sums with explicit loops and Cramer's rule.
    double m1 = 0, m2 = 0, ym = 0;
    for (int i = 0; i < 6; ++i) m1 += p(i, 0) / 6, m2 += p(i, 1) / 6;
    for (int i = 0; i < 3; ++i) ym += y(i) / 3;
    double g11 = 0, g12 = 0, g22 = 0, c1 = 0, c2 = 0;
    for (int i = 0; i < 6; ++i) {
        g11 += (p(i, 0) - m1) * (p(i, 0) - m1) / 6;
        g12 += (p(i, 0) - m1) * (p(i, 1) - m2) / 6;
        g22 += (p(i, 1) - m2) * (p(i, 1) - m2) / 6;
    }
    for (int i = 0; i < 3; ++i) {
        c1 += (p(i, 0) - m1) * (y(i) - ym) / 3;
        c2 += (p(i, 1) - m2) * (y(i) - ym) / 3;
    }
    const double det = g11 * g22 - g12 * g12;
    const double w1 = 0.5 * (g22 * c1 - g12 * c2) / det;
    const double w2 = 0.5 * (g11 * c2 - g12 * c1) / det;

    const WeightEstimate w = estimate_mean_weights(mean_dataset(y, p), 0.0);
    CHECK(w.weights.as_vector()(0) == doctest::Approx(w1).epsilon(1e-12));
    CHECK(w.weights.as_vector()(1) == doctest::Approx(w2).epsilon(1e-12));
    CHECK(w.moments.gram(0, 1) == doctest::Approx(g12).epsilon(1e-12));
}

TEST_CASE("general weights agree with the mean closed form") {
    std::mt19937_64 eng(13);
    for (int t = 0; t < 20; ++t) {
        const Dataset ds = random_dataset(eng, 80, 30, 3);
        const double pilot = ds.labels().mean();
        const WeightEstimate g = estimate_general_weights(ds, mean_model(), vec({pilot}));
        const WeightEstimate m = estimate_mean_weights(ds);
        CHECK_FALSE(g.includes_unlabeled_fraction);
        const VectorXd scaled = ds.unlabeled_fraction() * g.weights.as_vector();
        CHECK((scaled - m.weights.as_vector()).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("general weights: uncentered moments are the literal plug-in") {
    std::mt19937_64 eng(17);
    const Dataset ds = random_dataset(eng, 40, 15, 2, 2);
    const ScoreModel model = ols_model(2);
    const VectorXd theta = vec({0.2, -0.1});
    const WeightEstimate w = estimate_general_weights(ds, model, theta, {false, 0.0});
    MatrixXd G = MatrixXd::Zero(4, 4), C = MatrixXd::Zero(4, 2);
    for (Index i = 0; i < ds.N(); ++i) {
        VectorXd S(4);
        const VectorXd x = ds.features().row(i).transpose();
        S.head(2) = model.score(x, ds.predictions()(i, 0), theta);
        S.tail(2) = model.score(x, ds.predictions()(i, 1), theta);
        G += S * S.transpose() / static_cast<double>(ds.N());
        if (i < ds.n()) {
            C += S * model.score(x, ds.labels()(i), theta).transpose() /
                 static_cast<double>(ds.n());
        }
    }
    const MatrixXd oracle = G.fullPivLu().solve(C);
    CHECK((w.weights.blocks - oracle).norm() <= 1e-10 * (1 + oracle.norm()));
    CHECK_FALSE(w.moments.centered);
}

TEST_CASE("constant prediction column gets a zero block") {
    std::mt19937_64 eng(19);
    const Dataset base = random_dataset(eng, 60, 20, 2);
    MatrixXd preds = base.predictions();
    preds.col(1).setConstant(4.2);
    const Dataset ds = mean_dataset(base.labels(), preds);
    const WeightEstimate w = estimate_general_weights(ds, mean_model(), vec({0.0}));
    CHECK(std::abs(w.weights.as_vector()(1)) <= 1e-12);
    CHECK(std::abs(w.weights.as_vector()(0)) > 0.0);
}

TEST_CASE("K=1 perfect predictions: weight averages near the unlabeled fraction") {
    std::mt19937_64 eng(23);
    std::normal_distribution<double> z;
    const Index N = 200, n = 60;
    double total = 0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
        VectorXd y(N);
        for (Index i = 0; i < N; ++i) y(i) = z(eng);
        const Dataset ds = mean_dataset(y.head(n), y);
        const WeightEstimate w =
            estimate_general_weights(ds, mean_model(), vec({y.head(n).mean()}));
        total += ds.unlabeled_fraction() * w.weights.as_vector()(0);
    }
    CHECK(std::abs(total / reps - 0.7) <= 3.0 / n);
}

TEST_CASE("properties on random datasets") {
    std::mt19937_64 eng(29);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const Dataset ds = random_dataset(eng, 50, 20, 3);
        const WeightEstimate w = estimate_mean_weights(ds, 0.0);

        // Scale covariance.
        const Index k = t % 3;
        double c = u(eng);
        if (std::abs(c) < 0.1) c = 0.5;
        MatrixXd scaled = ds.predictions();
        scaled.col(k) *= c;
        const WeightEstimate ws = estimate_mean_weights(mean_dataset(ds.labels(), scaled), 0.0);
        CHECK(ws.weights.as_vector()(k) ==
              doctest::Approx(w.weights.as_vector()(k) / c).epsilon(1e-9));
        const VectorXd fit = ds.predictions() * w.weights.as_vector();
        const VectorXd fit_s = scaled * ws.weights.as_vector();
        CHECK((fit - fit_s).lpNorm<Eigen::Infinity>() <= 1e-10 * (1 + fit.norm()));

        // Duplicating a column never worsens the minimized objective.
        MatrixXd dup(ds.N(), 4);
        dup << ds.predictions(), ds.predictions().col(k);
        const WeightEstimate wd = estimate_mean_weights(mean_dataset(ds.labels(), dup));
        const WeightEstimate w0 = estimate_mean_weights(ds);
        const double q0 = mean_objective(w0.moments, w0.weights.as_vector(), ds.n(), ds.N());
        const double qd = mean_objective(wd.moments, wd.weights.as_vector(), ds.n(), ds.N());
        CHECK(qd <= q0 + 1e-10 * (1 + std::abs(q0)));

        // K = 1 ratio form.
        const Dataset one = mean_dataset(ds.labels(), ds.predictions().col(0));
        const VectorXd p = one.predictions().col(0);
        const double pm = p.mean(), ym = one.labels().mean();
        double var = 0, cov = 0;
        for (Index i = 0; i < one.N(); ++i) var += (p(i) - pm) * (p(i) - pm);
        for (Index i = 0; i < one.n(); ++i) cov += (p(i) - pm) * (one.labels()(i) - ym);
        const double ratio =
            (cov / static_cast<double>(one.n())) / (var / static_cast<double>(one.N())) *
            one.unlabeled_fraction();
        CHECK(estimate_mean_weights(one, 0.0).weights.as_vector()(0) ==
              doctest::Approx(ratio).epsilon(1e-12));
    }
}
