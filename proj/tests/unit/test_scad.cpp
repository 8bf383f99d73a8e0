#include "doctest.h"
#include "fixtures.hpp"

#include "ivsel/error.hpp"
#include "ivsel/scad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>

using namespace ivsel;
using namespace ivsel::testing;

namespace {

// Proximal map of t * SCAD(.; lambda, a) for t < a - 1.
double scad_prox(double z, double t, double lambda, double a) {
    const double m = std::abs(z);
    const double s = z < 0 ? -1.0 : 1.0;
    if (m <= lambda * (1.0 + t)) return s * std::max(0.0, m - t * lambda);
    if (m <= a * lambda) return s * ((a - 1.0) * m - t * a * lambda) / (a - 1.0 - t);
    return z;
}

// Proximal gradient on the whole objective with step 1/L.
Vector proximal_gradient(const DesignData& d, double lambda, double a) {
    const double n = static_cast<double>(d.n());
    const Matrix gram = d.X.transpose() * d.X / n;
    const double L = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
    const double step = 1.0 / L;
    Vector theta = Vector::Zero(d.p());
    for (int it = 0; it < 200000; ++it) {
        const Vector grad = -d.X.transpose() * (d.y - d.X * theta) / n;
        Vector next = theta - step * grad;
        for (Index j = 0; j < next.size(); ++j) next[j] = scad_prox(next[j], step, lambda, a);
        const double change = (next - theta).cwiseAbs().maxCoeff();
        theta = next;
        if (change < 1e-15) break;
    }
    return theta;
}

}  // namespace

TEST_CASE("scad_penalty") {
    const double l = 1.0, a = 3.7;
    CHECK(scad_penalty(0.5, l, a) == doctest::Approx(0.5));
    CHECK(scad_penalty(-0.5, l, a) == doctest::Approx(0.5));
    CHECK(scad_penalty(1.0, l, a) == doctest::Approx(1.0));
    CHECK(scad_penalty(1.0 + 1e-12, l, a) == doctest::Approx(1.0));
    CHECK(scad_penalty(a, l, a) == doctest::Approx((a + 1.0) / 2.0));
    CHECK(scad_penalty(10.0, l, a) == doctest::Approx((a + 1.0) / 2.0));
    CHECK(scad_penalty(2.0, l, a) == doctest::Approx((2.0 * a * 2.0 - 4.0 - 1.0) / (2.0 * (a - 1.0))));
}

TEST_CASE("scad_threshold is the univariate global minimizer") {
    const double l = 0.8, a = 3.7;
    for (double v : {0.4, 1.0, 2.5}) {
        for (double z = -6.0; z <= 6.0; z += 0.37) {
            const double t = scad_threshold(z, v, l, a);
            auto f = [&](double x) { return 0.5 * v * x * x - z * x + scad_penalty(x, l, a); };
            double best = f(0.0);
            for (double x = -20.0; x <= 20.0; x += 1e-4) best = std::min(best, f(x));
            CHECK(f(t) <= best + 1e-7);
        }
    }
    // unit curvature: the three-segment rule
    CHECK(scad_threshold(0.7, 1.0, 1.0, 3.7) == 0.0);
    CHECK(scad_threshold(1.5, 1.0, 1.0, 3.7) == doctest::Approx(0.5));
    CHECK(scad_threshold(3.0, 1.0, 1.0, 3.7) == doctest::Approx((2.7 * 3.0 - 3.7) / 1.7));
    CHECK(scad_threshold(-5.0, 1.0, 1.0, 3.7) == -5.0);
}

TEST_CASE("scad_initializer") {
    SUBCASE("orthonormal design with a strong signal is unbiased") {
        Rng rng(1);
        const Index n = 40;
        const Matrix Q = Eigen::HouseholderQR<Matrix>(gaussian_matrix(n, 5, rng)).householderQ() * Matrix::Identity(n, 5);
        DesignData d;
        d.X = std::sqrt(static_cast<double>(n)) * Q;
        Vector beta(5);
        beta << 6.0, -5.0, 0.0, 4.5, 0.0;
        d.y = d.X * beta;
        const ScadResult r = scad_initializer(d);
        CHECK(r.converged);
        for (Index j = 0; j < 5; ++j) CHECK(r.theta[j] == doctest::Approx(beta[j]).epsilon(1e-10));
    }
    SUBCASE("zero response") {
        Rng rng(2);
        DesignData d;
        d.X = gaussian_matrix(30, 6, rng);
        d.y = Vector::Zero(30);
        const ScadResult r = scad_initializer(d);
        CHECK(r.theta == Vector::Zero(6));
        CHECK(r.objective == 0.0);
    }
    SUBCASE("agrees with proximal gradient on a strictly convex instance") {
        Rng rng(3);
        DesignData d;
        d.X = 1.6 * gaussian_matrix(50, 10, rng);
        Vector beta = Vector::Zero(10);
        beta << 2.0, -1.2, 0.6, 0.0, 0.0, 3.0, 0.0, 0.3, 0.0, 0.0;
        d.y = d.X * beta + gaussian_vector(50, rng);
        const double min_eig =
            Eigen::SelfAdjointEigenSolver<Matrix>(d.X.transpose() * d.X / 50.0).eigenvalues().minCoeff();
        REQUIRE(min_eig > 1.0 / 2.7);
        ScadOptions opt;
        opt.tolerance = 1e-12;
        const ScadResult r = scad_initializer(d, opt);
        const Vector oracle = proximal_gradient(d, opt.lambda, opt.a);
        CHECK(r.objective == doctest::Approx(scad_objective(d, oracle, opt.lambda, opt.a)).epsilon(1e-6));
        CHECK((r.theta - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("pass limit reports non-convergence") {
        Rng rng(4);
        DesignData d;
        d.X = gaussian_matrix(30, 8, rng);
        d.X.col(1) = d.X.col(0) + 0.01 * gaussian_vector(30, rng);
        d.y = d.X * Vector::Ones(8);
        ScadOptions opt;
        opt.max_passes = 1;
        const ScadResult r = scad_initializer(d, opt);
        CHECK_FALSE(r.converged);
        CHECK(r.passes == 1);
        CHECK(r.objective == doctest::Approx(scad_objective(d, r.theta, opt.lambda, opt.a)));
    }
    SUBCASE("argument checks") {
        DesignData d;
        d.X = Matrix::Ones(3, 1);
        d.y = Vector::Ones(3);
        ScadOptions opt;
        opt.a = 2.0;
        CHECK_THROWS_AS(scad_initializer(d, opt), Error);
        opt.a = 3.7;
        opt.lambda = 0.0;
        CHECK_THROWS_AS(scad_initializer(d, opt), Error);
    }
}
