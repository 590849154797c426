#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hj/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hj/core1d.hpp"
#include "hj/hopf_solver.hpp"
#include "hj/initial_costs.hpp"
#include "support.hpp"

namespace ic = hj::initial_costs;
using hj::core1d::PotentialParams1D;
using hj::hopf::ProblemSpec;

TEST_CASE("grid search finds the minimum of a smooth bowl") {
    const double found = hj::oracle::grid_argmin_1d(
        [](double p) { return (p - 2.0) * (p - 2.0); }, -10.0, 10.0, 1'000'000);
    CHECK(std::abs(found - 2.0) <= 4e-5);  // two grid cells, before refinement
    CHECK(std::abs(found - 2.0) <= 1e-7);  // golden-section refinement tightens it

    // non-finite patches are skipped as long as something is finite
    const double guarded = hj::oracle::grid_argmin_1d(
        [](double p) {
            return p < 0.0 ? std::numeric_limits<double>::infinity() : (p - 1.0) * (p - 1.0);
        },
        -10.0, 10.0, 100000);
    CHECK(std::abs(guarded - 1.0) <= 1e-3);
}

TEST_CASE("grid search rejects degenerate requests") {
    const auto flat = [](double) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(hj::oracle::grid_argmin_1d(flat, -1.0, 1.0, 100), std::runtime_error);
    const auto bowl = [](double p) { return p * p; };
    CHECK_THROWS_AS(hj::oracle::grid_argmin_1d(bowl, 1.0, -1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(hj::oracle::grid_argmin_1d(bowl, -1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("equation residual separates true and perturbed solutions") {
    const PotentialParams1D params(1.3, 0.8);
    const double p = 0.7;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(1, 1);
    const auto truth = [&](const Eigen::VectorXd& x, double t) {
        return hj::core1d::value(x[0], t, p, params);
    };
    const auto skewed = [&](const Eigen::VectorXd& x, double t) {
        return truth(x, t) + 0.05 * t;
    };
    const auto potential = [&](const Eigen::VectorXd& x) {
        return hj::core1d::potential(x[0], params);
    };

    std::mt19937_64 eng(5001);
    const double h = 1e-4;
    int tested = 0;
    for (int k = 0; k < 500 && tested < 40; ++k) {
        const double x = testutil::uniform_in(eng, -4.0, 4.0);
        const double t = testutil::uniform_in(eng, 0.2, 2.0);
        if (std::abs(x) < 4.0 * h) continue;
        // keep the finite-difference stencil inside one smooth piece
        const auto probe = [&](double xx, double tt) {
            return hj::core1d::classify_region(xx, tt, p, params);
        };
        const auto r0 = probe(x, t);
        if (probe(x - h, t) != r0 || probe(x + h, t) != r0 || probe(x, t - h) != r0 ||
            probe(x, t + h) != r0) {
            continue;
        }
        ++tested;
        Eigen::VectorXd xv(1);
        xv << x;
        CHECK(hj::oracle::pde_residual(truth, xv, t, identity, potential, h) <= 1e-5);
        CHECK(hj::oracle::pde_residual(skewed, xv, t, identity, potential, h) >= 0.04);
    }
    CHECK(tested >= 40);
}

TEST_CASE("path cost of trivial paths is exact") {
    const int n = 2;
    Eigen::VectorXd a(n), b(n);
    a << 1.5, 2.0;
    b << 0.7, 1.1;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    const ic::InitialCostSpec cost{ic::Quadratic{Eigen::VectorXd::Ones(n), 1.0, 0.0}};
    const auto potential = [&](const Eigen::VectorXd& z) {
        return hj::oracle::two_slope_potential(a, b, z);
    };
    const auto initial = [&](const Eigen::VectorXd& z) { return ic::evaluate(cost, z); };

    // standing still: cost = Phi(x0) - t * U(x0)
    const Eigen::VectorXd x0 = (Eigen::VectorXd(n) << 0.8, -1.2).finished();
    const double t = 0.9;
    hj::oracle::SampledPath still;
    still.horizon = t;
    still.position = [x0](double) { return x0; };
    still.velocity = [n](double) { return Eigen::VectorXd::Zero(n); };
    const double got = hj::oracle::trajectory_cost(still, potential, initial, identity, 64);
    const double want = initial(x0) - t * potential(x0);
    CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));

    // straight line in the positive orthant: every integrand piece is smooth
    const Eigen::VectorXd start = (Eigen::VectorXd(n) << 1.0, 2.0).finished();
    const Eigen::VectorXd vel = (Eigen::VectorXd(n) << 0.5, 0.25).finished();
    hj::oracle::SampledPath line;
    line.horizon = t;
    line.position = [start, vel](double s) { return Eigen::VectorXd(start + s * vel); };
    line.velocity = [vel](double) { return vel; };
    const double kinetic = 0.5 * vel.squaredNorm() * t;
    double drift = 0.0;  // integral of sum_i a_i gamma_i(s) over [0, t]
    for (int i = 0; i < n; ++i) {
        drift += a[i] * (t * start[i] + 0.5 * t * t * vel[i]);
    }
    const double line_want = initial(start) + kinetic + drift;
    const double line_got = hj::oracle::trajectory_cost(line, potential, initial, identity, 64);
    CHECK(std::abs(line_got - line_want) <= 1e-12 * (1.0 + std::abs(line_want)));
}

TEST_CASE("two-slope potential matches the scalar kernel") {
    Eigen::VectorXd a(3), b(3), z(3);
    a << 1.0, 2.0, 3.0;
    b << 0.5, 1.5, 2.5;
    z << 1.0, -1.0, 0.0;
    CHECK(hj::oracle::two_slope_potential(a, b, z) == doctest::Approx(-2.5).epsilon(1e-14));
    std::mt19937_64 eng(5002);
    for (int k = 0; k < 200; ++k) {
        const Eigen::VectorXd zz = testutil::uniform_vector(eng, 3, -4.0, 4.0);
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            sum += hj::core1d::potential(zz[i], PotentialParams1D(a[i], b[i]));
        }
        CHECK(hj::oracle::two_slope_potential(a, b, zz) == doctest::Approx(sum).epsilon(1e-14));
    }
}

TEST_CASE("direct descent reproduces the drift-free closed form") {
    Eigen::VectorXd tiny = Eigen::VectorXd::Constant(1, 1e-6);
    Eigen::VectorXd y(1);
    y << 1.0;
    const ProblemSpec spec(tiny, tiny, ic::Quadratic{y, 1.0, 0.0});
    std::mt19937_64 eng(5003);
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd x(1);
        x << testutil::uniform_in(eng, -3.0, 3.0);
        const double t = testutil::uniform_in(eng, 0.2, 1.5);
        const double direct = hj::oracle::direct_oc_solve(x, t, spec, 200, 1e-9);
        // with a vanishing potential the minimizing path is a straight line
        const double closed = (x[0] - 1.0) * (x[0] - 1.0) / (2.0 * (1.0 + t));
        CHECK(std::abs(direct - closed) <= 1e-3 * (1.0 + std::abs(closed)));
    }
}

TEST_CASE("direct descent approaches the analytic solver at desk scale") {
    std::mt19937_64 eng(5004);
    for (int n : {1, 2}) {
        const Eigen::VectorXd a = testutil::uniform_vector(eng, n, 1.0, 3.0);
        const Eigen::VectorXd b = testutil::uniform_vector(eng, n, 1.0, 3.0);
        const ProblemSpec spec(a, b,
                               ic::Quadratic{testutil::uniform_vector(eng, n, -1.0, 1.0), 1.0,
                                             0.0});
        for (int k = 0; k < 4; ++k) {
            const Eigen::VectorXd x = testutil::uniform_vector(eng, n, -2.0, 2.0);
            const double t = testutil::uniform_in(eng, 0.2, 0.6);
            const double truth = hj::hopf::solve(x, t, spec).value;

            const hj::oracle::DirectOcRun coarse = hj::oracle::direct_oc_run(x, t, spec, 200, 1e-9);
            CHECK(coarse.iterations > 0);
            CHECK((coarse.path.row(coarse.path.rows() - 1).transpose() - x).norm() == 0.0);
            CHECK(std::abs(coarse.value - truth) <= 1e-2 * (1.0 + std::abs(truth)));

            // warm-started refinement stays consistent at a finer discretization
            const hj::oracle::DirectOcRun fine =
                hj::oracle::direct_oc_run(x, t, spec, 400, 1e-9, coarse.path);
            CHECK(std::abs(fine.value - truth) <= 1e-2 * (1.0 + std::abs(truth)));
        }
    }
}

TEST_CASE("reference computations validate their inputs") {
    hj::oracle::OracleConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.fd_step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = hj::oracle::OracleConfig{};
    cfg.grid_points = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    Eigen::VectorXd one = Eigen::VectorXd::Ones(4);
    const ProblemSpec big(one, one, ic::Quadratic{one, 1.0, 0.0});
    CHECK_THROWS_AS(hj::oracle::direct_oc_solve(one, 0.5, big, 100, 1e-9),
                    std::invalid_argument);  // desk scale is n <= 3

    Eigen::VectorXd two = Eigen::VectorXd::Ones(2);
    const ProblemSpec ok(two, two, ic::Quadratic{two, 1.0, 0.0});
    CHECK_THROWS_AS(hj::oracle::direct_oc_solve(two, 0.0, ok, 100, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(hj::oracle::direct_oc_solve(two, 0.5, ok, 0, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        hj::oracle::direct_oc_run(two, 0.5, ok, 100, 1e-9, Eigen::MatrixXd::Zero(1, 5)),
        std::invalid_argument);
}
