#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hj/prox1d.hpp"

#include <cmath>
#include <stdexcept>

#include "hj/oracle.hpp"
#include "support.hpp"

using hj::core1d::PotentialParams1D;
using hj::prox1d::Candidate;
using hj::prox1d::NewtonConfig;
using hj::prox1d::ProxQuery;
using hj::prox1d::ProxResult;

namespace {

ProxQuery draw_query(std::mt19937_64& eng) {
    return ProxQuery{testutil::uniform_in(eng, -4.0, 4.0),
                     testutil::uniform_in(eng, 0.05, 2.0),
                     testutil::uniform_in(eng, -5.0, 5.0),
                     testutil::uniform_in(eng, 0.3, 3.0),
                     PotentialParams1D(testutil::uniform_in(eng, 0.5, 4.0),
                                       testutil::uniform_in(eng, 0.5, 4.0))};
}

}  // namespace

TEST_CASE("symmetric query lands on zero") {
    const ProxQuery q{0.0, 1.0, 0.0, 1.0, PotentialParams1D(1.0, 1.0)};
    const ProxResult res = hj::prox1d::prox_neg_value(q);
    CHECK(std::abs(res.p_star) <= 1e-12);
    CHECK(std::abs(hj::prox1d::prox_stationarity(q, res.p_star)) <= 1e-10);
}

TEST_CASE("far-field query solves the straight-characteristic piece in closed form") {
    const ProxQuery q{10.0, 0.1, 0.0, 1.0, PotentialParams1D(1.0, 1.0)};
    const ProxResult res = hj::prox1d::prox_neg_value(q);
    // stationarity of the no-crossing piece: p (t + lambda) = x + lambda c - a t^2 / 2
    CHECK(res.p_star == doctest::Approx(9.995 / 1.1).epsilon(1e-12));
    CHECK(res.candidate_used == Candidate::P1);
}

TEST_CASE("agrees with an exhaustive scan of the objective") {
    std::mt19937_64 eng(2001);
    const double radius = 150.0;
    const long grid = 300000;
    const double spacing = 2.0 * radius / static_cast<double>(grid);
    for (int k = 0; k < 80; ++k) {
        const ProxQuery q = draw_query(eng);
        const ProxResult res = hj::prox1d::prox_neg_value(q);
        const double scanned = hj::oracle::grid_argmin_1d(
            [&](double p) { return hj::prox1d::prox_objective(q, p); }, -radius, radius, grid);
        CHECK(std::abs(res.p_star - scanned) <= 2.0 * spacing);
        const double f_star = hj::prox1d::prox_objective(q, res.p_star);
        const double f_scan = hj::prox1d::prox_objective(q, scanned);
        CHECK(f_star <= f_scan + 1e-10 * (1.0 + std::abs(f_scan)));
    }
}

TEST_CASE("stationarity residual is tiny at the reported minimizer") {
    std::mt19937_64 eng(2002);
    for (int k = 0; k < 3000; ++k) {
        const ProxQuery q = draw_query(eng);
        const ProxResult res = hj::prox1d::prox_neg_value(q);
        CHECK(res.newton_converged);
        CHECK(std::abs(hj::prox1d::prox_stationarity(q, res.p_star)) <= 1e-8);
    }
}

TEST_CASE("no probe beats the reported minimizer") {
    std::mt19937_64 eng(2003);
    for (int k = 0; k < 2000; ++k) {
        const ProxQuery q = draw_query(eng);
        const ProxResult res = hj::prox1d::prox_neg_value(q);
        const double f_star = hj::prox1d::prox_objective(q, res.p_star);
        for (int j = 0; j < 8; ++j) {
            const double probe = testutil::uniform_in(eng, -60.0, 60.0);
            const double f_probe = hj::prox1d::prox_objective(q, probe);
            CHECK(f_star <= f_probe + 1e-9 * (1.0 + std::abs(f_probe)));
        }
    }
}

TEST_CASE("minimizer is monotone in the prox center") {
    std::mt19937_64 eng(2004);
    for (int k = 0; k < 2000; ++k) {
        ProxQuery q = draw_query(eng);
        const double c2 = q.c + testutil::uniform_in(eng, 0.0, 3.0);
        const double p_lo = hj::prox1d::prox_neg_value(q).p_star;
        q.c = c2;
        const double p_hi = hj::prox1d::prox_neg_value(q).p_star;
        CHECK(p_lo <= p_hi + 1e-10);
    }
}

TEST_CASE("mirror symmetry of the minimizer") {
    std::mt19937_64 eng(2005);
    for (int k = 0; k < 2000; ++k) {
        const ProxQuery q = draw_query(eng);
        const ProxQuery m{-q.x, q.t, -q.c, q.lambda,
                          PotentialParams1D(q.params.b, q.params.a)};
        const double p_fwd = hj::prox1d::prox_neg_value(q).p_star;
        const double p_rev = hj::prox1d::prox_neg_value(m).p_star;
        CHECK(std::abs(p_fwd + p_rev) <= 1e-9 * (1.0 + std::abs(p_fwd)));
    }
}

TEST_CASE("fixed iteration budget reproduces the tolerance-mode answer") {
    std::mt19937_64 eng(2006);
    NewtonConfig fixed;
    fixed.fixed_iter_mode = true;
    fixed.fixed_iter_count = 20;
    for (int k = 0; k < 2000; ++k) {
        const ProxQuery q = draw_query(eng);
        const double p_tol = hj::prox1d::prox_neg_value(q).p_star;
        const double p_fix = hj::prox1d::prox_neg_value(q, fixed).p_star;
        CHECK(std::abs(p_tol - p_fix) <= 1e-8 * (1.0 + std::abs(p_tol)));
        // a fixed budget must be bitwise reproducible run to run
        CHECK(hj::prox1d::prox_neg_value(q, fixed).p_star == p_fix);
    }
}

TEST_CASE("warm starts do not move the answer") {
    std::mt19937_64 eng(2007);
    for (int k = 0; k < 1000; ++k) {
        const ProxQuery q = draw_query(eng);
        const ProxResult cold = hj::prox1d::prox_neg_value(q);
        const ProxResult warm = hj::prox1d::prox_neg_value(q, {}, cold.p3);
        CHECK(std::abs(cold.p_star - warm.p_star) <= 1e-10 * (1.0 + std::abs(cold.p_star)));
    }
}

TEST_CASE("invalid queries are rejected") {
    const PotentialParams1D unit(1.0, 1.0);
    CHECK_THROWS_AS(hj::prox1d::prox_neg_value({0.0, 0.0, 0.0, 1.0, unit}),
                    std::invalid_argument);
    CHECK_THROWS_AS(hj::prox1d::prox_neg_value({0.0, 1.0, 0.0, 0.0, unit}),
                    std::invalid_argument);
    CHECK_THROWS_AS(hj::prox1d::prox_neg_value({0.0, 1.0, 0.0, -1.0, unit}),
                    std::invalid_argument);
    CHECK_THROWS_AS(hj::prox1d::prox_neg_value({std::nan(""), 1.0, 0.0, 1.0, unit}),
                    std::invalid_argument);
}
