#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hj/core1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "support.hpp"

using hj::core1d::PotentialParams1D;
using hj::core1d::RegionId;

namespace {

// Independently arranged closed forms for the five pieces of the value
// function.  They are algebraically equal to the library's expressions but
// grouped differently, so agreement checks exercise real arithmetic instead
// of comparing an expression with itself.
double lit_no_crossing_pos(double x, double t, double p, double a) {
    return -(a * a / 6.0) * t * t * t - 0.5 * a * p * t * t + a * t * x - 0.5 * p * p * t +
           p * x;
}

double lit_no_crossing_neg(double x, double t, double p, double b) {
    return -(b * b / 6.0) * t * t * t + 0.5 * b * p * t * t - 0.5 * p * p * t + p * x -
           b * t * x;
}

double lit_one_crossing(double x, double t, double p, double a, double b) {
    const double big_a = b * t - p;
    const double disc = big_a * big_a + 2.0 * x * (a + 2.0 * b);
    return (a + b) / (3.0 * (a + 2.0 * b) * (a + 2.0 * b)) *
               (big_a * big_a * big_a + std::pow(disc, 1.5)) -
           b * x * big_a / (a + 2.0 * b) - (b * b / 6.0) * t * t * t + 0.5 * b * p * t * t -
           0.5 * p * p * t;
}

double lit_parked_pos(double x, double p, double a, double b) {
    return std::sqrt(8.0 * a * x * x * x) / 3.0 - p * p * p / (6.0 * b);
}

double lit_parked_neg(double x, double p, double b) {
    return std::sqrt(8.0 * b * (-x) * (-x) * (-x)) / 3.0 - p * p * p / (6.0 * b);
}

double lit_value_nonneg(double x, double t, double p, double a, double b) {
    if (x >= p * t + 0.5 * a * t * t) return lit_no_crossing_pos(x, t, p, a);
    if (x >= 0.0) {
        double best = lit_one_crossing(x, t, p, a, b);
        if (p <= t * b) best = std::max(best, lit_parked_pos(x, p, a, b));
        return best;
    }
    const double d = t - p / b;
    if (d >= 0.0 && x >= -0.5 * b * d * d) return lit_parked_neg(x, p, b);
    return lit_no_crossing_neg(x, t, p, b);
}

double lit_value(double x, double t, double p, double a, double b) {
    if (t == 0.0) return p * x;
    return p >= 0.0 ? lit_value_nonneg(x, t, p, a, b) : lit_value_nonneg(-x, t, -p, b, a);
}

struct Sample {
    double x, t, p, a, b;
};

Sample draw_sample(std::mt19937_64& eng) {
    Sample s;
    s.x = testutil::uniform_in(eng, -5.0, 5.0);
    s.t = testutil::uniform_in(eng, 0.05, 3.0);
    s.p = testutil::uniform_in(eng, -5.0, 5.0);
    s.a = testutil::uniform_in(eng, 0.5, 4.0);
    s.b = testutil::uniform_in(eng, 0.5, 4.0);
    return s;
}

}  // namespace

TEST_CASE("time zero reproduces the linear pairing exactly") {
    std::mt19937_64 eng(1001);
    for (int k = 0; k < 20000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        CHECK(hj::core1d::value(s.x, 0.0, s.p, params) == s.p * s.x);
    }
    CHECK(hj::core1d::value(1.0, 0.0, 3.0, PotentialParams1D(4.0, 3.0)) == 3.0);
}

TEST_CASE("two-slope potential shape") {
    const PotentialParams1D params(2.0, 3.0);
    CHECK(hj::core1d::potential(1.0, params) == -2.0);
    CHECK(hj::core1d::potential(-1.0, params) == -3.0);
    CHECK(hj::core1d::potential(0.0, params) == 0.0);
    std::mt19937_64 eng(1002);
    for (int k = 0; k < 1000; ++k) {
        const double x = testutil::uniform_in(eng, -10.0, 10.0);
        CHECK(hj::core1d::potential(x, params) <= 0.0);
    }
}

TEST_CASE("region classification on hand-picked points") {
    const PotentialParams1D unit(1.0, 1.0);
    CHECK(hj::core1d::classify_region(1.0, 1.0, 0.0, unit) == RegionId::Omega1);
    CHECK(hj::core1d::classify_region(-1.0, 1.0, 0.0, unit) == RegionId::Omega2);
    CHECK(hj::core1d::classify_region(0.5, 1.0, 2.0, unit) == RegionId::Omega3);
    CHECK(hj::core1d::classify_region(0.0, 2.0, 1.0, unit) == RegionId::Omega4);
    CHECK(hj::core1d::classify_region(-0.25, 2.0, 1.0, unit) == RegionId::Omega5);
}

TEST_CASE("frozen values and derivatives") {
    const PotentialParams1D unit(1.0, 1.0);
    CHECK(hj::core1d::value(1.0, 1.0, 0.0, unit) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(hj::core1d::value(-1.0, 1.0, 0.0, unit) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(hj::core1d::value(0.0, 2.0, 1.0, unit) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));

    CHECK(hj::core1d::value_dp(1.0, 1.0, 0.0, unit) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hj::core1d::value_dp(0.0, 2.0, 1.0, unit) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(hj::core1d::value_dx(1.0, 1.0, 0.0, unit) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hj::core1d::value_dt(1.0, 1.0, 0.0, unit) == doctest::Approx(0.5).epsilon(1e-14));

    // at t = 0 the value is p*x, so its momentum derivative is x itself
    CHECK(hj::core1d::value_dp(0.7, 0.0, -2.0, unit) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("mirror identity holds bit for bit") {
    std::mt19937_64 eng(1003);
    for (int k = 0; k < 20000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D fwd(s.a, s.b);
        const PotentialParams1D rev(s.b, s.a);
        CHECK(hj::core1d::value(s.x, s.t, s.p, fwd) ==
              hj::core1d::value(-s.x, s.t, -s.p, rev));
        CHECK(hj::core1d::value_dp(s.x, s.t, s.p, fwd) ==
              -hj::core1d::value_dp(-s.x, s.t, -s.p, rev));
    }
}

TEST_CASE("value matches independently arranged closed forms") {
    std::mt19937_64 eng(1004);
    for (int k = 0; k < 30000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double got = hj::core1d::value(s.x, s.t, s.p, params);
        const double want = lit_value(s.x, s.t, s.p, s.a, s.b);
        CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("analytic derivatives satisfy the scalar equation") {
    std::mt19937_64 eng(1005);
    for (int k = 0; k < 20000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double vt = hj::core1d::value_dt(s.x, s.t, s.p, params);
        const double vx = hj::core1d::value_dx(s.x, s.t, s.p, params);
        const double u = hj::core1d::potential(s.x, params);
        const double residual = vt + 0.5 * vx * vx + u;
        const double scale = 1.0 + std::abs(vt) + vx * vx + std::abs(u);
        CHECK(std::abs(residual) <= 1e-9 * scale);
    }
}

TEST_CASE("finite differences confirm the analytic derivatives") {
    std::mt19937_64 eng(1006);
    const double h = 1e-5;
    int tested = 0;
    for (int k = 0; k < 20000 && tested < 4000; ++k) {
        Sample s = draw_sample(eng);
        s.p = std::abs(s.p) + 0.1;  // mirror identity covers p < 0
        if (std::abs(s.x) < 4.0 * h) continue;
        const PotentialParams1D params(s.a, s.b);
        // only difference across points that stay in one closed-form piece
        const RegionId r0 = hj::core1d::classify_region(s.x, s.t, s.p, params);
        const bool stable =
            hj::core1d::classify_region(s.x - h, s.t, s.p, params) == r0 &&
            hj::core1d::classify_region(s.x + h, s.t, s.p, params) == r0 &&
            hj::core1d::classify_region(s.x, s.t - h, s.p, params) == r0 &&
            hj::core1d::classify_region(s.x, s.t + h, s.p, params) == r0 &&
            hj::core1d::classify_region(s.x, s.t, s.p - h, params) == r0 &&
            hj::core1d::classify_region(s.x, s.t, s.p + h, params) == r0;
        if (!stable) continue;
        ++tested;

        const auto v = [&](double x, double t, double p) {
            return hj::core1d::value(x, t, p, params);
        };
        const double fd_x = (v(s.x + h, s.t, s.p) - v(s.x - h, s.t, s.p)) / (2.0 * h);
        const double fd_t = (v(s.x, s.t + h, s.p) - v(s.x, s.t - h, s.p)) / (2.0 * h);
        const double fd_p = (v(s.x, s.t, s.p + h) - v(s.x, s.t, s.p - h)) / (2.0 * h);
        const double ax = hj::core1d::value_dx(s.x, s.t, s.p, params);
        const double at = hj::core1d::value_dt(s.x, s.t, s.p, params);
        const double ap = hj::core1d::value_dp(s.x, s.t, s.p, params);
        CHECK(std::abs(fd_x - ax) <= 1e-5 * (1.0 + std::abs(ax)));
        CHECK(std::abs(fd_t - at) <= 1e-5 * (1.0 + std::abs(at)));
        CHECK(std::abs(fd_p - ap) <= 1e-5 * (1.0 + std::abs(ap)));
    }
    CHECK(tested >= 4000);
}

TEST_CASE("value is concave in the momentum") {
    std::mt19937_64 eng(1007);
    for (int k = 0; k < 10000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double p2 = testutil::uniform_in(eng, -5.0, 5.0);
        const double theta = testutil::uniform_in(eng, 0.0, 1.0);
        const double pm = theta * s.p + (1.0 - theta) * p2;
        const double mid = hj::core1d::value(s.x, s.t, pm, params);
        const double chord = theta * hj::core1d::value(s.x, s.t, s.p, params) +
                             (1.0 - theta) * hj::core1d::value(s.x, s.t, p2, params);
        CHECK(mid >= chord - 1e-9 * (1.0 + std::abs(chord)));
    }
}

TEST_CASE("standing still bounds the value from above") {
    std::mt19937_64 eng(1008);
    for (int k = 0; k < 10000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double v = hj::core1d::value(s.x, s.t, s.p, params);
        const double rest = s.p * s.x - s.t * hj::core1d::potential(s.x, params);
        CHECK(v <= rest + 1e-9 * (1.0 + std::abs(rest)));
    }
}

TEST_CASE("momentum derivative equals the trajectory start") {
    std::mt19937_64 eng(1009);
    for (int k = 0; k < 5000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double start = hj::core1d::trajectory(0.0, s.x, s.t, s.p, params);
        const double dp = hj::core1d::value_dp(s.x, s.t, s.p, params);
        CHECK(std::abs(start - dp) <= 1e-10 * (1.0 + std::abs(dp)));
    }
}

TEST_CASE("trajectory endpoint, breakpoints and continuity") {
    std::mt19937_64 eng(1010);
    for (int k = 0; k < 5000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        CHECK(hj::core1d::trajectory(s.t, s.x, s.t, s.p, params) == s.x);

        const std::vector<double> bps =
            hj::core1d::trajectory_breakpoints(s.x, s.t, s.p, params);
        CHECK(std::is_sorted(bps.begin(), bps.end()));
        for (double tau : bps) {
            CHECK(tau > 0.0);
            CHECK(tau < s.t);
            const double delta = 1e-12;
            const double lo = std::max(0.0, tau - delta);
            const double hi = std::min(s.t, tau + delta);
            const double left = hj::core1d::trajectory(lo, s.x, s.t, s.p, params);
            const double right = hj::core1d::trajectory(hi, s.x, s.t, s.p, params);
            CHECK(std::abs(left - right) <= 1e-9);
        }
    }
}

TEST_CASE("trajectory derivative matches finite differences of the path") {
    std::mt19937_64 eng(1011);
    const double h = 1e-6;
    int tested = 0;
    for (int k = 0; k < 10000 && tested < 2000; ++k) {
        const Sample s = draw_sample(eng);
        const PotentialParams1D params(s.a, s.b);
        const double u = testutil::uniform_in(eng, 0.0, 1.0);
        const double sq = (0.1 + 0.8 * u) * s.t;
        bool clear = sq > 2.0 * h && sq < s.t - 2.0 * h;
        for (double tau : hj::core1d::trajectory_breakpoints(s.x, s.t, s.p, params)) {
            if (std::abs(sq - tau) < 2.0 * h) clear = false;
        }
        if (!clear) continue;
        ++tested;
        const double fd = (hj::core1d::trajectory(sq + h, s.x, s.t, s.p, params) -
                           hj::core1d::trajectory(sq - h, s.x, s.t, s.p, params)) /
                          (2.0 * h);
        const double an = hj::core1d::trajectory_derivative(sq, s.x, s.t, s.p, params);
        CHECK(std::abs(fd - an) <= 1e-6 * (1.0 + std::abs(an)));
    }
    CHECK(tested >= 2000);
}

TEST_CASE("frozen trajectories") {
    const PotentialParams1D unit(1.0, 1.0);
    // straight-characteristic case: gamma(s) = 1/2 + s^2/2
    CHECK(hj::core1d::trajectory(0.0, 1.0, 1.0, 0.0, unit) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hj::core1d::trajectory(0.5, 1.0, 1.0, 0.0, unit) ==
          doctest::Approx(0.625).epsilon(1e-14));
    CHECK(hj::core1d::trajectory_breakpoints(1.0, 1.0, 0.0, unit).empty());

    // kink-parked case: rises from -1/2, parks at the kink from s = 1 on
    CHECK(hj::core1d::trajectory(0.0, 0.0, 2.0, 1.0, unit) ==
          doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(hj::core1d::trajectory(0.5, 0.0, 2.0, 1.0, unit) ==
          doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(hj::core1d::trajectory(1.5, 0.0, 2.0, 1.0, unit) == doctest::Approx(0.0));
    const std::vector<double> bps = hj::core1d::trajectory_breakpoints(0.0, 2.0, 1.0, unit);
    REQUIRE(bps.size() == 1);
    CHECK(bps[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(PotentialParams1D(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialParams1D(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialParams1D(std::nan(""), 1.0), std::invalid_argument);

    const PotentialParams1D unit(1.0, 1.0);
    CHECK_THROWS_AS(hj::core1d::classify_region(0.0, 1.0, -1.0, unit), std::invalid_argument);
    CHECK_THROWS_AS(hj::core1d::value(0.0, -1.0, 0.0, unit), std::invalid_argument);
    CHECK_THROWS_AS(hj::core1d::value(std::nan(""), 1.0, 0.0, unit), std::invalid_argument);
    CHECK_THROWS_AS(hj::core1d::trajectory(0.0, 1.0, 0.0, 0.0, unit), std::invalid_argument);
    CHECK_THROWS_AS(hj::core1d::trajectory(2.0, 1.0, 1.0, 0.0, unit), std::invalid_argument);
    CHECK_THROWS_AS(hj::core1d::trajectory(-0.1, 1.0, 1.0, 0.0, unit), std::invalid_argument);
}
