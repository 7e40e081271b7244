#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cylinders.hpp"
#include "errors.hpp"
#include "pressure.hpp"

using namespace thermokit;

namespace {

double log_sum_slopes(const std::vector<double>& s, double t) {
    double acc = 0.0;
    for (double v : s) acc += std::pow(v, -t);
    return std::log(acc);
}

const PressureEngine& engine_for(Family f) {
    static const PressureEngine gauss(build_gauss());
    static const PressureEngine renyi(build_renyi());
    static const PressureEngine mp(build_infinite_mp(0.5));
    switch (f) {
        case Family::renyi: return renyi;
        case Family::infinite_mp: return mp;
        default: return gauss;
    }
}

}  // namespace

TEST_CASE("affine maps reproduce the closed form") {
    for (const auto& s : std::vector<std::vector<double>>{{3.0, 1.5}, {2.0, 2.0}, {5.0, 5.0, 2.5}, {4.0, 4.0, 8.0, 8.0, 8.0, 8.0}}) {
        const PressureEngine e(build_linear_from_slopes(s));
        for (double t = -1.0; t <= 4.0; t += 0.25) {
            const auto p = e.pressure(t);
            CHECK(p.value == doctest::Approx(log_sum_slopes(s, t)).epsilon(1e-12));
            CHECK(p.lower <= p.value);
            CHECK(p.upper >= p.value);
        }
    }
}

TEST_CASE("large |t| stays finite") {
    const std::vector<double> s{2.27253, 2.21836};
    const PressureEngine e(build_linear_from_slopes(s));
    for (double t : {-1000.0, -300.0, 300.0, 1000.0}) {
        CAPTURE(t);
        const double exact = t > 0 ? -t * std::log(s[1]) + std::log1p(std::pow(s[1] / s[0], t))
                                   : -t * std::log(s[0]) + std::log1p(std::pow(s[1] / s[0], -t));
        CHECK(e.pressure(t).value == doctest::Approx(exact).epsilon(1e-12));
    }
    double prev = -kInf;
    for (long N : {4L, 16L, 64L}) {
        const double p = pressure_truncated(build_renyi(), -40.0, N).value;
        CHECK(std::isfinite(p));
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("brute-force cylinder brackets contain the truncated pressure") {
    for (const auto& m : {build_gauss(), build_renyi(), build_infinite_mp(0.5)}) {
        CAPTURE(m.describe());
        for (double t : {0.4, 0.8, 1.3}) {
            for (long N : {3L, 6L}) {
                const auto b = pressure_cylinder(m, t, N, 6);
                const auto p = pressure_truncated(m, t, N);
                // depth-d brackets are exact up to the distortion of the depth-d cylinders
                CHECK(p.value >= b.lower - 1e-12);
                CHECK(p.value <= b.upper + 1e-12);
            }
        }
    }
}

TEST_CASE("the truncated pressure grows to the full pressure") {
    for (Family f : {Family::gauss, Family::renyi}) {
        const auto& e = engine_for(f);
        for (double t : {0.7, 1.0, 1.6}) {
            double prev = -kInf;
            for (long N : {2L, 5L, 20L, 80L, 320L}) {
                const double p = pressure_truncated(e.model(), t, N).value;
                CHECK(p >= prev - 1e-12);
                prev = p;
            }
            CHECK(prev <= e.pressure(t).value + 1e-9);
        }
    }
}

TEST_CASE("gauss pressure: critical point, zero at one, slope at one") {
    const auto& e = engine_for(Family::gauss);
    CHECK(e.t_star() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(critical_t(e.model()) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(e.pressure(1.0).value) < 1e-11);
    CHECK(e.dim_estimate() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e.pressure(0.45).infinite);
    CHECK(e.pressure(0.5).infinite);
    const double h = 1e-4;
    const double d = (e.pressure(1.0 + h).value - e.pressure(1.0 - h).value) / (2 * h);
    CHECK(-d == doctest::Approx(M_PI * M_PI / (6.0 * std::log(2.0))).epsilon(1e-6));
    CHECK(e.pressure(2.0).value < 0.0);
}

TEST_CASE("renyi pressure vanishes from the dimension on") {
    const auto& e = engine_for(Family::renyi);
    CHECK(e.t_star() == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(e.dim_estimate() == doctest::Approx(1.0).epsilon(1e-6));
    for (double t : {1.0, 1.2, 2.0}) CHECK(std::abs(e.pressure(t).value) < 1e-9);
    for (double t : {0.55, 0.7, 0.9}) CHECK(e.pressure(t).value > 0.0);
    CHECK(e.pressure(0.45).infinite);
}

TEST_CASE("routes agree for the parabolic models") {
    for (Family f : {Family::renyi, Family::infinite_mp}) {
        const auto& e = engine_for(f);
        for (double t : {0.65, 0.85}) {
            const auto a = e.pressure_by(t, Route::cylinder);
            const auto b = e.pressure_by(t, Route::induced);
            CAPTURE(t);
            CHECK(a.method == Method::cylinder);
            CHECK(b.method == Method::induced);
            CHECK(std::abs(a.value - b.value) <= a.error + b.error);
        }
    }
}

TEST_CASE("induced branches tile the base and expand") {
    const auto& e = engine_for(Family::renyi);
    const auto* s = e.induced();
    REQUIRE(s);
    const auto br = s->branches(6, 40);
    CHECK(br.size() == 5 * 40);
    double total = 0.0;
    for (const auto& b : br) {
        CHECK(s->base().contains(b.interval, 1e-15));
        CHECK(b.deriv_inf >= 1.0);
        CHECK(b.deriv_sup >= b.deriv_inf);
        total += b.interval.length();
    }
    CHECK(total < s->base().length());
    // the q-root of the two-variable pressure is the pressure
    const double t = 0.7, q = s->pressure(t).value;
    CHECK(std::abs(s->two_var_pressure(t, q).value) < 1e-9);
    CHECK(s->two_var_pressure(t, q + 0.1).value < s->two_var_pressure(t, q).value);
    CHECK(s->dim_estimate() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("induced route needs a parabolic map") {
    EngineOptions o;
    o.route = Route::induced;
    CHECK_THROWS_AS(PressureEngine(build_gauss(), o), Error);
}

TEST_CASE("regimes") {
    CHECK(classify_regime(engine_for(Family::gauss)).regime == Regime::gauss_like);
    CHECK(classify_regime(engine_for(Family::renyi)).regime == Regime::renyi_like);
    CHECK(classify_regime(engine_for(Family::infinite_mp)).regime == Regime::infinite_mp_like);
    const PressureEngine path(build_pathological(5));
    CHECK(classify_regime(path).regime == Regime::degenerate);
    CHECK(path.pressure(0.9).infinite);
    CHECK(path.pressure(1.0).value == 0.0);
    CHECK(classify_regime(build_linear_from_slopes({3.0, 1.5})).regime == Regime::gauss_like);
}

TEST_CASE("mp left derivative at the dimension is positive") {
    const auto d = left_derivative_at_dim(engine_for(Family::infinite_mp));
    CHECK(d.value > 0.1);
    CHECK(d.error < 0.05 * d.value);
}

TEST_CASE("curves are monotone, convex and bracketed") {
    for (Family f : {Family::gauss, Family::renyi, Family::infinite_mp}) {
        auto e = std::shared_ptr<const PressureEngine>(&engine_for(f), [](const PressureEngine*) {});
        const auto c = PressureCurve::build(e);
        const auto chk = check_curve(c.points());
        CHECK(chk.monotone);
        CHECK(chk.convex);
        CHECK(chk.bracketed);
        CHECK(c.converged());
        // the interpolant against fresh engine values
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(c.lo(), c.hi());
        for (int i = 0; i < 10; ++i) {
            const double t = u(rng);
            CHECK(c.value(t) == doctest::Approx(e->pressure(t).value).epsilon(1e-9));
            CHECK(c.derivative(t) <= 0.0);
            CHECK(c.second_derivative(t) >= -1e-6);
        }
    }
}

TEST_CASE("tolerance knob and depth cap reach the result") {
    EngineOptions o;
    o.solve.tol = 1e-6;
    const PressureEngine loose(build_gauss(), o);
    const auto p = loose.pressure(1.5);
    CHECK(p.value == doctest::Approx(engine_for(Family::gauss).pressure(1.5).value).epsilon(1e-5));
    o.solve.depth_cap = 1;
    const PressureEngine capped(build_gauss(), o);
    CHECK_FALSE(capped.pressure(1.5).converged);
}
