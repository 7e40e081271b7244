#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include <Eigen/Dense>

#include "errors.hpp"
#include "numeric.hpp"
#include "symbolic.hpp"

using namespace thermokit;

namespace {

constexpr long kTable = 50;
using Table = std::set<std::pair<long, long>>;

Table renewal_table() {
    Table t;
    for (long n = 0; n < kTable; ++n) t.insert({0, n});
    for (long n = 1; n < kTable; ++n) t.insert({n, n - 1});
    return t;
}

Table n_renewal_table(long N) {
    Table t;
    for (long i = 0; i <= N; ++i)
        for (long n = 0; n < kTable; ++n) t.insert({i, n});
    for (long k = 0; k <= N; ++k) t.insert({N + 1, k});
    for (long n = N + 2; n + 2 < kTable; ++n) t.insert({n + 2, n + 1});
    return t;
}

Table infinite_renewal_table() {
    Table t;
    for (long n = 0; 2 * n < kTable; ++n)
        for (long k = 0; k < kTable; ++k) t.insert({2 * n, k});
    for (long n = 1; 2 * n - 1 < kTable; ++n) t.insert({2 * n - 1, 2 * n - 2});
    for (long n = 0; 2 * n < kTable; ++n) t.insert({1, 2 * n});
    return t;
}

void compare(const TransitionRule& r, const Table& t) {
    long mismatches = 0;
    for (long i = 0; i < kTable; ++i)
        for (long j = 0; j < kTable; ++j) mismatches += r.allowed(i, j) != (t.count({i, j}) > 0);
    CHECK(mismatches == 0);
}

double spectral_radius(const TransitionRule& r, long cap) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cap, cap);
    for (long i = 0; i < cap; ++i)
        for (long j = 0; j < cap; ++j) A(i, j) = r.allowed(i, j) ? 1.0 : 0.0;
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("rule predicates match literal tables") {
    compare(build_rule(RuleKind::renewal), renewal_table());
    for (long N = 1; N <= 6; ++N) {
        CAPTURE(N);
        compare(build_rule(RuleKind::n_renewal, N), n_renewal_table(N));
    }
    compare(build_rule(RuleKind::infinite_renewal), infinite_renewal_table());
}

TEST_CASE("documented entries") {
    const auto r = build_rule(RuleKind::renewal);
    CHECK(r.allowed(0, 5));
    CHECK(r.allowed(5, 4));
    CHECK_FALSE(r.allowed(5, 3));
    const auto n2 = build_rule(RuleKind::n_renewal, 2);
    CHECK(n2.allowed(3, 0));
    CHECK(n2.allowed(3, 1));
    CHECK(n2.allowed(3, 2));
    CHECK_FALSE(n2.allowed(3, 3));
    const auto inf = build_rule(RuleKind::infinite_renewal);
    for (long k = 0; k < 100; ++k) CHECK(inf.allowed(4, k));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_rule(RuleKind::n_renewal), Error);
    CHECK_THROWS_AS(build_rule(RuleKind::n_renewal, 0), Error);
    CHECK_THROWS_AS(build_rule(RuleKind::renewal, 3), Error);
    CHECK(parse_rule_kind("infinite_renewal") == RuleKind::infinite_renewal);
    CHECK_FALSE(parse_rule_kind("full"));
}

TEST_CASE("capped Gurevich pressure equals the log spectral radius") {
    const std::vector<TransitionRule> rules{build_rule(RuleKind::renewal), build_rule(RuleKind::n_renewal, 2),
                                            build_rule(RuleKind::n_renewal, 3), build_rule(RuleKind::infinite_renewal)};
    for (const auto& r : rules) {
        for (long cap : {8L, 20L, 45L}) {
            CAPTURE(r.describe());
            CAPTURE(cap);
            const auto g = gurevich_pressure(r, CyclePotential::constant(0.0), 0, 400, cap);
            CHECK(g.estimate == doctest::Approx(std::log(spectral_radius(r, cap))).epsilon(1e-6));
            CHECK(g.period == 1);
        }
    }
}

TEST_CASE("estimates do not depend on the base vertex") {
    for (const auto& r : {build_rule(RuleKind::renewal), build_rule(RuleKind::n_renewal, 3), build_rule(RuleKind::infinite_renewal)}) {
        const long cap = 30;
        const auto block = connected_block(r, 0, cap);
        REQUIRE(block.size() > 1);
        const double ref = gurevich_pressure(r, CyclePotential::constant(0.0), 0, 600, cap).estimate;
        for (long b : block) {
            if (b > 12) break;
            CAPTURE(b);
            CHECK(std::abs(gurevich_pressure(r, CyclePotential::constant(0.0), b, 600, cap).estimate - ref) < 1e-9);
        }
    }
}

TEST_CASE("constant potentials shift the pressure") {
    const auto r = build_rule(RuleKind::n_renewal, 2);
    const double base = gurevich_pressure(r, CyclePotential::constant(0.0), 0, 300, 20).estimate;
    for (double c : {-1.5, 0.25, 3.0})
        CHECK(gurevich_pressure(r, CyclePotential::constant(c), 0, 300, 20).estimate == doctest::Approx(base + c).epsilon(1e-12));
}

TEST_CASE("estimates grow with the cap") {
    for (const auto& r : {build_rule(RuleKind::renewal), build_rule(RuleKind::infinite_renewal)}) {
        double prev = -kInf;
        for (long cap : {3L, 5L, 10L, 20L, 40L, 80L}) {
            const double e = gurevich_pressure(r, CyclePotential::constant(0.0), 0, 400, cap).estimate;
            CHECK(e >= prev - 1e-12);
            prev = e;
        }
        if (r.kind() == RuleKind::renewal) CHECK(prev <= std::log(2.0) + 1e-12);
    }
}

TEST_CASE("base off every cycle is an error") {
    const auto r = build_rule(RuleKind::n_renewal, 2);
    CHECK(connected_block(r, 4, 20).empty());
    CHECK_THROWS_AS(gurevich_pressure(r, CyclePotential::constant(0.0), 4, 100, 20), Error);
}

TEST_CASE("mixing") {
    CHECK(check_mixing(build_rule(RuleKind::renewal), 10));
    CHECK(check_mixing(build_rule(RuleKind::n_renewal, 3), 12));
    CHECK(check_mixing(build_rule(RuleKind::infinite_renewal), 15));
    CHECK_FALSE(check_mixing(build_rule(RuleKind::cycle, 4), 10));
    const auto g = gurevich_pressure(build_rule(RuleKind::cycle, 4), CyclePotential::constant(0.0), 0, 40, 10);
    CHECK(g.period == 4);
    CHECK(g.estimate == doctest::Approx(0.0));
}

TEST_CASE("itineraries of renyi truncations code into the block shift") {
    for (long N : {2L, 3L, 4L}) {
        const auto rep = itinerary_conjugacy_check(build_renyi(), N, 4);
        CAPTURE(N);
        CHECK(rep.block == N - 1);
        CHECK(rep.words_checked > 0);
        CHECK(rep.cycles_checked > 0);
        CHECK(rep.mismatch_count == 0);
    }
    CHECK(itinerary_conjugacy_check(build_infinite_mp(0.5), 3, 5).mismatch_count == 0);
    CHECK_THROWS_AS(itinerary_conjugacy_check(build_gauss(), 3, 4), Error);
}

TEST_CASE("periodic points have the requested itinerary") {
    const auto m = build_renyi();
    for (const std::vector<long>& w : std::vector<std::vector<long>>{{2}, {3, 1}, {1, 1, 4}, {2, 5, 3}}) {
        double x = periodic_point(m, w);
        const double x0 = x;
        for (long s : w) {
            CHECK(m.locate(x) == s);
            x = m.forward(s, x);
        }
        CHECK(x == doctest::Approx(x0).epsilon(1e-9));
    }
}
