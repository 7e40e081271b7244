#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "io.hpp"
#include "maps.hpp"
#include "validate.hpp"

using namespace thermokit;

namespace {

std::vector<MapModel> zoo() {
    return {build_gauss(), build_renyi(), build_infinite_mp(0.5), build_infinite_mp(1.0), build_pathological(5),
            build_linear_from_slopes({3.0, 1.5}), build_linear_from_slopes({2.0, 4.0, 4.0})};
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return static_cast<ErrorCode>(0);
}

}  // namespace

TEST_CASE("branches invert and match their derivative") {
    for (const auto& m : zoo()) {
        CAPTURE(m.describe());
        const long lim = std::min<long>(m.branch_count().value_or(30), 30);
        for (long n = 1; n <= lim; ++n) {
            const auto I = m.branch(n).interval;
            CHECK(I.lo < I.hi);
            for (double y : {0.1, 0.37, 0.8}) {
                const double x = m.inverse(n, y);
                CHECK(x >= I.lo - 1e-15);
                CHECK(x <= I.hi + 1e-15);
                CHECK(m.forward(n, x) == doctest::Approx(y).epsilon(1e-10));
                const double h = 1e-6 * I.length();
                const double fd = (m.forward(n, x + h) - m.forward(n, x - h)) / (2 * h);
                CHECK(std::abs(m.derivative(n, x)) == doctest::Approx(std::abs(fd)).epsilon(1e-5));
                CHECK(m.log_inverse_jacobian(n, y) == doctest::Approx(-std::log(std::abs(m.derivative(n, x)))).epsilon(1e-9));
                CHECK(m.locate(x) == n);
            }
        }
    }
}

TEST_CASE("branches are disjoint and ordered for the classical maps") {
    const auto g = build_gauss();
    for (long n = 1; n < 100; ++n) CHECK(g.branch(n + 1).interval.hi == doctest::Approx(g.branch(n).interval.lo));
    const auto r = build_renyi();
    CHECK(r.branch(1).interval.lo == 0.0);
    CHECK(r.branch(1).interval.hi == doctest::Approx(0.5));
    for (long n = 1; n < 100; ++n) CHECK(r.branch(n).interval.hi == doctest::Approx(r.branch(n + 1).interval.lo));
}

TEST_CASE("parabolic point and its branch") {
    for (const auto& m : {build_renyi(), build_infinite_mp(0.5)}) {
        const auto p = m.parabolic();
        REQUIRE(p);
        CHECK(p->point == 0.0);
        CHECK(p->branch == 1);
        CHECK(m.derivative(1, 1e-12) == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK_FALSE(build_gauss().parabolic());
}

TEST_CASE("truncation keeps the first N branches") {
    const auto g = build_gauss();
    const auto t = truncate(g, 7);
    CHECK(t.finite());
    CHECK(*t.branch_count() == 7);
    CHECK(t.branch(7).interval.lo == g.branch(7).interval.lo);
    CHECK_FALSE(t.tail(0.5));
    CHECK(code_of([&] { (void)t.branch(8); }) != static_cast<ErrorCode>(0));
    CHECK(code_of([&] { (void)truncate(g, 0); }) != static_cast<ErrorCode>(0));
}

TEST_CASE("pathological branches pack into the right half") {
    const auto m = build_pathological(5);
    CHECK(m.non_condition5());
    double prev = 0.5;
    for (long n = 2; n < 5000; ++n) {
        const auto I = m.branch(n).interval;
        CHECK(I.lo >= prev - 1e-15);
        CHECK(I.length() == doctest::Approx(1.0 / pathological_slope(n + 4)));
        prev = I.hi;
    }
    CHECK(prev < 1.0);
    CHECK(pathological_slope(10) > pathological_slope(9));
}

TEST_CASE("validation passes for the builtin families") {
    for (const auto& m : {build_gauss(), build_renyi(), build_infinite_mp(0.5), build_linear_from_slopes({3.0, 1.5})}) {
        CAPTURE(m.describe());
        const auto v = validate(m, 4);
        for (const auto& c : v.checks) {
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.pass);
        }
        CHECK(v.inverse_error < 1e-10);
    }
    const auto g = validate(build_gauss(), 4);
    CHECK(g.gamma == doctest::Approx(2.0).epsilon(0.05));
    CHECK(g.expansion_m >= 1);
}

TEST_CASE("map JSON round trip") {
    for (const auto& m : zoo()) {
        const Json j = map_to_json(m);
        const auto back = map_from_json(j);
        CHECK(map_to_json(back) == j);
        CHECK(back.describe() == m.describe());
    }
}

TEST_CASE("map JSON rejects malformed documents as config errors") {
    const char* bad[] = {
        R"({"family":"gauss","extra":1})",
        R"({"family":"gauss","params":{"beta":1}})",
        R"({"family":"nope"})",
        R"({"params":{}})",
        R"({"family":"infinite_mp","params":{}})",
        R"({"family":"infinite_mp","params":{"beta":-1}})",
        R"({"family":"pathological","params":{"N":5,"gamma":2}})",
        R"({"family":"linear_custom","params":{"slopes":[3,1.5],"branches":[]}})",
        R"({"family":"linear_custom","params":{"slopes":[0.5]}})",
        R"({"family":"linear_custom","params":{"branches":[{"interval":[0,0.5],"slope":2,"x":1}]}})",
        R"(not json)",
    };
    for (const char* b : bad) {
        CAPTURE(b);
        CHECK(code_of([&] { (void)map_from_text(b); }) == ErrorCode::config);
    }
    CHECK(code_of([] { (void)map_from_file("/nonexistent/map.json"); }) == ErrorCode::config);
}

TEST_CASE("format_number is shortest round trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(kInf) == "inf");
    CHECK(format_number(-kInf) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(number(kInf).is_null());
}

TEST_CASE("CSV tables carry a versioned header") {
    CsvTable t("demo", {"a", "b"});
    t.add({"1", "2"});
    CHECK(t.str() == "# thermokit demo csv v1\na,b\n1,2\n");
    CHECK(code_of([&] { t.add({"1"}); }) != static_cast<ErrorCode>(0));
    const Json d = document("demo");
    CHECK(d.at("schema_version") == kSchemaVersion);
    CHECK(d.at("command") == "demo");
}
