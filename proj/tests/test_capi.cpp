#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermokit/thermokit.h"

using nlohmann::json;

namespace {

struct MapDel {
    void operator()(tk_map* m) const { tk_map_free(m); }
};
struct EngineDel {
    void operator()(tk_engine* e) const { tk_engine_free(e); }
};
struct CurveDel {
    void operator()(tk_curve* c) const { tk_curve_free(c); }
};
struct SpectrumDel {
    void operator()(tk_spectrum* s) const { tk_spectrum_free(s); }
};
using Map = std::unique_ptr<tk_map, MapDel>;
using Engine = std::unique_ptr<tk_engine, EngineDel>;
using Curve = std::unique_ptr<tk_curve, CurveDel>;
using Spectrum = std::unique_ptr<tk_spectrum, SpectrumDel>;

Map load(const char* doc) {
    tk_map* m = nullptr;
    REQUIRE(tk_map_from_json(doc, &m) == TK_OK);
    return Map(m);
}

Engine engine(const tk_map* m, const tk_engine_options* o = nullptr) {
    tk_engine* e = nullptr;
    REQUIRE(tk_engine_create(m, o, &e) == TK_OK);
    return Engine(e);
}

std::string take(char* s) {
    std::string out(s ? s : "");
    tk_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("errors carry codes and messages") {
    CHECK(std::string(tk_version()).size() > 0);
    tk_map* m = nullptr;
    CHECK(tk_map_from_json(R"({"family":"gauss","bad":0})", &m) == TK_CONFIG);
    CHECK(m == nullptr);
    CHECK(std::string(tk_last_error()).find("bad") != std::string::npos);
    CHECK(tk_map_from_json(nullptr, &m) == TK_INVALID_ARGUMENT);
    CHECK(tk_map_from_file("/nonexistent.json", &m) == TK_CONFIG);
    auto g = load(R"({"family":"gauss"})");
    CHECK(std::string(tk_last_error()).empty());
    tk_pressure p;
    CHECK(tk_pressure_at(nullptr, 1.0, &p) == TK_INVALID_ARGUMENT);
    CHECK(tk_pressure_at(engine(g.get()).get(), 1.0, nullptr) == TK_INVALID_ARGUMENT);
    tk_map_free(nullptr);
    tk_string_free(nullptr);
}

TEST_CASE("engine options are validated") {
    auto g = load(R"({"family":"gauss"})");
    tk_engine_options o;
    tk_engine_options_default(&o);
    CHECK(o.route == TK_ROUTE_AUTO);
    tk_engine* e = nullptr;
    o.tol = 0.5;
    CHECK(tk_engine_create(g.get(), &o, &e) == TK_CONFIG);
    tk_engine_options_default(&o);
    o.route = TK_ROUTE_INDUCED;
    CHECK(tk_engine_create(g.get(), &o, &e) != TK_OK);
    CHECK(e == nullptr);
}

TEST_CASE("pressure through the C API") {
    auto g = load(R"({"family":"gauss"})");
    auto e = engine(g.get());
    double ts = 0, dim = 0;
    REQUIRE(tk_engine_t_star(e.get(), &ts) == TK_OK);
    REQUIRE(tk_engine_dim(e.get(), &dim) == TK_OK);
    CHECK(ts == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(dim == doctest::Approx(1.0).epsilon(1e-9));
    tk_pressure p;
    REQUIRE(tk_pressure_at(e.get(), 1.0, &p) == TK_OK);
    CHECK(std::abs(p.value) < 1e-11);
    CHECK(p.converged == 1);
    CHECK(p.method == TK_METHOD_CYLINDER);
    REQUIRE(tk_pressure_at(e.get(), 0.4, &p) == TK_OK);
    CHECK(p.infinite == 1);
    CHECK(std::isinf(p.value));
    tk_pressure q;
    REQUIRE(tk_pressure_truncated(g.get(), 1.5, 50, &q) == TK_OK);
    REQUIRE(tk_pressure_at(e.get(), 1.5, &p) == TK_OK);
    CHECK(q.value <= p.value);
    char* s = nullptr;
    REQUIRE(tk_regime_json(e.get(), &s) == TK_OK);
    CHECK(json::parse(take(s)).at("regime").at("regime") == "gauss_like");
}

TEST_CASE("truncated maps and descriptions") {
    auto g = load(R"({"family":"renyi"})");
    tk_map* t = nullptr;
    REQUIRE(tk_map_truncate(g.get(), 5, &t) == TK_OK);
    Map tm(t);
    char* s = nullptr;
    REQUIRE(tk_map_describe(tm.get(), &s) == TK_OK);
    CHECK(take(s).find("5") != std::string::npos);
    REQUIRE(tk_map_to_json(g.get(), &s) == TK_OK);
    CHECK(json::parse(take(s)) == json::parse(R"({"family":"renyi","params":{}})"));
    REQUIRE(tk_map_validate_json(g.get(), 3, &s) == TK_OK);
    CHECK(json::parse(take(s)).at("validation").at("checks").size() > 0);
    CHECK(tk_map_validate_json(g.get(), 50, &s) == TK_CONFIG);
}

TEST_CASE("curves and spectra") {
    auto g = load(R"({"family":"linear_custom","params":{"slopes":[3,1.5]}})");
    auto e = engine(g.get());
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
    tk_curve* c = nullptr;
    REQUIRE(tk_curve_build(e.get(), grid.data(), grid.size(), &c) == TK_OK);
    Curve curve(c);
    CHECK(tk_curve_size(curve.get()) == 4);
    tk_pressure p;
    REQUIRE(tk_curve_point(curve.get(), 0, &p) == TK_OK);
    CHECK(p.value == doctest::Approx(std::log(2.0)));
    CHECK(tk_curve_point(curve.get(), 9, &p) == TK_INVALID_ARGUMENT);
    int mono = 0, conv = 0, br = 0, ok = 0;
    REQUIRE(tk_curve_check(curve.get(), &mono, &conv, &br) == TK_OK);
    CHECK((mono && conv && br));
    REQUIRE(tk_curve_converged(curve.get(), &ok) == TK_OK);
    CHECK(ok == 1);
    double v = 0, d = 0;
    REQUIRE(tk_curve_value(curve.get(), 1.0, &v, &d) == TK_OK);
    CHECK(v == doctest::Approx(std::log(1.0 / 3.0 + 1.0 / 1.5)));
    char* s = nullptr;
    REQUIRE(tk_curve_csv(curve.get(), &s) == TK_OK);
    const std::string csv = take(s);
    CHECK(csv.rfind("# thermokit pressure-curve csv v1\nt,P,lower,upper,N,depth\n", 0) == 0);
    REQUIRE(tk_curve_json(curve.get(), &s) == TK_OK);
    const json cj = json::parse(take(s));
    CHECK(cj.at("schema_version") == TK_SCHEMA_VERSION);
    CHECK(cj.at("points").size() == 4);

    tk_spectrum* sp = nullptr;
    REQUIRE(tk_spectrum_build(curve.get(), nullptr, 0, &sp) == TK_OK);
    Spectrum spec(sp);
    CHECK(tk_spectrum_size(spec.get()) > 10);
    tk_spectrum_point q;
    REQUIRE(tk_spectrum_eval(spec.get(), 0.5 * (std::log(3.0) + std::log(1.5)), &q) == TK_OK);
    CHECK(q.present == 1);
    CHECK(q.L == doctest::Approx(std::log(2.0) / (0.5 * (std::log(3.0) + std::log(1.5)))).epsilon(1e-7));
    REQUIRE(tk_spectrum_features_json(spec.get(), &s) == TK_OK);
    CHECK(json::parse(take(s)).at("features").at("alpha_min") == doctest::Approx(std::log(1.5)));
    const double bad = -1.0;
    CHECK(tk_spectrum_build(curve.get(), &bad, 1, &sp) != TK_OK);
}

TEST_CASE("symbolic layer") {
    int a = 0;
    REQUIRE(tk_rule_allowed(TK_RULE_RENEWAL, 0, 5, 4, &a) == TK_OK);
    CHECK(a == 1);
    REQUIRE(tk_rule_allowed(TK_RULE_N_RENEWAL, 2, 3, 3, &a) == TK_OK);
    CHECK(a == 0);
    CHECK(tk_rule_allowed(TK_RULE_N_RENEWAL, 0, 3, 3, &a) == TK_CONFIG);
    REQUIRE(tk_check_mixing(TK_RULE_RENEWAL, 0, 10, &a) == TK_OK);
    CHECK(a == 1);
    std::vector<tk_gurevich_row> rows(200);
    size_t n = 0;
    long period = 0;
    REQUIRE(tk_gurevich(TK_RULE_RENEWAL, 0, 0.0, 0, 200, 40, rows.data(), &n, &period) == TK_OK);
    CHECK(n > 0);
    CHECK(period == 1);
    CHECK(rows[n - 1].estimate == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    char* s = nullptr;
    CHECK(tk_gurevich_csv(TK_RULE_RENEWAL, 0, 0.0, 0, 10, 100000, &s) == TK_BUDGET);
    auto r = load(R"({"family":"renyi"})");
    REQUIRE(tk_shift_check_json(r.get(), 3, 4, &s) == TK_OK);
    CHECK(json::parse(take(s)).at("report").at("mismatch_count") == 0);
}

TEST_CASE("orbit layer") {
    auto g = load(R"({"family":"gauss"})");
    std::vector<tk_birkhoff_sample> a(16), b(16);
    REQUIRE(tk_sample_lyapunov(g.get(), 16, 500, 7, a.data()) == TK_OK);
    REQUIRE(tk_sample_lyapunov(g.get(), 16, 500, 7, b.data()) == TK_OK);
    for (int i = 0; i < 16; ++i) CHECK(a[i].lambda_hat == b[i].lambda_hat);
    char* s = nullptr;
    CHECK(tk_orbit_csv(g.get(), 100000, 1000000, 1, &s) == TK_BUDGET);
    REQUIRE(tk_cf_json("golden", 12, 0, 256, &s) == TK_OK);
    const json cf = json::parse(take(s));
    CHECK(cf.at("expansion").at("digits") == json(std::vector<int>(12, 1)));
    double la = 0, lb = 0;
    REQUIRE(tk_lyapunov_approximants("golden", 50, 256, &la, &lb) == TK_OK);
    CHECK(std::abs(lb - 2.0 * std::log((1.0 + std::sqrt(5.0)) / 2.0)) < 1e-10);
    CHECK(tk_cf_json("x", 10, 0, 256, &s) == TK_CONFIG);
}

TEST_CASE("report for an affine map passes") {
    auto m = load(R"({"family":"linear_custom","params":{"slopes":[3,1.5]}})");
    char* s = nullptr;
    REQUIRE(tk_report_json(m.get(), nullptr, 1, &s) == TK_OK);
    const json r = json::parse(take(s));
    CHECK(r.at("command") == "report");
    CHECK(r.at("all_pass") == true);
}
