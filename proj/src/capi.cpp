#include "thermokit/thermokit.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "errors.hpp"
#include "report.hpp"

using namespace thermokit;

struct tk_map {
    MapModel model;
};

struct tk_engine {
    std::shared_ptr<const PressureEngine> engine;
};

struct tk_curve {
    std::shared_ptr<const PressureCurve> curve;
};

struct tk_spectrum {
    std::shared_ptr<const PressureCurve> curve;
    SpectrumCurve spectrum;
};

namespace {

thread_local std::string last_error;

template <class F>
tk_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return TK_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return static_cast<tk_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return TK_BUDGET;
    } catch (const std::exception& e) {
        last_error = e.what();
        return TK_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return TK_INTERNAL;
    }
}

template <class T>
const T& deref(const T* p, const char* what) {
    if (!p) fail(ErrorCode::invalid_argument, std::string("null ") + what);
    return *p;
}

void need(const void* out) {
    if (!out) fail(ErrorCode::invalid_argument, "null output pointer");
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(char** out, const std::string& s) {
    need(out);
    *out = copy_string(s);
}

Route to_route(tk_route r) {
    switch (r) {
        case TK_ROUTE_AUTO: return Route::automatic;
        case TK_ROUTE_CYLINDER: return Route::cylinder;
        case TK_ROUTE_INDUCED: return Route::induced;
    }
    fail(ErrorCode::invalid_argument, "unknown route");
}

tk_method to_method(Method m) {
    switch (m) {
        case Method::cylinder: return TK_METHOD_CYLINDER;
        case Method::induced: return TK_METHOD_INDUCED;
        case Method::closed_form: return TK_METHOD_CLOSED_FORM;
        case Method::degenerate: return TK_METHOD_DEGENERATE;
    }
    return TK_METHOD_CYLINDER;
}

EngineOptions to_options(const tk_engine_options* o) {
    EngineOptions e;
    if (!o) return e;
    e.route = to_route(o->route);
    if (o->cylinder_N < 2 || o->induced_N < 2 || o->induced_J < 2)
        fail(ErrorCode::config, "branch and return-time cutoffs must be at least 2");
    if (!(o->tol > 0.0) || o->tol > 1e-3) fail(ErrorCode::config, "tolerance must lie in (0, 1e-3]");
    if (o->depth_cap < 1) fail(ErrorCode::config, "depth cap must be positive");
    e.cylinder_N = o->cylinder_N;
    e.induced_N = o->induced_N;
    e.induced_J = o->induced_J;
    e.solve.tol = o->tol;
    e.solve.depth_cap = o->depth_cap;
    return e;
}

void fill(tk_pressure* out, double t, const PressureEstimate& e) {
    need(out);
    *out = {t,          e.infinite ? kInf : e.value, e.infinite ? kInf : e.lower, e.infinite ? kInf : e.upper,
            e.error,    e.infinite,                  e.converged,                 e.N,
            e.depth,    to_method(e.method)};
}

void fill(tk_spectrum_point* out, const SpectrumPoint& p) {
    need(out);
    *out = {p.alpha, p.L, p.L_error, p.t_alpha, p.residual, p.residual_error, p.present, p.pinned, p.bound};
}

TransitionRule to_rule(tk_rule_kind kind, long N) {
    RuleKind k;
    switch (kind) {
        case TK_RULE_RENEWAL: k = RuleKind::renewal; break;
        case TK_RULE_N_RENEWAL: k = RuleKind::n_renewal; break;
        case TK_RULE_INFINITE_RENEWAL: k = RuleKind::infinite_renewal; break;
        case TK_RULE_RENEWAL_BLOCK: k = RuleKind::renewal_block; break;
        case TK_RULE_CYCLE: k = RuleKind::cycle; break;
        default: fail(ErrorCode::config, "unknown rule kind");
    }
    const bool takes_N = k == RuleKind::n_renewal || k == RuleKind::renewal_block || k == RuleKind::cycle;
    return build_rule(k, takes_N ? std::optional<long>(N) : std::nullopt);
}

GurevichResult gurevich(tk_rule_kind kind, long N, double phi, long base, long n_max, long cap) {
    if (n_max < 1 || n_max > 1'000'000) fail(ErrorCode::config, "n_max must lie in 1..1e6");
    if (cap < 1 || cap > 4096) fail(ErrorCode::budget, "vertex cap must lie in 1..4096");
    return gurevich_pressure(to_rule(kind, N), CyclePotential::constant(phi), base, n_max, cap);
}

}  // namespace

extern "C" {

const char* tk_version(void) { return "1.0.0"; }
const char* tk_last_error(void) { return last_error.c_str(); }
void tk_string_free(char* s) { std::free(s); }

tk_status tk_map_from_json(const char* json, tk_map** out) {
    return guarded([&] {
        need(out);
        if (!json) fail(ErrorCode::invalid_argument, "null json");
        *out = new tk_map{map_from_text(json)};
    });
}

tk_status tk_map_from_file(const char* path, tk_map** out) {
    return guarded([&] {
        need(out);
        if (!path) fail(ErrorCode::invalid_argument, "null path");
        *out = new tk_map{map_from_file(path)};
    });
}

tk_status tk_map_truncate(const tk_map* map, long N, tk_map** out) {
    return guarded([&] {
        need(out);
        *out = new tk_map{truncate(deref(map, "map").model, N)};
    });
}

tk_status tk_map_describe(const tk_map* map, char** out) {
    return guarded([&] { put(out, deref(map, "map").model.describe()); });
}

tk_status tk_map_to_json(const tk_map* map, char** out) {
    return guarded([&] { put(out, dump(map_to_json(deref(map, "map").model))); });
}

tk_status tk_map_validate_json(const tk_map* map, int depth, char** out) {
    return guarded([&] {
        if (depth < 1 || depth > 10) fail(ErrorCode::config, "validation depth must lie in 1..10");
        const auto& m = deref(map, "map").model;
        Json doc = document("validate-map");
        doc["map"] = map_to_json(m);
        doc["validation"] = to_json(validate(m, depth));
        put(out, dump(doc));
    });
}

void tk_map_free(tk_map* map) { delete map; }

void tk_engine_options_default(tk_engine_options* opts) {
    if (!opts) return;
    const EngineOptions e;
    *opts = {TK_ROUTE_AUTO, e.cylinder_N, e.induced_N, e.induced_J, e.solve.tol, e.solve.depth_cap};
}

tk_status tk_engine_create(const tk_map* map, const tk_engine_options* opts, tk_engine** out) {
    return guarded([&] {
        need(out);
        *out = new tk_engine{std::make_shared<const PressureEngine>(deref(map, "map").model, to_options(opts))};
    });
}

void tk_engine_free(tk_engine* engine) { delete engine; }

tk_status tk_engine_t_star(const tk_engine* engine, double* out) {
    return guarded([&] {
        need(out);
        *out = deref(engine, "engine").engine->t_star();
    });
}

tk_status tk_engine_dim(const tk_engine* engine, double* out) {
    return guarded([&] {
        need(out);
        *out = deref(engine, "engine").engine->dim_estimate();
    });
}

tk_status tk_pressure_at(const tk_engine* engine, double t, tk_pressure* out) {
    return guarded([&] { fill(out, t, deref(engine, "engine").engine->pressure(t)); });
}

tk_status tk_pressure_by(const tk_engine* engine, double t, tk_route route, tk_pressure* out) {
    return guarded([&] { fill(out, t, deref(engine, "engine").engine->pressure_by(t, to_route(route))); });
}

tk_status tk_pressure_truncated(const tk_map* map, double t, long N, tk_pressure* out) {
    return guarded([&] { fill(out, t, pressure_truncated(deref(map, "map").model, t, N)); });
}

tk_status tk_regime_json(const tk_engine* engine, char** out) {
    return guarded([&] {
        const auto& e = *deref(engine, "engine").engine;
        Json doc = document("regime");
        doc["map"] = map_to_json(e.model());
        doc["regime"] = to_json(classify_regime(e));
        if (e.model().parabolic() && !e.degenerate()) doc["left_derivative"] = to_json(left_derivative_at_dim(e));
        put(out, dump(doc));
    });
}

tk_status tk_induced_csv(const tk_engine* engine, long n_cap, long j_cap, char** out) {
    return guarded([&] {
        const auto* s = deref(engine, "engine").engine->induced();
        if (!s) fail(ErrorCode::config, "the model has no induced scheme");
        if (n_cap < 0 || j_cap < 0 || n_cap * std::max(j_cap, 1L) > 10'000'000)
            fail(ErrorCode::budget, "induced dump larger than 1e7 rows");
        put(out, induced_csv(s->branches(n_cap, j_cap)).str());
    });
}

tk_status tk_curve_build(const tk_engine* engine, const double* t_grid, size_t n, tk_curve** out) {
    return guarded([&] {
        need(out);
        const auto& e = deref(engine, "engine").engine;
        if (t_grid) {
            *out = new tk_curve{std::make_shared<const PressureCurve>(
                PressureCurve::build(e, std::span<const double>(t_grid, n)))};
        } else {
            *out = new tk_curve{std::make_shared<const PressureCurve>(PressureCurve::build(e))};
        }
    });
}

void tk_curve_free(tk_curve* curve) { delete curve; }

size_t tk_curve_size(const tk_curve* curve) { return curve ? curve->curve->points().size() : 0; }

tk_status tk_curve_point(const tk_curve* curve, size_t i, tk_pressure* out) {
    return guarded([&] {
        const auto& pts = deref(curve, "curve").curve->points();
        if (i >= pts.size()) fail(ErrorCode::invalid_argument, "point index out of range");
        const auto& p = pts[i];
        need(out);
        *out = {p.t,        p.infinite ? kInf : p.value, p.infinite ? kInf : p.lower, p.infinite ? kInf : p.upper,
                p.error,    p.infinite,                  p.converged,                 p.N,
                p.depth,    to_method(p.method)};
    });
}

tk_status tk_curve_value(const tk_curve* curve, double t, double* value, double* derivative) {
    return guarded([&] {
        const auto& c = *deref(curve, "curve").curve;
        if (!c.covers(t)) fail(ErrorCode::invalid_argument, "t outside the interpolated region");
        if (value) *value = c.value(t);
        if (derivative) *derivative = c.derivative(t);
    });
}

tk_status tk_curve_converged(const tk_curve* curve, int* out) {
    return guarded([&] {
        need(out);
        *out = deref(curve, "curve").curve->converged();
    });
}

tk_status tk_curve_check(const tk_curve* curve, int* monotone, int* convex, int* bracketed) {
    return guarded([&] {
        const auto r = check_curve(deref(curve, "curve").curve->points());
        if (monotone) *monotone = r.monotone;
        if (convex) *convex = r.convex;
        if (bracketed) *bracketed = r.bracketed;
    });
}

tk_status tk_curve_csv(const tk_curve* curve, char** out) {
    return guarded([&] { put(out, pressure_csv(deref(curve, "curve").curve->points()).str()); });
}

tk_status tk_curve_json(const tk_curve* curve, char** out) {
    return guarded([&] {
        const auto& c = *deref(curve, "curve").curve;
        Json doc = document("pressure-curve");
        doc["map"] = map_to_json(c.engine().model());
        doc["regime"] = to_json(classify_regime(c.engine()));
        const auto chk = check_curve(c.points());
        doc["checks"] = {{"monotone", chk.monotone}, {"convex", chk.convex}, {"bracketed", chk.bracketed}};
        Json pts = Json::array();
        for (const auto& p : c.points()) pts.push_back(to_json(p));
        doc["points"] = pts;
        put(out, dump(doc));
    });
}

tk_status tk_spectrum_build(const tk_curve* curve, const double* alpha, size_t n, tk_spectrum** out) {
    return guarded([&] {
        need(out);
        const auto& c = deref(curve, "curve").curve;
        std::vector<double> grid = alpha ? std::vector<double>(alpha, alpha + n)
                                         : default_alpha_grid(thermokit::alpha_min(c->engine().model()));
        *out = new tk_spectrum{c, legendre_spectrum(c, grid)};
    });
}

void tk_spectrum_free(tk_spectrum* spectrum) { delete spectrum; }

size_t tk_spectrum_size(const tk_spectrum* spectrum) { return spectrum ? spectrum->spectrum.points().size() : 0; }

tk_status tk_spectrum_point_at(const tk_spectrum* spectrum, size_t i, tk_spectrum_point* out) {
    return guarded([&] {
        const auto& pts = deref(spectrum, "spectrum").spectrum.points();
        if (i >= pts.size()) fail(ErrorCode::invalid_argument, "point index out of range");
        fill(out, pts[i]);
    });
}

tk_status tk_spectrum_eval(const tk_spectrum* spectrum, double alpha, tk_spectrum_point* out) {
    return guarded([&] { fill(out, deref(spectrum, "spectrum").spectrum.at(alpha)); });
}

tk_status tk_spectrum_csv(const tk_spectrum* spectrum, char** out) {
    return guarded([&] { put(out, spectrum_csv(deref(spectrum, "spectrum").spectrum.points()).str()); });
}

tk_status tk_spectrum_features_json(const tk_spectrum* spectrum, char** out) {
    return guarded([&] {
        const auto& s = deref(spectrum, "spectrum");
        const MapModel& m = s.curve->engine().model();
        Json doc = document("spectrum-features");
        doc["map"] = map_to_json(m);
        doc["features"] = to_json(features(*s.curve, s.spectrum, m));
        put(out, dump(doc));
    });
}

tk_status tk_inflection_json(const tk_spectrum* spectrum, char** out) {
    return guarded([&] {
        const auto& s = deref(spectrum, "spectrum");
        const MapModel& m = s.curve->engine().model();
        const auto f = features(*s.curve, s.spectrum, m);
        const auto rows = inflection_consistency(s.spectrum);
        long significant = 0, disagree = 0;
        Json rj = Json::array();
        for (const auto& r : rows) {
            significant += r.significant;
            disagree += !r.agree;
            rj.push_back({{"alpha", r.alpha},
                          {"residual", number(r.residual)},
                          {"residual_error", number(r.residual_error)},
                          {"second_difference", number(r.second_difference)},
                          {"significant", r.significant},
                          {"agree", r.agree}});
        }
        bool above = true;
        for (double a : f.inflections) above = above && a > f.alpha_star.value;
        Json doc = document("inflection");
        doc["map"] = map_to_json(m);
        doc["alpha_star"] = f.alpha_star.value;
        doc["inflections"] = f.inflections;
        doc["inflections_incomplete"] = f.inflections_incomplete;
        doc["all_exceed_alpha_star"] = above;
        doc["significant_points"] = significant;
        doc["sign_disagreements"] = disagree;
        doc["rows"] = rj;
        put(out, dump(doc));
    });
}

tk_status tk_truncated_spectra_json(const tk_map* map, double alpha, const long* N, size_t n, char** out) {
    return guarded([&] {
        if (!N || n == 0) fail(ErrorCode::config, "empty truncation list");
        const auto& m = deref(map, "map").model;
        Json doc = document("truncated-spectra");
        doc["map"] = map_to_json(m);
        auto engine = std::make_shared<const PressureEngine>(m);
        auto curve = std::make_shared<const PressureCurve>(PressureCurve::build(engine));
        const double grid[] = {alpha};
        const auto full = legendre_spectrum(curve, grid).at(alpha);
        std::optional<double> full_L;
        if (full.present) full_L = full.L;
        doc["result"] = to_json(truncated_spectra(m, alpha, std::span<const long>(N, n), full_L));
        put(out, dump(doc));
    });
}

tk_status tk_rule_allowed(tk_rule_kind kind, long N, long i, long j, int* out) {
    return guarded([&] {
        need(out);
        *out = to_rule(kind, N).allowed(i, j);
    });
}

tk_status tk_check_mixing(tk_rule_kind kind, long N, long cap, int* out) {
    return guarded([&] {
        need(out);
        if (cap < 1 || cap > 4096) fail(ErrorCode::budget, "vertex cap must lie in 1..4096");
        *out = check_mixing(to_rule(kind, N), cap);
    });
}

tk_status tk_gurevich(tk_rule_kind kind, long N, double phi, long base, long n_max, long cap, tk_gurevich_row* rows,
                      size_t* rows_out, long* period) {
    return guarded([&] {
        need(rows);
        need(rows_out);
        const auto r = gurevich(kind, N, phi, base, n_max, cap);
        for (std::size_t i = 0; i < r.sequence.size(); ++i)
            rows[i] = {r.sequence[i].n, r.sequence[i].raw, r.sequence[i].estimate};
        *rows_out = r.sequence.size();
        if (period) *period = r.period;
    });
}

tk_status tk_gurevich_csv(tk_rule_kind kind, long N, double phi, long base, long n_max, long cap, char** out) {
    return guarded([&] { put(out, gurevich_csv(gurevich(kind, N, phi, base, n_max, cap)).str()); });
}

tk_status tk_shift_check_json(const tk_map* map, long N, long depth, char** out) {
    return guarded([&] {
        const auto& m = deref(map, "map").model;
        Json doc = document("shift-check");
        doc["map"] = map_to_json(m);
        doc["report"] = to_json(itinerary_conjugacy_check(m, N, depth));
        put(out, dump(doc));
    });
}

tk_status tk_sample_lyapunov(const tk_map* map, long count, long n, uint64_t seed, tk_birkhoff_sample* out) {
    return guarded([&] {
        need(out);
        const auto s = sample_lyapunov(deref(map, "map").model, count, n, seed);
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = {s[i].x0, s[i].n, s[i].lambda_hat, s[i].escaped};
    });
}

tk_status tk_orbit_csv(const tk_map* map, long count, long n, uint64_t seed, char** out) {
    return guarded([&] {
        if (count < 1 || n < 1 || static_cast<double>(count) * static_cast<double>(n) > 1e10)
            fail(ErrorCode::budget, "orbit budget of 1e10 steps exceeded");
        put(out, orbit_csv(sample_lyapunov(deref(map, "map").model, count, n, seed)).str());
    });
}

tk_status tk_cf_json(const char* x, long n, int backward, unsigned bits, char** out) {
    return guarded([&] {
        if (!x) fail(ErrorCode::invalid_argument, "null x");
        if (n < 1 || n > 100000) fail(ErrorCode::config, "digit count must lie in 1..1e5");
        const Real r = Real::parse(x, bits ? bits : kDefaultBits);
        if (!(mpfr_cmp_ui(r.get(), 0) > 0 && mpfr_cmp_ui(r.get(), 1) < 0)) fail(ErrorCode::config, "x must lie in (0,1)");
        const auto cf = cf_expand(r, n, backward ? CFKind::backward : CFKind::regular);
        Json doc = document("cf");
        doc["expansion"] = to_json(cf);
        if (!backward) {
            const auto l = lyapunov_via_approximants(r, static_cast<long>(cf.digits.size()));
            if (!cf.digits.empty() && l.valid) doc["lyapunov"] = {{"a", l.a}, {"b", l.b}};
        }
        put(out, dump(doc));
    });
}

tk_status tk_lyapunov_approximants(const char* x, long n, unsigned bits, double* a, double* b) {
    return guarded([&] {
        if (!x) fail(ErrorCode::invalid_argument, "null x");
        const auto l = lyapunov_via_approximants(Real::parse(x, bits ? bits : kDefaultBits), n);
        if (!l.valid) fail(ErrorCode::nonconvergence, "no approximant pair: " + l.reason);
        if (a) *a = l.a;
        if (b) *b = l.b;
    });
}

tk_status tk_report_json(const tk_map* map, const tk_engine_options* opts, uint64_t seed, char** out) {
    return guarded([&] {
        ReportOptions r;
        r.engine = to_options(opts);
        r.seed = seed;
        put(out, dump(run_report(deref(map, "map").model, r)));
    });
}

}  // extern "C"
