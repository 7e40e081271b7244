#include "report.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "numeric.hpp"

namespace thermokit {

Verdict check_abs(std::string name, double value, double target, double tol) {
    return {std::move(name), value, target, tol, "abs", std::isfinite(value) && std::abs(value - target) <= tol};
}

Verdict check_ge(std::string name, double value, double bound) {
    return {std::move(name), value, bound, 0.0, "ge", value >= bound};
}

Verdict check_range(std::string name, double value, double lo, double hi) {
    return {std::move(name), value, 0.5 * (lo + hi), 0.5 * (hi - lo), "range", value >= lo && value <= hi};
}

Verdict check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, "bool", ok}; }

Json to_json(const Verdict& v) {
    return {{"name", v.name},           {"value", number(v.value)}, {"target", v.target},
            {"tolerance", v.tolerance}, {"relation", v.relation},   {"pass", v.pass}};
}

double affine_pressure(const MapModel& model, double t) {
    require(model.family() == Family::linear_custom, "closed form needs an affine model");
    LogSumExp s;
    for (const auto& b : model.params().affine) s.add(-t * std::log(std::abs(b.slope)));
    return s.value();
}

double affine_spectrum(const MapModel& model, double alpha) {
    require(alpha > 0.0, "alpha must be positive");
    auto f = [&](double t) { return (affine_pressure(model, t) + t * alpha) / alpha; };
    double T = 10.0;
    for (;;) {
        const auto r = boost::math::tools::brent_find_minima(f, -T, T, 26);
        if (std::abs(r.first) < 0.9 * T) return r.second;
        if (T > 1e4) return std::nan("");
        T *= 4.0;
    }
}

namespace {

bool verdicts_pass(const Json& vs) {
    return std::all_of(vs.begin(), vs.end(), [](const Json& v) { return v.at("pass").get<bool>(); });
}

Verdict inflections_verdict(const SpectrumFeatures& f) {
    const bool ok = !f.inflections.empty() && std::all_of(f.inflections.begin(), f.inflections.end(),
                                                          [&](double a) { return a > f.alpha_star.value; });
    return check_true("inflections exist and exceed alpha*", ok);
}

Verdict route_verdict(const PressureEngine& e, double t) {
    const auto a = e.pressure_by(t, Route::cylinder), b = e.pressure_by(t, Route::induced);
    const double gap = std::abs(a.value - b.value);
    Verdict v = check_abs("route agreement at t=" + format_number(t), gap, 0.0, a.error + b.error);
    v.pass = std::isfinite(gap) && gap <= a.error + b.error;
    return v;
}

}  // namespace

Json run_report(const MapModel& model, const ReportOptions& opts) {
    auto engine = std::make_shared<const PressureEngine>(model, opts.engine);
    auto curve = std::make_shared<const PressureCurve>(PressureCurve::build(engine));
    const RegimeReport regime = classify_regime(*engine);
    const double amin = alpha_min(model);
    const auto grid = default_alpha_grid(amin, model.finite() ? 2.0 * std::log(1e3) : 50.0);
    const SpectrumCurve spectrum = legendre_spectrum(curve, grid);
    const SpectrumFeatures feat = features(*curve, spectrum, model);
    const CurveCheck cc = check_curve(curve->points());

    Json verdicts = Json::array();
    auto add = [&](const Verdict& v) { verdicts.push_back(to_json(v)); };
    add(check_true("curve monotone, convex and bracketed", cc.monotone && cc.convex && cc.bracketed));

    switch (model.family()) {
        case Family::gauss: {
            add(check_true("regime gauss_like", regime.regime == Regime::gauss_like));
            add(check_abs("t_star", regime.t_star, 0.5, 0.01));
            add(check_abs("dim", regime.dim_estimate, 1.0, 0.01));
            add(check_abs("-P'(1)", feat.alpha_star.value, 2.37314, 0.05));
            add(check_abs("alpha_min", feat.alpha_min, 0.96242, 1e-3));
            add(check_abs("maximum location", feat.alpha_max_at, 2.373, 0.05));
            add(check_ge("L at maximum", feat.L_max, 0.99));
            add(check_range("L(30)", spectrum.at(30.0).L, 0.50, 0.60));
            add(check_abs("asymptote", feat.asymptote.value_or(std::nan("")), 0.5, 0.02));
            add(inflections_verdict(feat));
            const auto s = sample_lyapunov(model, opts.orbit_count, opts.orbit_n, opts.seed);
            const double lam = std::pow(M_PI, 2) / (6.0 * std::log(2.0));
            add(check_abs("Birkhoff median Lyapunov", median_lambda(s), lam, 0.01 * lam));
            break;
        }
        case Family::renyi: {
            add(check_true("regime renyi_like", regime.regime == Regime::renyi_like));
            add(check_abs("t_star", regime.t_star, 0.5, 0.01));
            for (double t : {1.0, 1.2, 1.5}) add(check_abs("P(" + format_number(t) + ")", engine->pressure(t).value, 0.0, 5e-3));
            add(check_ge("L(0.05)", spectrum.at(0.05).L, 0.95));
            add(check_abs("asymptote", feat.asymptote.value_or(std::nan("")), 0.5, 0.02));
            add(inflections_verdict(feat));
            for (double t : {0.6, 0.75, 0.9}) add(route_verdict(*engine, t));
            break;
        }
        case Family::infinite_mp: {
            add(check_true("regime infinite_mp_like", regime.regime == Regime::infinite_mp_like));
            add(check_ge("alpha*", feat.alpha_star.value, 0.1));
            const auto p = spectrum.at(0.5 * feat.alpha_star.value);
            add(check_abs("plateau L at alpha*/2", p.L, regime.dim_estimate, 0.02));
            add(inflections_verdict(feat));
            for (double t : {0.6, 0.75, 0.9}) add(route_verdict(*engine, t));
            break;
        }
        case Family::pathological: {
            add(check_true("regime degenerate", regime.regime == Regime::degenerate));
            bool below = true, above = true;
            for (double t : {0.0, 0.5, 0.9, 0.94}) below = below && engine->pressure(t).infinite;
            for (double t : {1.0, 1.5, 2.0, 3.0}) {
                const auto e = engine->pressure(t);
                above = above && !e.infinite && e.value == 0.0;
            }
            add(check_true("P infinite below 0.95", below));
            add(check_true("P zero from 1", above));
            break;
        }
        case Family::linear_custom: {
            double worst = 0.0;
            for (int i = 0; i <= 30; ++i) {
                const double t = 0.1 * i;
                worst = std::max(worst, std::abs(engine->pressure(t).value - affine_pressure(model, t)));
            }
            add(check_abs("pressure vs closed form on [0,3]", worst, 0.0, 1e-6));
            double worstL = 0.0;
            for (const auto& p : spectrum.points())
                if (p.present && !p.bound && !p.pinned)
                    worstL = std::max(worstL, std::abs(p.L - affine_spectrum(model, p.alpha)));
            add(check_abs("spectrum vs closed-form Legendre transform", worstL, 0.0, 1e-5));
            double smin = kInf;
            for (const auto& b : model.params().affine) smin = std::min(smin, std::abs(b.slope));
            add(check_abs("alpha_min", feat.alpha_min, std::log(smin), 1e-9));
            break;
        }
    }

    Json doc = document("report");
    doc["map"] = map_to_json(model);
    doc["description"] = model.describe();
    doc["regime"] = to_json(regime);
    doc["features"] = to_json(feat);
    doc["verdicts"] = verdicts;
    doc["all_pass"] = verdicts_pass(verdicts);
    return doc;
}

}  // namespace thermokit
