#include "pressure.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"

namespace thermokit {

namespace {

constexpr double kBertrandV = 1e8;

double bowen_root(const std::function<double(double)>& P, double lo) {
    double plo = P(lo);
    if (!(plo > 0.0)) return lo;
    double hi = std::max(lo + 1.0, 2.0 * std::abs(lo) + 1.0);
    double phi = P(hi);
    while (phi > 0.0) {
        hi = 2.0 * hi + 1.0;
        if (hi > 1e4) fail(ErrorCode::nonconvergence, "Bowen root not bracketed");
        phi = P(hi);
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(P, lo, hi, plo, phi,
                                                          boost::math::tools::eps_tolerance<double>(48), iters);
    return 0.5 * (a + b);
}

// Number of nodes per t-panel of the pressure interpolant.
constexpr int kCurveNodes = 12;

}  // namespace

double critical_t(const MapModel& model) {
    if (model.finite()) return 0.0;
    if (!model.log_growth(1.0))
        fail(ErrorCode::invalid_argument, "model " + model.describe() + " declares no branch growth law");
    // Bertrand-type test for sum_n exp(-t l(log n)) = int exp(v - t l(v)) dv: converges iff
    // v (t l'(v) - 1) stays above 1 far out.
    const double lp = model.log_growth(kBertrandV)->second;
    auto converges = [&](double t) { return kBertrandV * (t * lp - 1.0) > 1.0; };
    double lo = 0.0, hi = 10.0;
    if (!converges(hi)) fail(ErrorCode::nonconvergence, "branch series diverges for all t <= 10");
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? hi : lo) = mid;
    }
    return hi;
}

PressureEstimate pressure_truncated(const MapModel& model, double t, long N, const SolveOptions& opts) {
    EngineOptions eo;
    eo.solve = opts;
    return PressureEngine(truncate(model, N), eo).pressure(t);
}

std::string_view route_name(Route r) {
    switch (r) {
        case Route::automatic: return "auto";
        case Route::cylinder: return "cylinder";
        case Route::induced: return "induced";
    }
    return "unknown";
}

std::optional<Route> parse_route(std::string_view s) {
    for (Route r : {Route::automatic, Route::cylinder, Route::induced})
        if (route_name(r) == s) return r;
    return std::nullopt;
}

PressureEngine::PressureEngine(MapModel model, EngineOptions opts) : model_(std::move(model)), opts_(opts) {
    t_star_ = critical_t(model_);
    if (degenerate()) {
        dim_ = t_star_;
        return;
    }
    const bool parabolic = model_.parabolic().has_value();
    if (opts_.route == Route::induced && !parabolic)
        fail(ErrorCode::config, "the induced route needs a parabolic fixed point");
    if (model_.finite()) {
        cyl_ = std::make_unique<CylinderSums>(model_, *model_.branch_count());
    } else if (!parabolic || opts_.route == Route::cylinder) {
        cyl_ = std::make_unique<CylinderSums>(model_, opts_.cylinder_N);
    }
    if (parabolic) {
        induced_ = std::make_unique<InducedScheme>(model_, opts_.induced_N, opts_.induced_J);
        dim_ = induced_->dim_estimate();
    } else {
        const double lo = model_.finite() ? 0.0 : t_star_ + 1e-3;
        dim_ = bowen_root([&](double t) { return cyl_->pressure(t, opts_.solve).value; }, lo);
    }
}

double PressureEngine::finite_lo() const { return model_.finite() ? -kInf : t_star_; }

double PressureEngine::finite_hi() const { return model_.parabolic() ? dim_ : kInf; }

PressureEstimate PressureEngine::pressure(double t) const { return pressure_by(t, opts_.route); }

PressureEstimate PressureEngine::cylinder_route(double t) const {
    if (!cyl_) {
        // Built on demand for cross-validation on parabolic models.
        CylinderSums cs(model_, model_.finite() ? *model_.branch_count() : opts_.cylinder_N);
        return cs.pressure(t, opts_.solve);
    }
    return cyl_->pressure(t, opts_.solve);
}

PressureEstimate PressureEngine::pressure_by(double t, Route route) const {
    require(std::isfinite(t), "t must be finite");
    if (degenerate()) {
        if (t < t_star_)
            return PressureEstimate::divergent(Method::degenerate, "branch series diverges below the critical exponent");
        return PressureEstimate::exact(0.0, Method::degenerate);
    }
    if (!model_.finite()) {
        if (t <= t_star_) return PressureEstimate::divergent(route == Route::induced ? Method::induced : Method::cylinder,
                                                             "t at or below the critical exponent");
        if (t <= t_star_ + kCriticalBand)
            return PressureEstimate::divergent(route == Route::induced ? Method::induced : Method::cylinder,
                                               "t within the ambiguous band above the critical exponent");
    }
    if (model_.parabolic()) {
        if (route == Route::automatic) route = Route::induced;
        const Method m = route == Route::induced ? Method::induced : Method::cylinder;
        if (t >= dim_) {
            PressureEstimate z = PressureEstimate::exact(0.0, m);
            z.N = route == Route::induced ? induced_->N_max() : opts_.cylinder_N;
            z.diagnostic = "t at or beyond the dimension root";
            return z;
        }
        PressureEstimate e = route == Route::induced ? induced_->pressure(t, opts_.solve) : cylinder_route(t);
        if (route == Route::cylinder && e.value < 0.0) {
            // The parabolic fixed point forces P >= 0.
            e.value = 0.0;
            e.lower = std::max(e.lower, 0.0);
        }
        return e;
    }
    if (route == Route::induced) fail(ErrorCode::config, "the induced route needs a parabolic fixed point");
    return cylinder_route(t);
}

LeftDerivative left_derivative_at_dim(const PressureEngine& engine) {
    LeftDerivative out;
    const double dim = engine.dim_estimate();
    if (!engine.model().parabolic() || engine.degenerate()) {
        const double h = 1e-5;
        const auto a = engine.pressure(dim - h), b = engine.pressure(dim + h);
        out.value = -(b.value - a.value) / (2.0 * h);
        out.error = (a.error + b.error) / (2.0 * h) + h * h;
        out.raw = {out.value};
        return out;
    }
    std::vector<double> s;
    for (int k = 2; k <= 6; ++k) {
        const double d = std::pow(10.0, -k);
        const auto a = engine.pressure(dim - d), b = engine.pressure(dim - 0.5 * d);
        if (4.0 * (a.error + b.error) / d > 1e-2 && s.size() >= 3) break;
        const double q = (a.value - b.value) / (0.5 * d);
        out.raw.push_back(q);
        s.push_back(q);
    }
    const std::size_t n = s.size();
    if (n < 3) {
        out.value = s.back();
        out.error = n > 1 ? std::abs(s[n - 1] - s[n - 2]) : std::abs(s.back());
        out.slow_convergence = true;
        return out;
    }
    const double d1 = s[n - 1] - s[n - 2], d0 = s[n - 2] - s[n - 3];
    const double r = d0 != 0.0 ? d1 / d0 : 0.0;
    double r_prev = r;
    if (n >= 4) {
        const double dm = s[n - 3] - s[n - 4];
        r_prev = dm != 0.0 ? d0 / dm : 0.0;
    }
    if (r >= 0.0 && r < 0.35 && r <= 1.2 * r_prev + 1e-12) {
        // Geometric approach: Aitken tail.
        const double tail = d1 * r / (1.0 - r);
        out.value = s[n - 1] + tail;
        out.error = std::abs(tail) + 1e-9;
        return out;
    }
    // Logarithmic approach: fit a + b/L + c/L^2 with L = log(1/delta).
    out.slow_convergence = true;
    auto fit = [&](int terms) {
        std::vector<double> M(static_cast<std::size_t>(terms * terms), 0.0), v(static_cast<std::size_t>(terms), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double L = std::log(1.0 / (0.75 * std::pow(10.0, -static_cast<double>(i) - 2.0)));
            std::vector<double> row(static_cast<std::size_t>(terms));
            for (int j = 0; j < terms; ++j) row[static_cast<std::size_t>(j)] = std::pow(L, -j);
            for (int a = 0; a < terms; ++a) {
                v[static_cast<std::size_t>(a)] += row[static_cast<std::size_t>(a)] * s[i];
                for (int b = 0; b < terms; ++b)
                    M[static_cast<std::size_t>(a * terms + b)] += row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
            }
        }
        // Gaussian elimination on the small normal system.
        for (int c = 0; c < terms; ++c) {
            for (int r2 = c + 1; r2 < terms; ++r2) {
                const double f = M[static_cast<std::size_t>(r2 * terms + c)] / M[static_cast<std::size_t>(c * terms + c)];
                for (int k = c; k < terms; ++k)
                    M[static_cast<std::size_t>(r2 * terms + k)] -= f * M[static_cast<std::size_t>(c * terms + k)];
                v[static_cast<std::size_t>(r2)] -= f * v[static_cast<std::size_t>(c)];
            }
        }
        std::vector<double> x(static_cast<std::size_t>(terms));
        for (int c = terms - 1; c >= 0; --c) {
            double acc = v[static_cast<std::size_t>(c)];
            for (int k = c + 1; k < terms; ++k) acc -= M[static_cast<std::size_t>(c * terms + k)] * x[static_cast<std::size_t>(k)];
            x[static_cast<std::size_t>(c)] = acc / M[static_cast<std::size_t>(c * terms + c)];
        }
        return x[0];
    };
    const double a3 = fit(3), a2 = fit(2);
    out.value = std::max(0.0, a3);
    out.error = std::abs(a3 - a2);
    return out;
}

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::gauss_like: return "gauss_like";
        case Regime::renyi_like: return "renyi_like";
        case Regime::infinite_mp_like: return "infinite_mp_like";
        case Regime::degenerate: return "degenerate";
    }
    return "unknown";
}

RegimeReport classify_regime(const PressureEngine& engine) {
    RegimeReport r;
    r.t_star = engine.t_star();
    r.dim_estimate = engine.dim_estimate();
    if (engine.degenerate()) {
        r.regime = Regime::degenerate;
        r.differentiable_at_dim = false;
        r.confidence = 1.0;
        return r;
    }
    if (!engine.model().parabolic()) {
        r.regime = Regime::gauss_like;
        r.differentiable_at_dim = true;
        r.confidence = 1.0;
        return r;
    }
    const LeftDerivative ld = left_derivative_at_dim(engine);
    r.derivative_gap = ld.value;  // right derivative is 0
    r.slow_convergence = ld.slow_convergence;
    r.differentiable_at_dim = !(ld.value > kDifferentiabilityGap);
    r.regime = r.differentiable_at_dim ? Regime::renyi_like : Regime::infinite_mp_like;
    r.confidence = std::abs(ld.value - kDifferentiabilityGap) / (kDifferentiabilityGap + ld.error);
    return r;
}

RegimeReport classify_regime(const MapModel& model) { return classify_regime(PressureEngine(model)); }

namespace {

std::vector<double> curve_breakpoints(const PressureEngine& e) {
    std::vector<double> bp;
    const MapModel& m = e.model();
    if (e.degenerate()) return bp;
    if (!m.finite() && !m.parabolic()) {
        const double a = e.t_star();
        for (double d = 1e-4; d < 1.0; d *= 2.0) bp.push_back(a + d);
        for (double d = 1.0; d < 4.0; d *= 2.0) bp.push_back(a + d);
        for (double t = a + 4.0; t < 40.0; t += 4.0) bp.push_back(t);
        bp.push_back(40.0);
        return bp;
    }
    if (m.parabolic()) {
        const double b = e.dim_estimate();
        const double a = m.finite() ? -4.0 : e.t_star();
        const double mid = m.finite() ? b - 0.5 : 0.5 * (a + b);
        if (m.finite()) {
            for (double t = a; t < mid - 1e-9; t += 0.5) bp.push_back(t);
        } else {
            for (double d = 1e-4; a + d < mid; d *= 2.0) bp.push_back(a + d);
        }
        bp.push_back(mid);
        std::vector<double> right;
        for (double d = 1e-6; b - d > mid; d *= 2.0) right.push_back(b - d);
        std::reverse(right.begin(), right.end());
        bp.insert(bp.end(), right.begin(), right.end());
        return bp;
    }
    // Finite expanding: panel width below the distance to the complex singularities.
    double smin = kInf, smax = 0.0;
    for (long n = 1; n <= *m.branch_count(); ++n) {
        const Branch br = m.branch(n);
        smin = std::min(smin, br.deriv_inf);
        smax = std::max(smax, br.deriv_sup);
    }
    const double R = std::max(std::log(smax / smin), 1e-3);
    const double T = 30.0 / R + 3.0;
    const double w = std::min(0.5 * 3.141592653589793 / R, std::max(1.0, T / 100.0));
    const int count = static_cast<int>(std::ceil(2.0 * T / w));
    for (int i = 0; i <= count; ++i) bp.push_back(-T + 2.0 * T * i / count);
    return bp;
}

}  // namespace

PressureCurve PressureCurve::build(std::shared_ptr<const PressureEngine> engine) {
    return build(std::move(engine), {});
}

PressureCurve PressureCurve::build(std::shared_ptr<const PressureEngine> engine, std::span<const double> t_grid) {
    require(engine != nullptr, "null pressure engine");
    PressureCurve c;
    c.engine_ = engine;
    const auto bp = curve_breakpoints(*engine);
    const std::size_t np = bp.size() >= 2 ? bp.size() - 1 : 0;
    std::vector<double> nodes;
    for (std::size_t p = 0; p < np; ++p) {
        const ChebGrid g = ChebGrid::single(bp[p], bp[p + 1], kCurveNodes);
        for (std::size_t i = 0; i < g.size(); ++i) nodes.push_back(g.node(i));
    }
    std::vector<double> ts;
    if (!t_grid.empty()) {
        ts.assign(t_grid.begin(), t_grid.end());
    } else {
        ts = nodes;
        if (engine->model().parabolic() && !engine->degenerate()) {
            const double b = engine->dim_estimate();
            for (int i = 0; i <= 10; ++i) ts.push_back(b + 0.05 * i);
        }
        if (engine->degenerate()) {
            for (int i = 0; i <= 40; ++i) ts.push_back(0.5 * engine->t_star() + i * 0.025 * engine->t_star());
        }
        std::sort(ts.begin(), ts.end());
    }
    std::vector<double> all = nodes;
    all.insert(all.end(), ts.begin(), ts.end());
    std::vector<PressureEstimate> est(all.size());
    parallel_for(all.size(), [&](std::size_t i) { est[i] = engine->pressure(all[i]); });
    for (const auto& e : est) c.converged_ = c.converged_ && e.converged;

    for (std::size_t p = 0; p < np; ++p) {
        std::vector<double> vals(kCurveNodes);
        double err = 0.0;
        for (int i = 0; i < kCurveNodes; ++i) {
            const auto& e = est[p * kCurveNodes + static_cast<std::size_t>(i)];
            if (e.infinite) fail(ErrorCode::numeric, "pressure curve panel touches the divergent region");
            vals[static_cast<std::size_t>(i)] = e.value;
            err = std::max(err, e.error);
        }
        PanelFit f{bp[p], bp[p + 1], cheb_coefficients(vals), err};
        double vmax = 0.0;
        for (double v : vals) vmax = std::max(vmax, std::abs(v));
        const std::size_t m = f.coeffs.size();
        if (vmax > 0.0)
            c.resolution_ = std::max(c.resolution_, (std::abs(f.coeffs[m - 1]) + std::abs(f.coeffs[m - 2])) / vmax);
        c.panels_.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& e = est[nodes.size() + i];
        c.points_.push_back({ts[i], e.value, e.lower, e.upper, e.error, e.infinite, e.N, e.depth, e.method, e.converged});
    }
    return c;
}

const PressureCurve::PanelFit& PressureCurve::panel(double t) const {
    require(!panels_.empty(), "pressure curve has no interpolated region");
    auto it = std::upper_bound(panels_.begin(), panels_.end(), t, [](double x, const PanelFit& p) { return x < p.hi; });
    if (it == panels_.end()) --it;
    return *it;
}

double PressureCurve::value(double t) const {
    if (panels_.empty() || !covers(t)) return engine_->pressure(t).value;
    const auto& p = panel(t);
    return cheb_evaluate(p.coeffs, (2.0 * t - p.lo - p.hi) / (p.hi - p.lo)).f;
}

double PressureCurve::derivative(double t) const {
    if (panels_.empty() || !covers(t)) return pressure_derivative(*this, t);
    const auto& p = panel(t);
    return cheb_evaluate(p.coeffs, (2.0 * t - p.lo - p.hi) / (p.hi - p.lo)).df * 2.0 / (p.hi - p.lo);
}

double PressureCurve::second_derivative(double t) const {
    if (panels_.empty() || !covers(t)) {
        const double h = 1e-4;
        const double a = engine_->pressure(t - h).value, b = engine_->pressure(t).value,
                     d = engine_->pressure(t + h).value;
        return (a - 2.0 * b + d) / (h * h);
    }
    const auto& p = panel(t);
    const double s = 2.0 / (p.hi - p.lo);
    return cheb_evaluate(p.coeffs, (2.0 * t - p.lo - p.hi) / (p.hi - p.lo)).d2f * s * s;
}

double PressureCurve::value_error(double t) const {
    if (panels_.empty() || !covers(t)) return engine_->pressure(t).error;
    return panel(t).error;
}

double pressure_derivative(const PressureCurve& curve, double t) {
    if (curve.covers(t)) return curve.derivative(t);
    const PressureEngine& e = curve.engine();
    const double h = 1e-5;
    double lo = t - h, hi = t + h;
    if (lo <= e.finite_lo() + kCriticalBand) lo = t;
    if (e.model().parabolic() && t < e.finite_hi() && hi > e.finite_hi()) hi = t;
    if (hi == lo) fail(ErrorCode::numeric, "no room for a difference quotient at t");
    return (e.pressure(hi).value - e.pressure(lo).value) / (hi - lo);
}

CurveCheck check_curve(const std::vector<CurvePoint>& pts) {
    CurveCheck c;
    std::vector<const CurvePoint*> f;
    for (const auto& p : pts)
        if (!p.infinite) f.push_back(&p);
    for (const auto* p : f)
        if (p->lower > p->value + 1e-15 || p->value > p->upper + 1e-15) c.bracketed = false;
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i]->value > f[i - 1]->value + f[i]->error + f[i - 1]->error + 1e-14) c.monotone = false;
    for (std::size_t i = 2; i < f.size(); ++i) {
        const auto &a = *f[i - 2], &b = *f[i - 1], &d = *f[i];
        const double w = (b.t - a.t) / (d.t - a.t);
        const double chord = (1.0 - w) * a.value + w * d.value;
        const double tol = 2.0 * (b.upper - b.lower) + a.error + b.error + d.error + 1e-13;
        if (b.value > chord + tol) c.convex = false;
    }
    return c;
}

}  // namespace thermokit
