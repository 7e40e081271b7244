#include "spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "errors.hpp"

namespace thermokit {

namespace {

bool plateau_model(const PressureEngine& e) { return e.model().parabolic().has_value() && !e.degenerate(); }

double root_bisect(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, [](double x, double y) { return std::abs(y - x) <= 1e-15 * std::max(std::abs(x), 1.0); },
        iters);
    return 0.5 * (a + b);
}

}  // namespace

std::string SpectrumPoint::flags() const {
    if (!present) return "absent";
    if (pinned) return "pinned";
    if (bound) return "bound";
    return "";
}

SpectrumPoint SpectrumCurve::at(double alpha) const {
    require(alpha > 0.0, "alpha must be positive");
    const PressureCurve& c = *source_;
    const PressureEngine& e = c.engine();
    SpectrumPoint p;
    p.alpha = alpha;
    if (e.degenerate()) {
        // P = inf below t*, 0 above: the infimum sits at t*.
        p.L = p.t_alpha = e.t_star();
        p.pinned = true;
        return p;
    }
    const double dim = e.dim_estimate();
    if (plateau_model(e) && alpha <= alpha_star_.value) {
        p.L = p.t_alpha = dim;
        p.L_error = alpha_star_.error;
        p.pinned = true;
        return p;
    }
    const double lo = c.lo(), hi = c.hi();
    auto D = [&](double t) { return c.derivative(t) + alpha; };
    const double Dlo = D(lo), Dhi = D(hi);
    if (!std::isfinite(Dlo) || !std::isfinite(Dhi)) {
        p.present = false;
        p.L = std::nan("");
        return p;
    }
    if (Dhi < 0.0) {
        if (plateau_model(e)) {
            // inf over [hi, dim] of P(t)/a + t with 0 <= P: L lies in [hi, dim].
            p.L = dim;
            p.L_error = dim - hi;
            p.t_alpha = hi;
            p.bound = true;
            return p;
        }
        p.present = false;
        p.L = std::nan("");
        return p;
    }
    if (Dlo > 0.0) {
        p.present = false;
        p.L = std::nan("");
        return p;
    }
    const double t = root_bisect(D, lo, hi);
    const double P = c.value(t);
    p.t_alpha = t;
    p.L = (P + t * alpha) / alpha;
    p.L_error = c.value_error(t) / alpha;
    const double P2 = c.second_derivative(t);
    p.residual = P - alpha * alpha / (2.0 * P2);
    p.residual_error = c.value_error(t) + std::abs(p.residual) * 1e-8;
    return p;
}

SpectrumCurve legendre_spectrum(std::shared_ptr<const PressureCurve> curve, std::span<const double> alpha_grid) {
    require(curve != nullptr, "null pressure curve");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        require(alpha_grid[i] > 0.0, "alpha grid must be positive");
        if (i) require(alpha_grid[i] > alpha_grid[i - 1], "alpha grid must be increasing");
    }
    SpectrumCurve s;
    s.source_ = curve;
    s.alpha_star_ = alpha_star(*curve, curve->engine().dim_estimate());
    for (double a : alpha_grid) s.points_.push_back(s.at(a));
    auto legendre = [](const SpectrumPoint& p) { return p.present && !p.pinned && !p.bound; };
    auto& pts = s.points_;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        auto &l = pts[i - 1], &m = pts[i], &r = pts[i + 1];
        if (!legendre(l) || !legendre(m) || !legendre(r)) continue;
        // Three-point derivative on a nonuniform grid.
        const double h1 = m.alpha - l.alpha, h2 = r.alpha - m.alpha;
        const double tp = (-h2 / (h1 * (h1 + h2))) * l.t_alpha + ((h2 - h1) / (h1 * h2)) * m.t_alpha +
                          (h1 / (h2 * (h1 + h2))) * r.t_alpha;
        const double P = m.L * m.alpha - m.t_alpha * m.alpha;
        const double cd = P + 0.5 * m.alpha * m.alpha * tp;
        m.residual_error = std::abs(cd - m.residual) + m.residual_error;
        m.residual = cd;
    }
    return s;
}

std::vector<double> default_alpha_grid(double amin, double hi, int n) {
    const double lo = std::max(amin * 1.001, 1e-3);
    require(hi > lo && n >= 2, "empty alpha grid");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

AlphaStar alpha_star(const PressureCurve& curve, double dim) {
    const PressureEngine& e = curve.engine();
    AlphaStar a;
    if (e.degenerate()) return a;
    if (plateau_model(e)) {
        const LeftDerivative ld = left_derivative_at_dim(e);
        a.value = ld.value;
        a.error = ld.error;
        a.slow_convergence = ld.slow_convergence;
        return a;
    }
    a.value = -pressure_derivative(curve, dim);
    a.error = curve.value_error(dim) * 1e3 + 1e-9;
    return a;
}

double alpha_min(const MapModel& model, int period_cap, long N_max) {
    if (model.parabolic()) return 0.0;
    require(period_cap >= 1, "period cap must be positive");
    const long N = model.branch_count() ? std::min(*model.branch_count(), N_max) : N_max;
    double best = kInf;
    for (int k = 1; k <= period_cap; ++k) {
        std::vector<long> w(static_cast<std::size_t>(k), 1);
        for (;;) {
            // Fixed point of psi_{w_0} o ... o psi_{w_{k-1}} by contraction.
            double x = 0.5;
            for (int it = 0; it < 200; ++it) {
                double y = x;
                for (int j = k - 1; j >= 0; --j) y = model.inverse(w[static_cast<std::size_t>(j)], y);
                if (std::abs(y - x) < 1e-16) {
                    x = y;
                    break;
                }
                x = y;
            }
            double lj = 0.0, y = x;
            for (int j = k - 1; j >= 0; --j) {
                lj += model.log_inverse_jacobian(w[static_cast<std::size_t>(j)], y);
                y = model.inverse(w[static_cast<std::size_t>(j)], y);
            }
            best = std::min(best, -lj / k);
            int j = k - 1;
            while (j >= 0 && ++w[static_cast<std::size_t>(j)] > N) w[static_cast<std::size_t>(j--)] = 1;
            if (j < 0) break;
        }
    }
    return best;
}

SpectrumFeatures features(const PressureCurve& curve, const SpectrumCurve& spectrum, const MapModel& model) {
    SpectrumFeatures f;
    const PressureEngine& e = curve.engine();
    f.alpha_star = spectrum.alpha_star();
    f.alpha_min = alpha_min(model);
    f.dim_estimate = e.dim_estimate();
    f.dim_irregular = f.dim_estimate;
    const auto& pts = spectrum.points();

    if (e.degenerate()) {
        f.alpha_max_at = 0.0;
        f.L_max = e.t_star();
        f.boundary_maximum = true;
        f.asymptote = e.t_star();
        return f;
    }
    if (plateau_model(e)) {
        f.alpha_max_at = f.alpha_star.value;
        f.L_max = f.dim_estimate;
        f.boundary_maximum = true;
    } else {
        std::size_t best = pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i].present && (best == pts.size() || pts[i].L > pts[best].L)) best = i;
        require(best < pts.size(), "spectrum has no point in its domain");
        double a = pts[best > 0 ? best - 1 : best].alpha, b = pts[best + 1 < pts.size() ? best + 1 : best].alpha;
        auto negL = [&](double x) {
            const auto p = spectrum.at(x);
            return p.present ? -p.L : 0.0;
        };
        if (b > a) {
            const auto r = boost::math::tools::brent_find_minima(negL, a, b, 26);
            f.alpha_max_at = r.first;
            f.L_max = -r.second;
        } else {
            f.alpha_max_at = pts[best].alpha;
            f.L_max = pts[best].L;
        }
    }
    if (!model.finite()) {
        // L(a) ~ c0 + (c1 + c2 log a) / a far out.
        auto fit = [&](double a0) -> std::optional<double> {
            const double as[3] = {a0, 2.0 * a0, 4.0 * a0};
            double M[3][4];
            for (int i = 0; i < 3; ++i) {
                const auto p = spectrum.at(as[i]);
                if (!p.present || p.bound) return std::nullopt;
                M[i][0] = 1.0;
                M[i][1] = 1.0 / as[i];
                M[i][2] = std::log(as[i]) / as[i];
                M[i][3] = p.L;
            }
            for (int c = 0; c < 3; ++c)
                for (int r = c + 1; r < 3; ++r) {
                    const double g = M[r][c] / M[c][c];
                    for (int k = c; k < 4; ++k) M[r][k] -= g * M[c][k];
                }
            double x[3];
            for (int c = 2; c >= 0; --c) {
                double acc = M[c][3];
                for (int k = c + 1; k < 3; ++k) acc -= M[c][k] * x[k];
                x[c] = acc / M[c][c];
            }
            return x[0];
        };
        const auto far = fit(500.0), near = fit(250.0);
        if (far) {
            f.asymptote = *far;
            f.asymptote_error = near ? std::abs(*far - *near) : std::abs(*far);
        }
    }
    // Inflections: sign changes of the residual across Legendre points.
    auto legendre = [](const SpectrumPoint& p) { return p.present && !p.pinned && !p.bound; };
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (legendre(pts[i]) && std::abs(pts[i].residual) <= pts[i].residual_error) f.inflections_incomplete = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto &l = pts[i], &r = pts[i + 1];
        if (!legendre(l) || !legendre(r)) continue;
        if ((l.residual > 0.0) == (r.residual > 0.0) || l.residual == 0.0 || r.residual == 0.0) continue;
        const auto R = [&](double a) { return spectrum.at(a).residual; };
        double a = l.alpha, b = r.alpha, Ra = R(a);
        if ((Ra > 0.0) == (R(b) > 0.0)) {
            f.inflections.push_back(0.5 * (a + b));
            continue;
        }
        for (int it = 0; it < 60 && b - a > 1e-13 * b; ++it) {
            const double m = 0.5 * (a + b), Rm = R(m);
            if ((Rm > 0.0) == (Ra > 0.0)) {
                a = m;
                Ra = Rm;
            } else {
                b = m;
            }
        }
        f.inflections.push_back(0.5 * (a + b));
    }
    return f;
}

std::vector<InflectionRow> inflection_consistency(const SpectrumCurve& spectrum) {
    std::vector<InflectionRow> rows;
    const auto& pts = spectrum.points();
    auto legendre = [](const SpectrumPoint& p) { return p.present && !p.pinned && !p.bound; };
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const auto &l = pts[i - 1], &m = pts[i], &r = pts[i + 1];
        if (!legendre(l) || !legendre(m) || !legendre(r)) continue;
        const double h1 = m.alpha - l.alpha, h2 = r.alpha - m.alpha;
        const double d2 = 2.0 * ((r.L - m.L) / h2 - (m.L - l.L) / h1) / (h1 + h2);
        const bool sig = std::abs(m.residual) > m.residual_error;
        rows.push_back({m.alpha, m.residual, m.residual_error, d2, sig, !sig || (d2 > 0.0) == (m.residual > 0.0)});
    }
    return rows;
}

double maximum_t_identity(const SpectrumCurve& spectrum, double at) {
    const auto p = spectrum.at(at);
    require(p.present, "maximum location outside the spectrum's domain");
    return std::abs(p.t_alpha - p.L);
}

TruncatedSpectra truncated_spectra(const MapModel& model, double alpha, std::span<const long> N_list,
                                   std::optional<double> full_L) {
    require(alpha > 0.0, "alpha must be positive");
    TruncatedSpectra out;
    out.alpha = alpha;
    out.full_L = full_L;
    constexpr double T = 40.0;
    double prev = -kInf, best = -kInf;
    for (long N : N_list) {
        const PressureEngine eng(truncate(model, N));
        auto f = [&](double t) { return eng.pressure(t).value + t * alpha; };
        const auto r = boost::math::tools::brent_find_minima(f, -T, T, 26);
        TruncatedValue v{N, true, r.second / alpha, r.first};
        if (std::abs(r.first) > T - 1e-3) {
            v.present = false;
            v.L = std::nan("");
        }
        if (v.present) {
            if (v.L < prev - 1e-9) out.monotone = false;
            prev = v.L;
            best = std::max(best, v.L);
        }
        out.values.push_back(v);
    }
    if (full_L && best > -kInf) out.gap = *full_L - best;
    return out;
}

}  // namespace thermokit
