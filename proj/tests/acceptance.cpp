// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "orbits.hpp"
#include "pressure.hpp"
#include "spectrum.hpp"
#include "symbolic.hpp"

using namespace thermokit;

namespace {

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void expect(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        std::printf("    [%s] %s\n", ok ? "ok" : "!!", buf);
        pass_ = pass_ && ok;
    }
    bool finish() const {
        std::printf("criterion %d (%s): %s\n", id_, title_.c_str(), pass_ ? "PASS" : "FAIL");
        std::fflush(stdout);
        return pass_;
    }

private:
    int id_;
    std::string title_;
    bool pass_ = true;
};

struct Pipeline {
    std::shared_ptr<const PressureEngine> engine;
    std::shared_ptr<const PressureCurve> curve;
    SpectrumCurve spectrum;
    SpectrumFeatures feat;
};

Pipeline pipeline(const MapModel& m, double alpha_hi = 50.0) {
    auto e = std::make_shared<const PressureEngine>(m);
    auto c = std::make_shared<const PressureCurve>(PressureCurve::build(e));
    const auto grid = default_alpha_grid(alpha_min(m), alpha_hi);
    auto s = legendre_spectrum(c, grid);
    auto f = features(*c, s, m);
    return {e, c, std::move(s), std::move(f)};
}

const Pipeline& gauss() {
    static const Pipeline p = pipeline(build_gauss());
    return p;
}
const Pipeline& renyi() {
    static const Pipeline p = pipeline(build_renyi());
    return p;
}
const Pipeline& mp() {
    static const Pipeline p = pipeline(build_infinite_mp(0.5));
    return p;
}

// Closed forms for affine full-branch maps.
double oracle_pressure(const std::vector<double>& slopes, double t) {
    double mx = -INFINITY;
    for (double s : slopes) mx = std::max(mx, -t * std::log(std::abs(s)));
    double acc = 0.0;
    for (double s : slopes) acc += std::exp(-t * std::log(std::abs(s)) - mx);
    return mx + std::log(acc);
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10 * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

double oracle_spectrum(const std::vector<double>& slopes, double alpha) {
    return golden_min([&](double t) { return (oracle_pressure(slopes, t) + t * alpha) / alpha; }, -400.0, 400.0);
}

bool criterion_affine() {
    Criterion c(1, "affine oracle equivalence");
    std::mt19937_64 rng(20240601);
    double worst_p = 0.0, worst_l = 0.0;
    int compared = 0;
    for (int k = 0; k < 20; ++k) {
        std::uniform_int_distribution<int> nb(2, 6);
        std::uniform_real_distribution<double> u(0.2, 1.0), fill(0.6, 1.0);
        std::bernoulli_distribution flip(0.3);
        const int n = nb(rng);
        std::vector<double> w(static_cast<std::size_t>(n));
        double sum = 0.0;
        for (auto& x : w) sum += (x = u(rng));
        const double cover = fill(rng);
        std::vector<AffineBranch> branches;
        std::vector<double> slopes;
        double lo = 0.0;
        for (double x : w) {
            const double len = cover * x / sum;
            const double s = (flip(rng) ? -1.0 : 1.0) / len;
            branches.push_back({{lo, lo + len}, s});
            slopes.push_back(s);
            lo += len;
        }
        const auto m = build_linear_custom(branches);
        const auto p = pipeline(m, 2.0 * std::log(1e3));
        for (int i = 0; i <= 60; ++i) {
            const double t = 0.05 * i;
            worst_p = std::max(worst_p, std::abs(p.engine->pressure(t).value - oracle_pressure(slopes, t)));
        }
        for (const auto& q : p.spectrum.points()) {
            if (!q.present || q.bound) continue;
            worst_l = std::max(worst_l, std::abs(q.L - oracle_spectrum(slopes, q.alpha)));
            ++compared;
        }
    }
    c.expect(worst_p <= 1e-6, "max |P - log sum |s|^-t| on [0,3] = %.3e (tol 1e-6)", worst_p);
    c.expect(compared > 0 && worst_l <= 1e-5, "max |L - closed-form transform| = %.3e over %d points (tol 1e-5)", worst_l,
             compared);
    return c.finish();
}

bool criterion_gauss() {
    Criterion c(2, "gauss constants");
    const auto& g = gauss();
    const double lam = M_PI * M_PI / (6.0 * std::log(2.0));
    const double tstar = critical_t(g.engine->model());
    c.expect(std::abs(tstar - 0.5) <= 0.01, "critical t = %.6f (0.5 +- 0.01)", tstar);
    c.expect(std::abs(g.engine->dim_estimate() - 1.0) <= 0.01, "dim = %.9f (1 +- 0.01)", g.engine->dim_estimate());
    const double dP = -pressure_derivative(*g.curve, 1.0);
    c.expect(std::abs(dP - 2.37314) <= 0.05, "-P'(1) = %.6f (2.37314 +- 0.05)", dP);
    c.expect(std::abs(g.feat.alpha_min - 0.96242) <= 1e-3, "alpha_min = %.6f (0.96242 +- 0.001)", g.feat.alpha_min);
    c.expect(std::abs(g.feat.alpha_max_at - 2.373) <= 0.05 && g.feat.L_max >= 0.99,
             "maximum at %.6f (2.373 +- 0.05) with L = %.9f (>= 0.99)", g.feat.alpha_max_at, g.feat.L_max);
    const double L30 = g.spectrum.at(30.0).L;
    c.expect(L30 >= 0.50 && L30 <= 0.60, "L(30) = %.6f (in [0.50, 0.60])", L30);
    const double as = g.feat.asymptote.value_or(NAN);
    c.expect(std::abs(as - 0.5) <= 0.02, "asymptote = %.6f +- %.1e (0.5 +- 0.02)", as, g.feat.asymptote_error);
    (void)lam;
    return c.finish();
}

bool criterion_renyi() {
    Criterion c(3, "renyi regime");
    const auto& r = renyi();
    for (double t : {1.0, 1.2, 1.5}) {
        const double p = r.engine->pressure(t).value;
        c.expect(std::abs(p) <= 5e-3, "P(%.1f) = %.3e (0 +- 5e-3)", t, p);
    }
    const double tstar = critical_t(r.engine->model());
    c.expect(std::abs(tstar - 0.5) <= 0.01, "critical t = %.6f (0.5 +- 0.01)", tstar);
    const double L = r.spectrum.at(0.05).L;
    c.expect(L >= 0.95, "L(0.05) = %.6f (>= 0.95)", L);
    c.expect(r.spectrum.at(0.01).L >= L, "L(0.01) = %.6f >= L(0.05)", r.spectrum.at(0.01).L);
    const double as = r.feat.asymptote.value_or(NAN);
    c.expect(std::abs(as - 0.5) <= 0.02, "asymptote = %.6f (0.5 +- 0.02)", as);
    return c.finish();
}

bool criterion_inflections() {
    Criterion c(4, "inflection structure");
    for (const auto* p : {&gauss(), &renyi()}) {
        const char* name = p == &gauss() ? "gauss" : "renyi";
        const auto& f = p->feat;
        c.expect(!f.inflections.empty(), "%s: %zu inflection(s), first at %.6f", name, f.inflections.size(),
                 f.inflections.empty() ? NAN : f.inflections.front());
        const bool past = std::all_of(f.inflections.begin(), f.inflections.end(),
                                      [&](double a) { return a > f.alpha_star.value; });
        c.expect(past, "%s: every inflection exceeds alpha* = %.6f", name, f.alpha_star.value);
        int significant = 0, disagree = 0;
        for (const auto& row : inflection_consistency(p->spectrum)) {
            if (!row.significant) continue;
            ++significant;
            if ((row.residual > 0) != (row.second_difference > 0)) ++disagree;
        }
        c.expect(significant > 0 && disagree == 0, "%s: residual vs second difference sign: %d disagreements of %d",
                 name, disagree, significant);
    }
    return c.finish();
}

bool criterion_regimes() {
    Criterion c(5, "regime classification");
    c.expect(classify_regime(*gauss().engine).regime == Regime::gauss_like, "gauss -> gauss_like");
    c.expect(classify_regime(*renyi().engine).regime == Regime::renyi_like, "renyi -> renyi_like");
    const auto& m = mp();
    c.expect(classify_regime(*m.engine).regime == Regime::infinite_mp_like, "infinite_mp(0.5) -> infinite_mp_like");
    const double as = m.feat.alpha_star.value;
    c.expect(as > 0.1, "alpha* = %.6f (> 0.1)", as);
    int left = 0;
    double worst = 0.0;
    for (const auto& q : m.spectrum.points()) {
        if (!q.present || q.alpha > as) continue;
        ++left;
        worst = std::max(worst, std::abs(q.L - m.engine->dim_estimate()));
    }
    c.expect(left > 0 && worst <= 0.02, "L = dim on %d grid points left of alpha*, max deviation %.3e (0.02)", left, worst);
    const PressureEngine path(build_pathological(5));
    c.expect(classify_regime(path).regime == Regime::degenerate, "pathological(5) -> degenerate");
    bool inf_below = true, zero_above = true;
    for (double t = 0.0; t < 0.95; t += 0.05) inf_below = inf_below && path.pressure(t).infinite;
    for (double t = 1.0; t <= 3.0 + 1e-12; t += 0.1) {
        const auto e = path.pressure(t);
        zero_above = zero_above && !e.infinite && e.value == 0.0;
    }
    c.expect(inf_below, "P = +inf on t in [0, 0.95)");
    c.expect(zero_above, "P = 0 on t in [1, 3]");
    return c.finish();
}

bool criterion_routes() {
    Criterion c(6, "route cross-validation");
    for (const auto* p : {&renyi(), &mp()}) {
        const auto* scheme = p->engine->induced();
        for (double t : {0.6, 0.75, 0.9}) {
            const auto a = pressure_via_inducing(*scheme, t);
            const auto b = p->engine->pressure_by(t, Route::cylinder);
            const double gap = std::abs(a.value - b.value);
            c.expect(gap <= a.error + b.error, "%s t=%.2f: induced %.12f, truncated+tail %.12f, gap %.2e <= %.2e",
                     p->engine->model().describe().c_str(), t, a.value, b.value, gap, a.error + b.error);
        }
    }
    return c.finish();
}

bool criterion_monotone() {
    Criterion c(7, "monotone approximation");
    std::mt19937_64 rng(77);
    const std::vector<MapModel> models{build_gauss(), build_renyi(), build_infinite_mp(0.5)};
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<long> nn(2, 300);
    std::uniform_real_distribution<double> tt(0.55, 3.0);
    int bad = 0;
    for (int k = 0; k < 50; ++k) {
        const auto& m = models[static_cast<std::size_t>(pick(rng))];
        long a = nn(rng), b = nn(rng);
        if (a > b) std::swap(a, b);
        if (a == b) ++b;
        const double t = tt(rng);
        const double pa = pressure_truncated(m, t, a).value, pb = pressure_truncated(m, t, b).value;
        if (pa > pb + 1e-12) {
            ++bad;
            std::printf("    %s t=%.4f: P_%ld = %.15f > P_%ld = %.15f\n", m.describe().c_str(), t, a, pa, b, pb);
        }
    }
    c.expect(bad == 0, "P_N nondecreasing in N: %d violations over 50 probes", bad);
    const std::vector<long> Ns{4, 16, 64, 256};
    for (const auto* p : {&gauss(), &renyi()}) {
        for (double alpha : {0.8, 1.5, 3.0, 8.0}) {
            const auto full = p->spectrum.at(alpha);
            if (!full.present) continue;
            const auto ts = truncated_spectra(p->engine->model(), alpha, Ns, full.L);
            double top = -INFINITY;
            bool below = true;
            for (const auto& v : ts.values)
                if (v.present) {
                    top = std::max(top, v.L);
                    below = below && v.L <= full.L + full.L_error + 1e-9;
                }
            c.expect(ts.monotone && below, "%s alpha=%.1f: L_N monotone, max L_N = %.6f <= L = %.6f",
                     p->engine->model().describe().c_str(), alpha, top, full.L);
        }
    }
    return c.finish();
}

bool criterion_symbolic() {
    Criterion c(8, "symbolic layer");
    constexpr long kT = 50;
    auto mismatches = [&](const TransitionRule& r, const std::set<std::pair<long, long>>& tab) {
        long bad = 0;
        for (long i = 0; i < kT; ++i)
            for (long j = 0; j < kT; ++j) bad += r.allowed(i, j) != (tab.count({i, j}) > 0);
        return bad;
    };
    std::set<std::pair<long, long>> ren, inf;
    for (long n = 0; n < kT; ++n) ren.insert({0, n});
    for (long n = 1; n < kT; ++n) ren.insert({n, n - 1});
    for (long n = 0; 2 * n < kT; ++n)
        for (long k = 0; k < kT; ++k) inf.insert({2 * n, k});
    for (long n = 1; 2 * n - 1 < kT; ++n) inf.insert({2 * n - 1, 2 * n - 2});
    for (long n = 0; 2 * n < kT; ++n) inf.insert({1, 2 * n});
    long bad = mismatches(build_rule(RuleKind::renewal), ren) + mismatches(build_rule(RuleKind::infinite_renewal), inf);
    for (long N = 1; N <= 5; ++N) {
        std::set<std::pair<long, long>> t;
        for (long i = 0; i <= N; ++i)
            for (long n = 0; n < kT; ++n) t.insert({i, n});
        for (long k = 0; k <= N; ++k) t.insert({N + 1, k});
        for (long n = N + 2; n + 2 < kT; ++n) t.insert({n + 2, n + 1});
        bad += mismatches(build_rule(RuleKind::n_renewal, N), t);
    }
    c.expect(bad == 0, "literal tables on indices < 50: %ld mismatching entries", bad);

    double worst = 0.0, spread = 0.0;
    const std::vector<TransitionRule> rules{build_rule(RuleKind::renewal), build_rule(RuleKind::n_renewal, 2),
                                            build_rule(RuleKind::n_renewal, 4), build_rule(RuleKind::infinite_renewal)};
    for (const auto& r : rules) {
        for (long cap : {10L, 25L, 40L}) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cap, cap);
            for (long i = 0; i < cap; ++i)
                for (long j = 0; j < cap; ++j) A(i, j) = r.allowed(i, j);
            const double rho = std::log(A.eigenvalues().cwiseAbs().maxCoeff());
            const auto block = connected_block(r, 0, cap);
            double lo = INFINITY, hi = -INFINITY;
            for (long b : block) {
                const double e = gurevich_pressure(r, CyclePotential::constant(0.0), b, 500, cap).estimate;
                worst = std::max(worst, std::abs(e - rho));
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
            spread = std::max(spread, hi - lo);
        }
    }
    c.expect(worst <= 1e-6, "max |Gurevich - log spectral radius| = %.3e (1e-6)", worst);
    c.expect(spread <= 1e-9, "max spread over base vertices in the block = %.3e (1e-9)", spread);
    for (long N : {2L, 3L}) {
        const auto rep = itinerary_conjugacy_check(build_renyi(), N, 4);
        c.expect(rep.mismatch_count == 0, "renyi N=%ld depth 4: %ld words, %ld cycles, %ld mismatches", N,
                 rep.words_checked, rep.cycles_checked, rep.mismatch_count);
    }
    return c.finish();
}

bool criterion_orbits() {
    Criterion c(9, "orbit layer");
    const double lam = M_PI * M_PI / (6.0 * std::log(2.0));
    const double med = median_lambda(sample_lyapunov(build_gauss(), 1000, 10000, 1));
    c.expect(std::abs(med - 2.37314) <= 0.01 * 2.37314, "gauss Birkhoff median = %.6f (%.5f +- 1%%)", med, lam);
    std::mt19937_64 rng(2024);
    std::vector<double> gaps;
    for (int i = 0; i < 100; ++i) {
        const auto l = lyapunov_via_approximants(Real::random(rng), 50);
        if (l.valid) gaps.push_back(std::abs(l.a - l.b));
    }
    std::sort(gaps.begin(), gaps.end());
    const double mg = gaps.empty() ? INFINITY : gaps[gaps.size() / 2];
    c.expect(gaps.size() >= 95 && mg <= 0.05, "median |a - b| at n=50 over %zu points = %.4f (0.05)", gaps.size(), mg);
    const auto g = lyapunov_via_approximants(Real::parse("golden"), 50);
    const double two_log_phi = 2.0 * std::log((1.0 + std::sqrt(5.0)) / 2.0);
    c.expect(g.valid && std::abs(g.b - two_log_phi) <= 1e-10, "golden mean: b = %.15f, 2 log phi = %.15f", g.b,
             two_log_phi);
    return c.finish();
}

}  // namespace

int main() {
    int failed = 0;
    for (auto f : {criterion_affine, criterion_gauss, criterion_renyi, criterion_inflections, criterion_regimes,
                   criterion_routes, criterion_monotone, criterion_symbolic, criterion_orbits})
        failed += !f();
    std::printf("%d of 9 criteria failed\n", failed);
    return failed ? 1 : 0;
}
