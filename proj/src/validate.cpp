#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cylinders.hpp"
#include "numeric.hpp"

namespace thermokit {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

long sampled_branches(const MapModel& m, long cap) { return m.branch_count() ? std::min(*m.branch_count(), cap) : cap; }

}  // namespace

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate(const MapModel& model, int depth) {
    ValidationReport r;
    const long nb = sampled_branches(model, 200);

    {
        std::vector<Interval> iv;
        for (long n = 1; n <= nb; ++n) iv.push_back(model.branch(n).interval);
        std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        bool ok = iv.front().lo >= 0.0 && iv.back().hi <= 1.0;
        for (std::size_t i = 1; i < iv.size(); ++i) ok = ok && iv[i].lo >= iv[i - 1].hi - 1e-12;
        r.checks.push_back({"disjoint", ok, "branches 1.." + std::to_string(nb)});
    }
    {
        double worst = 0.0, inv = 0.0;
        for (long n = 1; n <= nb; ++n) {
            const Branch b = model.branch(n);
            const double a = b.forward(b.interval.lo), c = b.forward(b.interval.hi);
            worst = std::max(worst, std::min(std::abs(a) + std::abs(c - 1.0), std::abs(a - 1.0) + std::abs(c)));
            const double p0 = b.inverse(0.0), p1 = b.inverse(1.0);
            worst = std::max(worst, std::min(std::abs(p0 - b.interval.lo) + std::abs(p1 - b.interval.hi),
                                             std::abs(p0 - b.interval.hi) + std::abs(p1 - b.interval.lo)));
            for (int i = 0; i <= 10; ++i) {
                const double y = i / 10.0;
                inv = std::max(inv, std::abs(b.forward(b.inverse(y)) - y));
            }
        }
        r.inverse_error = inv;
        r.checks.push_back({"surjective", worst <= 1e-9, "max endpoint defect " + fmt_num(worst)});
        r.checks.push_back({"inverse", inv <= 1e-10, "max |T(psi(y)) - y| " + fmt_num(inv)});
    }
    const auto par = model.parabolic();
    {
        const double p = par ? par->point : -1.0;
        for (int m = 1; m <= 8 && r.expansion_m == 0; ++m) {
            bool ok = true;
            for (int i = 0; i < 1000 && ok; ++i) {
                double x = (i + 0.5) / 1000.0;
                if (par && std::abs(x - p) < 1e-3) continue;
                if (model.locate(x) == 0) continue;  // gap or truncated-away branch
                double d = 1.0;
                for (int k = 0; k < m; ++k) {
                    const long n = model.locate(x);
                    if (n == 0) break;
                    d *= model.derivative(n, x);
                    x = model.forward(n, x);
                }
                ok = d > 1.0;
            }
            if (ok) r.expansion_m = m;
        }
        r.checks.push_back({"expansion", r.expansion_m > 0,
                            r.expansion_m ? "m = " + std::to_string(r.expansion_m) : "no m in 1..8"});
    }
    if (par) {
        const double fx = model.forward(par->branch, par->point), d = model.derivative(par->branch, par->point);
        const double off = model.derivative(par->branch, par->point + 1e-6);
        const bool ok = std::abs(fx - par->point) <= 1e-12 && std::abs(d - 1.0) <= 1e-12 && off > 1.0;
        r.checks.push_back({"parabolic", ok, "T(p) - p = " + fmt_num(fx - par->point) + ", T'(p) = " + fmt_num(d)});
    }
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (long n = 1; n <= nb; ++n) {
            const Branch b = model.branch(n);
            const double x = std::log(static_cast<double>(n));
            const double y = 0.5 * (std::log(b.deriv_inf) + std::log(b.deriv_sup));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(nb);
        r.gamma = nb > 1 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.0;
        r.log_C = (sy - r.gamma * sx) / k;
        bool ok = true;
        std::string detail = "gamma = " + fmt_num(r.gamma);
        if (auto g0 = model.log_growth(std::log(200.0))) {
            constexpr double V = 1e8;
            const auto g1 = *model.log_growth(V);
            const double gam = g1.second;
            r.growth_drift = (g1.first - gam * V) - (g0->first - gam * std::log(200.0));
            ok = std::abs(r.growth_drift) <= 2.0;
            detail += ", far exponent " + fmt_num(gam) + ", drift " + fmt_num(r.growth_drift);
        }
        if (model.non_condition5()) ok = false;
        r.checks.push_back({"growth", ok, detail});
    }
    {
        const long N = sampled_branches(model, 6);
        bool ok = true;
        for (int d = 1; d <= depth; ++d) {
            double worst = 0.0;
            for_each_cylinder(model, N, d, [&](const CylinderWord& c) {
                worst = std::max(worst, std::log(c.deriv_sup / c.deriv_inf));
            });
            r.rho.push_back(worst / d);
            if (d > 1) ok = ok && r.rho[d - 1] <= r.rho[d - 2] * (1.0 + 1e-9) + 1e-12;
        }
        r.checks.push_back({"distortion", ok, "rho_" + std::to_string(depth) + " = " + fmt_num(r.rho.back())});
    }
    return r;
}

}  // namespace thermokit
