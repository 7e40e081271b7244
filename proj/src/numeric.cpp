#include "numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "errors.hpp"

namespace thermokit {

void LogSumExp::add(double x) {
    if (std::isnan(x)) fail(ErrorCode::numeric, "NaN in log-sum-exp accumulation");
    if (!(x > -kInf)) return;
    if (x > shift_) {
        const double r = std::exp(shift_ - x);
        sum_ *= r;
        comp_ *= r;
        shift_ = x;
    }
    const double term = std::exp(x - shift_);
    const double s = sum_ + term;
    if (std::abs(sum_) >= term)
        comp_ += (sum_ - s) + term;
    else
        comp_ += (term - s) + sum_;
    sum_ = s;
}

double LogSumExp::value() const {
    if (empty()) return -kInf;
    return shift_ + std::log(sum_ + comp_);
}

ChebGrid::ChebGrid(std::vector<Panel> panels, int nodes_per_panel)
    : panels_(std::move(panels)), m_(nodes_per_panel) {
    require(!panels_.empty() && m_ >= 2, "grid needs at least one panel and two nodes");
    for (std::size_t p = 0; p < panels_.size(); ++p) {
        require(panels_[p].hi > panels_[p].lo, "grid panels must have positive width");
        if (p > 0) require(panels_[p].lo == panels_[p - 1].hi, "grid panels must be contiguous");
    }
    ref_nodes_.resize(m_);
    bary_.resize(m_);
    for (int j = 0; j < m_; ++j) {
        const double th = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * m_);
        ref_nodes_[j] = std::cos(th);
        bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * std::sin(th);
    }
    nodes_.reserve(panels_.size() * m_);
    for (const auto& pn : panels_) {
        const double mid = 0.5 * (pn.lo + pn.hi), half = 0.5 * (pn.hi - pn.lo);
        for (int j = 0; j < m_; ++j) nodes_.push_back(mid + half * ref_nodes_[j]);
    }
}

ChebGrid ChebGrid::graded_left(double a, double b, int levels, int nodes_per_panel) {
    std::vector<Panel> panels;
    double edge = a + (b - a) * std::ldexp(1.0, -levels);
    panels.push_back({a, edge});
    for (int k = levels; k >= 1; --k) {
        const double next = (k == 1) ? b : a + (b - a) * std::ldexp(1.0, -(k - 1));
        panels.push_back({edge, next});
        edge = next;
    }
    return ChebGrid(std::move(panels), nodes_per_panel);
}

int ChebGrid::locate(double x) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                               [](double v, const Panel& p) { return v < p.hi; });
    if (it == panels_.end()) return static_cast<int>(panels_.size()) - 1;
    return static_cast<int>(it - panels_.begin());
}

int ChebGrid::weights(double x, std::span<double> out) const {
    const int p = locate(x);
    const Panel& pn = panels_[p];
    const double z = (2.0 * x - pn.lo - pn.hi) / (pn.hi - pn.lo);
    double denom = 0.0;
    for (int j = 0; j < m_; ++j) {
        const double d = z - ref_nodes_[j];
        if (d == 0.0) {
            std::fill(out.begin(), out.begin() + m_, 0.0);
            out[j] = 1.0;
            return p;
        }
        out[j] = bary_[j] / d;
        denom += out[j];
    }
    const double inv = 1.0 / denom;
    for (int j = 0; j < m_; ++j) out[j] *= inv;
    return p;
}

double ChebGrid::interpolate(std::span<const double> values, double x) const {
    std::vector<double> w(m_);
    const int p = weights(x, w);
    double s = 0.0;
    for (int j = 0; j < m_; ++j) s += w[j] * values[static_cast<std::size_t>(p) * m_ + j];
    return s;
}

static double cheb_endpoint_derivative(int k, int order) {
    const double k2 = static_cast<double>(k) * k;
    switch (order) {
        case 0: return 1.0;
        case 1: return k2;
        case 2: return k2 * (k2 - 1.0) / 3.0;
        case 3: return k2 * (k2 - 1.0) * (k2 - 4.0) / 15.0;
        default: fail(ErrorCode::invalid_argument, "endpoint derivative order must be <= 3");
    }
}

std::vector<double> ChebGrid::endpoint_functional(bool at_hi, int order) const {
    std::vector<double> out(size(), 0.0);
    const std::size_t p = at_hi ? panels_.size() - 1 : 0;
    const double scale = std::pow(2.0 / (panels_[p].hi - panels_[p].lo), order);
    for (int j = 0; j < m_; ++j) {
        double acc = 0.0;
        for (int k = 0; k < m_; ++k) {
            const double ckj = (k == 0 ? 1.0 : 2.0) / m_ *
                               std::cos(k * (2.0 * j + 1.0) * std::numbers::pi / (2.0 * m_));
            double d = cheb_endpoint_derivative(k, order);
            if (!at_hi && (k + order) % 2 == 1) d = -d;
            acc += d * ckj;
        }
        out[p * m_ + j] = acc * scale;
    }
    return out;
}

double ChebGrid::resolution(std::span<const double> values) const {
    double fmax = 0.0;
    for (double v : values) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t p = 0; p < panels_.size(); ++p) {
        auto c = cheb_coefficients(values.subspan(p * m_, m_));
        worst = std::max(worst, std::abs(c[m_ - 1]) + std::abs(c[m_ - 2]));
    }
    return worst / fmax;
}

std::vector<double> cheb_coefficients(std::span<const double> values) {
    const int m = static_cast<int>(values.size());
    std::vector<double> c(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int j = 0; j < m; ++j)
            s += values[j] * std::cos(k * (2.0 * j + 1.0) * std::numbers::pi / (2.0 * m));
        c[k] = s * (k == 0 ? 1.0 : 2.0) / m;
    }
    return c;
}

ChebEval cheb_evaluate(std::span<const double> coeffs, double z) {
    double t0 = 1.0, t1 = z, d0 = 0.0, d1 = 1.0, s0 = 0.0, s1 = 0.0;
    ChebEval r{coeffs[0], 0.0, 0.0};
    if (coeffs.size() > 1) {
        r.f += coeffs[1] * t1;
        r.df += coeffs[1] * d1;
    }
    for (std::size_t k = 2; k < coeffs.size(); ++k) {
        const double t2 = 2.0 * z * t1 - t0;
        const double d2 = 2.0 * t1 + 2.0 * z * d1 - d0;
        const double s2 = 4.0 * d1 + 2.0 * z * s1 - s0;
        r.f += coeffs[k] * t2;
        r.df += coeffs[k] * d2;
        r.d2f += coeffs[k] * s2;
        t0 = t1; t1 = t2;
        d0 = d1; d1 = d2;
        s0 = s1; s1 = s2;
    }
    return r;
}

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0)) return kInf;
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result res;
    const int status = gsl_sf_hzeta_e(s, a, &res);
    if (status != GSL_SUCCESS && status != GSL_EUNDRFLW)
        fail(ErrorCode::numeric, "Hurwitz zeta failed at s=" + std::to_string(s));
    return res.val;
}

double tail_integral(const std::function<double(double)>& h, double a, double rel_tol, double u_max) {
    using Rule = boost::math::quadrature::gauss<double, 10>;
    CompensatedSum total;
    double lo = a;
    for (int k = 0; lo < u_max; ++k) {
        const double hi = 2.0 * lo;
        const double block = Rule::integrate(h, lo, hi);
        total.add(block);
        if (k >= 3 && std::abs(block) <= rel_tol * std::abs(total.value())) break;
        lo = hi;
    }
    return total.value();
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("THERMOKIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            if (failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace thermokit
