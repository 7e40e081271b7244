#include "induced.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"

namespace thermokit {

namespace {

constexpr int kBaseNodes = 24;
constexpr int kInnerNodes = 24;
constexpr long kBudget = 40'000'000;  // explicit (n, j) pairs

MapModel checked(MapModel model, long N_max, long J_max) {
    const auto par = model.parabolic();
    if (!par || par->branch != 1 || par->point != 0.0)
        fail(ErrorCode::invalid_argument, "inducing needs a parabolic fixed point at 0 in branch 1");
    require(N_max >= 2 && J_max >= 2, "inducing cutoffs need N_max >= 2 and J_max >= 2");
    if (N_max * J_max > kBudget) fail(ErrorCode::budget, "inducing cutoffs exceed the branch budget");
    return model;
}

long clamp_N(const MapModel& m, long N_max) {
    if (auto c = m.branch_count()) return std::min(N_max, *c);
    return N_max;
}

}  // namespace

InducedScheme::InducedScheme(MapModel model, long N_max, long J_max)
    : model_(checked(std::move(model), N_max, J_max)),
      N_max_(clamp_N(model_, N_max)),
      J_max_(J_max),
      base_grid_(ChebGrid::single(0.5, 1.0, kBaseNodes)),
      inner_grid_(ChebGrid::single(0.0, 1.0, kInnerNodes)) {
    require(N_max_ >= 2, "the model has no branch besides the parabolic one");
    base_lo_ = model_.branch(2).interval.lo;
    base_hi_ = 1.0;
    if (std::abs(base_lo_ - 0.5) > 1e-12)
        fail(ErrorCode::invalid_argument, "inducing base must start at 1/2");
    branch_tail_ = !model_.finite();
    if (branch_tail_ && !model_.tail(0.5))
        fail(ErrorCode::invalid_argument, "countable model without branch-tail asymptotics");

    const std::size_t MA = inner_grid_.size(), MB = base_grid_.size();
    const std::size_t NB = static_cast<std::size_t>(N_max_ - 1), mB = kBaseNodes, mA = kInnerNodes;
    in_panel_.resize(MA * NB);
    in_lj_.resize(MA * NB);
    in_bw_.resize(MA * NB * mB);
    parallel_for(MA, [&](std::size_t a) {
        const double x = inner_grid_.node(a);
        for (std::size_t k = 0; k < NB; ++k) {
            const long n = static_cast<long>(k) + 2;
            in_lj_[a * NB + k] = model_.log_inverse_jacobian(n, x);
            in_panel_[a * NB + k] =
                base_grid_.weights(model_.inverse(n, x), std::span<double>(in_bw_.data() + (a * NB + k) * mB, mB));
        }
    });
    if (branch_tail_) {
        for (std::size_t a = 0; a < MA; ++a) in_tail_.push_back(*model_.tail(inner_grid_.node(a)));
        for (int k = 0; k <= 3; ++k) base_end_.push_back(base_grid_.endpoint_functional(true, k));
    }
    inner_end0_ = inner_grid_.endpoint_functional(false, 0);
    inner_end1_ = inner_grid_.endpoint_functional(false, 1);

    const std::size_t K0 = static_cast<std::size_t>(J_max_);
    orbit_x_.resize(MB * K0);
    orbit_G_.resize(MB * K0);
    orbit_panel_.resize(MB * K0);
    orbit_bw_.resize(MB * K0 * mA);
    decay_s_.resize(MB);
    decay_r_.resize(MB);
    const bool closed = model_.closed_form_iterates();
    parallel_for(MB, [&](std::size_t i) {
        const double y = base_grid_.node(i);
        double x = y, G = 0.0;
        for (std::size_t k = 0; k < K0; ++k) {
            if (closed) {
                x = model_.parabolic_iterate(y, static_cast<double>(k));
                G = model_.parabolic_iterate_log_jacobian(y, static_cast<double>(k));
            }
            orbit_x_[i * K0 + k] = x;
            orbit_G_[i * K0 + k] = G;
            orbit_panel_[i * K0 + k] =
                inner_grid_.weights(x, std::span<double>(orbit_bw_.data() + (i * K0 + k) * mA, mA));
            if (!closed) {
                G += model_.log_inverse_jacobian(1, x);
                x = model_.inverse(1, x);
            }
        }
        const std::size_t k2 = K0 - 1, k1 = k2 / 2;
        const double lr = std::log(static_cast<double>(k2) / static_cast<double>(k1));
        decay_s_[i] = -(orbit_G_[i * K0 + k2] - orbit_G_[i * K0 + k1]) / lr;
        decay_r_[i] = -std::log(orbit_x_[i * K0 + k2] / orbit_x_[i * K0 + k1]) / lr;
    });

    tail_.branch_gamma = branch_tail_ ? model_.tail(0.5)->gamma : 0.0;
    double s = 0.0;
    for (double v : decay_s_) s += v;
    tail_.jacobian_decay = s / static_cast<double>(MB);

    // Fit of |I_{n,j}| ~ |I_n| j^-rho on n = 2, far j, then constants over the enumeration.
    const auto all = branches(std::min<long>(N_max_, 50), J_max_);
    const long J = J_max_;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& b : all) {
        if (b.n != 2 || b.j < std::max<long>(4, J / 8)) continue;
        const double lx = std::log(static_cast<double>(b.j)), ly = std::log(b.interval.length());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    tail_.rho = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    tail_.c_lo = kInf;
    tail_.c_hi = 0.0;
    for (const auto& b : all) {
        const double ratio =
            b.interval.length() / (model_.branch(b.n).interval.length() * std::pow(static_cast<double>(b.j), -tail_.rho));
        tail_.c_lo = std::min(tail_.c_lo, ratio);
        tail_.c_hi = std::max(tail_.c_hi, ratio);
    }
}

std::vector<InducedBranch> InducedScheme::branches(long n_cap, long j_cap) const {
    n_cap = n_cap > 0 ? std::min(n_cap, N_max_) : N_max_;
    j_cap = j_cap > 0 ? std::min(j_cap, J_max_) : J_max_;
    if ((n_cap - 1) * j_cap > kBudget) fail(ErrorCode::budget, "induced branch enumeration exceeds the budget");
    // Orbits of three base points under the inverse parabolic branch: escape partition of branch 1.
    constexpr int S = 3;
    const double ys[S] = {base_lo_, 0.5 * (base_lo_ + base_hi_), base_hi_};
    std::vector<std::array<double, S>> x(static_cast<std::size_t>(j_cap)), G(static_cast<std::size_t>(j_cap));
    const bool closed = model_.closed_form_iterates();
    for (int s = 0; s < S; ++s) {
        double xv = ys[s], gv = 0.0;
        for (long k = 0; k < j_cap; ++k) {
            if (closed) {
                xv = model_.parabolic_iterate(ys[s], static_cast<double>(k));
                gv = model_.parabolic_iterate_log_jacobian(ys[s], static_cast<double>(k));
            }
            x[static_cast<std::size_t>(k)][s] = xv;
            G[static_cast<std::size_t>(k)][s] = gv;
            if (!closed) {
                gv += model_.log_inverse_jacobian(1, xv);
                xv = model_.inverse(1, xv);
            }
        }
    }
    std::vector<InducedBranch> out;
    out.reserve(static_cast<std::size_t>((n_cap - 1) * j_cap));
    for (long n = 2; n <= n_cap; ++n) {
        for (long j = 1; j <= j_cap; ++j) {
            const auto& xs = x[static_cast<std::size_t>(j - 1)];
            const auto& gs = G[static_cast<std::size_t>(j - 1)];
            double lmin = kInf, lmax = -kInf;
            double z[S];
            for (int s = 0; s < S; ++s) {
                z[s] = model_.inverse(n, xs[s]);
                const double l = gs[s] + model_.log_inverse_jacobian(n, xs[s]);
                lmin = std::min(lmin, l);
                lmax = std::max(lmax, l);
            }
            out.push_back({n, j, {std::min(z[0], z[S - 1]), std::max(z[0], z[S - 1])}, std::exp(-lmax), std::exp(-lmin)});
        }
    }
    return out;
}

bool InducedScheme::finite(double t, double q) const {
    if (!(q >= 0.0) || !std::isfinite(t)) return false;
    if (branch_tail_ && !(tail_.branch_gamma * t > 1.0)) return false;
    if (q == 0.0 && !(tail_.jacobian_decay * t > 1.0)) return false;
    return true;
}

std::vector<double> InducedScheme::inner_matrix(double t, double& tail_err, double& log_scale) const {
    const std::size_t MA = inner_grid_.size(), MB = base_grid_.size();
    const std::size_t NB = static_cast<std::size_t>(N_max_ - 1), mB = kBaseNodes;
    std::vector<double> K(MA * MB, 0.0);
    tail_err = 0.0;
    double S = -kInf;
    for (double lj : in_lj_) S = std::max(S, t * lj);
    if (!std::isfinite(S)) S = 0.0;
    log_scale = S;
    const double unscale = std::exp(-S);
    for (std::size_t a = 0; a < MA; ++a) {
        double* row = K.data() + a * MB;
        double mass = 0.0;
        for (std::size_t k = 0; k < NB; ++k) {
            const double w = std::exp(t * in_lj_[a * NB + k] - S);
            mass += w;
            const double* bw = in_bw_.data() + (a * NB + k) * mB;
            double* dst = row + static_cast<std::size_t>(in_panel_[a * NB + k]) * mB;
            for (std::size_t j = 0; j < mB; ++j) dst[j] += w * bw[j];
        }
        if (!branch_tail_) continue;
        const BranchTail& tl = in_tail_[a];
        const double s = tl.gamma * t, sh = static_cast<double>(N_max_) + 1.0 + tl.shift;
        const double Z0 = hurwitz_zeta(s, sh), Z1 = hurwitz_zeta(s + 1, sh), Z2 = hurwitz_zeta(s + 2, sh),
                     Z3 = hurwitz_zeta(s + 3, sh), Z4 = hurwitz_zeta(s + 4, sh);
        const double w = tl.w2_per_t * t;
        const double c[4] = {unscale * (Z0 + w * Z2), unscale * (tl.d1 * Z1 + tl.d2 * Z2 + tl.d3 * Z3 + w * tl.d1 * Z3),
                             unscale * (0.5 * tl.d1 * tl.d1 * Z2 + tl.d1 * tl.d2 * Z3),
                             unscale * (tl.d1 * tl.d1 * tl.d1 / 6.0 * Z3)};
        for (int o = 0; o < 4; ++o) {
            const auto& e = base_end_[static_cast<std::size_t>(o)];
            for (std::size_t j = 0; j < MB; ++j) row[j] += c[o] * e[j];
        }
        mass += c[0];
        tail_err = std::max(tail_err, unscale * Z4 / mass);
    }
    return K;
}

std::vector<double> InducedScheme::return_matrix(double t, double q, double& tail_err, double& log_scale) const {
    const std::size_t MA = inner_grid_.size(), MB = base_grid_.size(), mA = kInnerNodes;
    const std::size_t K0 = static_cast<std::size_t>(J_max_);
    std::vector<double> K(MB * MA, 0.0);
    tail_err = 0.0;
    double S = -kInf;
    for (std::size_t i = 0; i < MB; ++i)
        for (std::size_t k = 0; k < K0; ++k)
            S = std::max(S, -q * static_cast<double>(k + 1) + t * orbit_G_[i * K0 + k]);
    if (!std::isfinite(S)) S = 0.0;
    log_scale = S;
    const double unscale = std::exp(-S);
    const double U = static_cast<double>(K0) - 0.5;
    const bool closed = model_.closed_form_iterates();
    for (std::size_t i = 0; i < MB; ++i) {
        double* row = K.data() + i * MA;
        double mass = 0.0;
        // Terms decrease in k, so past this point the rest is below w / (1 - e^-q).
        const double geo = q > 0.0 ? -std::expm1(-q) : 0.0;
        bool cut = false;
        for (std::size_t k = 0; k < K0; ++k) {
            const double w = std::exp(-q * static_cast<double>(k + 1) + t * orbit_G_[i * K0 + k] - S);
            if (geo > 0.0 && w < 1e-17 * geo * mass) {
                cut = true;
                break;
            }
            mass += w;
            const double* bw = orbit_bw_.data() + (i * K0 + k) * mA;
            double* dst = row + static_cast<std::size_t>(orbit_panel_[i * K0 + k]) * mA;
            for (std::size_t j = 0; j < mA; ++j) dst[j] += w * bw[j];
        }
        // k >= K0 through the continuous iterate; A(x) ~ A(0) + A'(0) x near the parabolic point.
        double S0 = 0.0, S1 = 0.0, rel = 0.0;
        if (!cut && q * U < 745.0) {
            const double y = base_grid_.node(i);
            if (closed) {
                if (q == 0.0) {
                    S0 = unscale * std::pow(1.0 + U * y, 1.0 - 2.0 * t) / (y * (2.0 * t - 1.0));
                    S1 = unscale * std::pow(1.0 + U * y, -2.0 * t) / (2.0 * t);
                } else {
                    auto h0 = [&](double u) {
                        return std::exp(-q * (u + 1.0) + t * model_.parabolic_iterate_log_jacobian(y, u) - S);
                    };
                    auto h1 = [&](double u) { return h0(u) * model_.parabolic_iterate(y, u); };
                    S0 = tail_integral(h0, U);
                    S1 = tail_integral(h1, U);
                }
                rel = 1.0 / (static_cast<double>(K0) * static_cast<double>(K0));
            } else {
                const double Kl = static_cast<double>(K0 - 1);
                const double GK = orbit_G_[i * K0 + K0 - 1], xK = orbit_x_[i * K0 + K0 - 1];
                const double p = decay_s_[i] * t, r = decay_r_[i];
                const double base = std::exp(t * GK - S);
                if (q == 0.0) {
                    S0 = base * Kl * std::pow(U / Kl, 1.0 - p) / (p - 1.0);
                    S1 = base * xK * Kl * std::pow(U / Kl, 1.0 - p - r) / (p + r - 1.0);
                } else {
                    auto h0 = [&](double u) { return base * std::exp(-q * (u + 1.0)) * std::pow(u / Kl, -p); };
                    auto h1 = [&](double u) { return h0(u) * xK * std::pow(u / Kl, -r); };
                    S0 = tail_integral(h0, U);
                    S1 = tail_integral(h1, U);
                }
                // Fitted exponents carry O(log k / k) drift.
                rel = 0.05;
            }
        }
        for (std::size_t j = 0; j < MA; ++j) row[j] += S0 * inner_end0_[j] + S1 * inner_end1_[j];
        mass += S0;
        tail_err = std::max(tail_err, rel * S0 / mass);
    }
    return K;
}

PressureEstimate InducedScheme::solve(std::span<const double> inner, double inner_err, double inner_scale, double t,
                                      double q, const SolveOptions& opts) const {
    double kerr = 0.0, S = 0.0;
    const auto R = return_matrix(t, q, kerr, S);
    S += inner_scale;
    const std::size_t MA = inner_grid_.size(), MB = base_grid_.size();
    std::vector<double> L(MB * MB, 0.0);
    for (std::size_t i = 0; i < MB; ++i)
        for (std::size_t a = 0; a < MA; ++a) {
            const double r = R[i * MA + a];
            if (r == 0.0) continue;
            const double* src = inner.data() + a * MB;
            double* dst = L.data() + i * MB;
            for (std::size_t j = 0; j < MB; ++j) dst[j] += r * src[j];
        }
    std::vector<double> f;
    const PowerResult pr = power_iterate(L, MB, f, opts);
    PressureEstimate e;
    e.method = Method::induced;
    e.N = N_max_;
    e.depth = pr.iterations;
    e.converged = pr.converged && pr.positive;
    e.lower = pr.lower + S;
    e.upper = pr.upper + S;
    e.value = 0.5 * (e.lower + e.upper);
    e.error = 0.5 * (pr.upper - pr.lower) + inner_err + kerr + base_grid_.resolution(f);
    if (!pr.positive) e.diagnostic = "induced recursion lost positivity";
    return e;
}

PressureEstimate InducedScheme::two_var_pressure(double t, double q, const SolveOptions& opts) const {
    if (!finite(t, q)) return PressureEstimate::divergent(Method::induced, "induced series diverges at (t, q)");
    double ierr = 0.0, iscale = 0.0;
    const auto A = inner_matrix(t, ierr, iscale);
    return solve(A, ierr, iscale, t, q, opts);
}

PressureEstimate InducedScheme::pressure(double t, const SolveOptions& opts) const {
    if (branch_tail_ && !(tail_.branch_gamma * t > 1.0))
        return PressureEstimate::divergent(Method::induced, "branch series diverges: gamma*t <= 1");
    double ierr = 0.0, iscale = 0.0;
    const auto A = inner_matrix(t, ierr, iscale);
    auto at = [&](double q) { return solve(A, ierr, iscale, t, q, opts); };

    double q_lo = 0.0;
    PressureEstimate lo_est;
    if (finite(t, 0.0)) {
        lo_est = at(0.0);
        if (lo_est.value <= 0.0) {
            PressureEstimate z = PressureEstimate::exact(0.0, Method::induced);
            z.N = N_max_;
            z.error = lo_est.error;
            z.upper = std::max(0.0, lo_est.error);
            z.diagnostic = "P(t, 0) <= 0: past the dimension root";
            return z;
        }
    } else {
        q_lo = 1e-3;
        for (lo_est = at(q_lo); lo_est.value <= 0.0 && q_lo > 1e-14; lo_est = at(q_lo)) q_lo *= 0.01;
        if (lo_est.value <= 0.0) {
            PressureEstimate z = PressureEstimate::exact(0.0, Method::induced);
            z.N = N_max_;
            z.diagnostic = "no positive root in q";
            return z;
        }
    }
    // P(t, .) has slope <= -1, so the root lies below q_lo + P(t, q_lo).
    double q_hi = q_lo + lo_est.value * (1.0 + 1e-12) + 1e-300;
    PressureEstimate hi_est = at(q_hi);
    for (int k = 0; hi_est.value > 0.0; ++k) {
        if (k > 60) fail(ErrorCode::nonconvergence, "induced root in q not bracketed");
        const double step = 2.0 * (q_hi - q_lo);
        q_lo = q_hi;
        lo_est = hi_est;
        q_hi += step;
        hi_est = at(q_hi);
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        [&](double q) { return at(q).value; }, q_lo, q_hi, lo_est.value, hi_est.value,
        [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(std::abs(a), std::abs(b)) + 1e-17; },
        iters);
    const double qs = 0.5 * (a + b);
    PressureEstimate fin = at(qs);
    PressureEstimate e;
    e.method = Method::induced;
    e.N = N_max_;
    e.depth = fin.depth;
    e.converged = fin.converged;
    e.value = qs;
    // |dP/dq| >= 1 since the return time is at least 1.
    e.error = fin.error + std::abs(fin.value) + 0.5 * (b - a);
    e.lower = qs - e.error;
    e.upper = qs + e.error;
    e.diagnostic = fin.diagnostic;
    return e;
}

double InducedScheme::dim_estimate() const {
    const double t_min = std::max(branch_tail_ ? 1.0 / tail_.branch_gamma : 0.0, 1.0 / tail_.jacobian_decay);
    double lo = t_min + 1e-3, hi = 3.0;
    auto p = [&](double t) { return two_var_pressure(t, 0.0).value; };
    double plo = p(lo);
    if (!(plo > 0.0)) return lo;
    double phi = p(hi);
    while (phi > 0.0) {
        hi *= 2.0;
        if (hi > 1e3) fail(ErrorCode::nonconvergence, "dimension root not bracketed");
        phi = p(hi);
    }
    std::uintmax_t iters = 200;
    const auto [a, b] =
        boost::math::tools::toms748_solve(p, lo, hi, plo, phi, boost::math::tools::eps_tolerance<double>(48), iters);
    return 0.5 * (a + b);
}

InducedScheme build_induced(const MapModel& model, long N_max, long J_max) {
    return InducedScheme(model, N_max, J_max);
}

PressureEstimate pressure_via_inducing(const InducedScheme& scheme, double t) { return scheme.pressure(t); }

}  // namespace thermokit
