#include "transfer.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace thermokit {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::cylinder: return "cylinder";
        case Method::induced: return "induced";
        case Method::closed_form: return "closed_form";
        case Method::degenerate: return "degenerate";
    }
    return "unknown";
}

PressureEstimate PressureEstimate::divergent(Method m, std::string why) {
    PressureEstimate e;
    e.value = e.lower = e.upper = kInf;
    e.infinite = true;
    e.method = m;
    e.diagnostic = std::move(why);
    return e;
}

PressureEstimate PressureEstimate::exact(double v, Method m) {
    PressureEstimate e;
    e.value = e.lower = e.upper = v;
    e.method = m;
    return e;
}

PowerResult power_iterate(std::span<const double> K, std::size_t size, std::vector<double>& f,
                          const SolveOptions& opts) {
    if (f.size() != size) f.assign(size, 1.0);
    std::vector<double> g(size);
    PowerResult r{-kInf, kInf, 0, false, true};
    for (int it = 1; it <= opts.depth_cap; ++it) {
        double rmin = kInf, rmax = -kInf, gmax = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double* row = K.data() + i * size;
            double s = 0.0;
            for (std::size_t j = 0; j < size; ++j) s += row[j] * f[j];
            g[i] = s;
            gmax = std::max(gmax, s);
        }
        for (std::size_t i = 0; i < size; ++i) {
            if (!(g[i] > 0.0) || !(f[i] > 0.0)) {
                r.positive = false;
                continue;
            }
            const double q = g[i] / f[i];
            rmin = std::min(rmin, q);
            rmax = std::max(rmax, q);
        }
        r.iterations = it;
        if (!(gmax > 0.0) || !std::isfinite(gmax)) {
            r.positive = false;
            break;
        }
        r.lower = std::log(rmin);
        r.upper = std::log(rmax);
        for (std::size_t i = 0; i < size; ++i) f[i] = g[i] / gmax;
        if (r.positive && r.upper - r.lower < opts.tol) {
            r.converged = true;
            break;
        }
        if (!r.positive) break;
    }
    return r;
}

ChebGrid CylinderSums::default_grid(const MapModel& model) {
    if (model.parabolic()) return ChebGrid::graded_left(0.0, 1.0, 40, 12);
    return ChebGrid::single(0.0, 1.0, model.finite() ? 24 : 40);
}

CylinderSums::CylinderSums(MapModel model, long N_explicit, std::optional<ChebGrid> grid)
    : model_(std::move(model)), N_(N_explicit), grid_(grid ? *grid : default_grid(model_)) {
    require(N_ >= 1, "cylinder sums need at least one explicit branch");
    if (auto c = model_.branch_count()) {
        require(N_ <= *c, "explicit branch count exceeds the model's branch count");
    } else {
        if (!model_.tail(0.5))
            fail(ErrorCode::invalid_argument,
                 "model " + model_.describe() + " has no branch-tail asymptotics for the cylinder route");
        has_tail_ = true;
    }
    if (N_ > kBranchCap) fail(ErrorCode::budget, "explicit branch count beyond the branch cap");
    const std::size_t M = grid_.size(), m = static_cast<std::size_t>(grid_.nodes_per_panel());
    const std::size_t NN = static_cast<std::size_t>(N_);
    panel_.resize(M * NN);
    lj_.resize(M * NN);
    bw_.resize(M * NN * m);
    for (std::size_t i = 0; i < M; ++i) {
        const double y = grid_.node(i);
        for (std::size_t n = 0; n < NN; ++n) {
            const long b = static_cast<long>(n) + 1;
            const double x = model_.inverse(b, y);
            lj_[i * NN + n] = model_.log_inverse_jacobian(b, y);
            panel_[i * NN + n] = grid_.weights(x, std::span<double>(bw_.data() + (i * NN + n) * m, m));
        }
    }
    if (!model_.parabolic()) {
        // Least expanding fixed point among the first branches.
        long best = 0;
        double best_lambda = kInf, xstar = 0.0;
        for (long b = 1; b <= std::min<long>(N_, 20); ++b) {
            double y = 0.5;
            for (int k = 0; k < 400; ++k) y = model_.inverse(b, y);
            const double lam = -model_.log_inverse_jacobian(b, y);
            if (lam < best_lambda) {
                best_lambda = lam;
                best = b;
                xstar = y;
            }
        }
        const double ref = model_.log_inverse_jacobian(best, xstar);
        auto H = [&](double x) {
            CompensatedSum s;
            for (int k = 0; k < 2000; ++k) {
                const double term = model_.log_inverse_jacobian(best, x) - ref;
                s.add(term);
                if (std::abs(term) < 1e-18) break;
                x = model_.inverse(best, x);
            }
            return s.value();
        };
        gauge_node_.resize(M);
        for (std::size_t i = 0; i < M; ++i) gauge_node_[i] = H(grid_.node(i));
        gauge_pos_.resize(M * NN);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t n = 0; n < NN; ++n)
                gauge_pos_[i * NN + n] = H(model_.inverse(static_cast<long>(n) + 1, grid_.node(i)));
    }
    if (has_tail_) {
        tails_.reserve(M);
        for (std::size_t i = 0; i < M; ++i) tails_.push_back(*model_.tail(grid_.node(i)));
        const bool at_hi = tails_.front().accumulation > 0.5;
        for (int k = 0; k <= 3; ++k) endpoint_.push_back(grid_.endpoint_functional(at_hi, k));
        if (!gauge_node_.empty()) {
            for (int k = 0; k <= 3; ++k) {
                double d = 0.0;
                for (std::size_t j = 0; j < M; ++j) d += endpoint_[static_cast<std::size_t>(k)][j] * gauge_node_[j];
                gauge_end_[static_cast<std::size_t>(k)] = d;
            }
        }
    }
}

std::vector<double> CylinderSums::matrix(double t, double* tail_error, double* log_scale) const {
    const std::size_t M = grid_.size(), m = static_cast<std::size_t>(grid_.nodes_per_panel());
    const std::size_t NN = static_cast<std::size_t>(N_);
    std::vector<double> K(M * M, 0.0);
    double terr = 0.0;
    const bool gauged = !gauge_node_.empty();
    // Common factor exp(S) pulled out of every entry so large |t| cannot overflow.
    double S = 0.0;
    if (log_scale) {
        S = -kInf;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t n = 0; n < NN; ++n)
                S = std::max(S, t * (lj_[i * NN + n] + (gauged ? gauge_pos_[i * NN + n] - gauge_node_[i] : 0.0)));
        if (!std::isfinite(S)) S = 0.0;
        *log_scale = S;
    }
    for (std::size_t i = 0; i < M; ++i) {
        double* row = K.data() + i * M;
        double mass = 0.0;
        const double hi_node = gauged ? gauge_node_[i] : 0.0;
        for (std::size_t n = 0; n < NN; ++n) {
            const double shift = gauged ? gauge_pos_[i * NN + n] - hi_node : 0.0;
            const double w = std::exp(t * (lj_[i * NN + n] + shift) - S);
            mass += w;
            const double* bw = bw_.data() + (i * NN + n) * m;
            double* dst = row + static_cast<std::size_t>(panel_[i * NN + n]) * m;
            for (std::size_t j = 0; j < m; ++j) dst[j] += w * bw[j];
        }
        if (!has_tail_) continue;
        const BranchTail& tl = tails_[i];
        const double s = tl.gamma * t, a = static_cast<double>(N_) + 1.0 + tl.shift;
        const double Z0 = hurwitz_zeta(s, a), Z1 = hurwitz_zeta(s + 1, a), Z2 = hurwitz_zeta(s + 2, a),
                     Z3 = hurwitz_zeta(s + 3, a), Z4 = hurwitz_zeta(s + 4, a);
        const double w = tl.w2_per_t * t;
        const double c0 = Z0 + w * Z2;
        const double c1 = tl.d1 * Z1 + tl.d2 * Z2 + tl.d3 * Z3 + w * tl.d1 * Z3;
        const double c2 = 0.5 * tl.d1 * tl.d1 * Z2 + tl.d1 * tl.d2 * Z3;
        const double c3 = tl.d1 * tl.d1 * tl.d1 / 6.0 * Z3;
        const double unscale = std::exp(-S);
        double coef[4] = {c0 * unscale, c1 * unscale, c2 * unscale, c3 * unscale};
        if (gauged) {
            // f = exp(tH) u: rewrite endpoint derivatives of f through those of u.
            const double h1 = t * gauge_end_[1], h2 = t * gauge_end_[2], h3 = t * gauge_end_[3];
            const double g1 = h1, g2 = h2 + h1 * h1, g3 = h3 + 3.0 * h1 * h2 + h1 * h1 * h1;
            const double scale = std::exp(t * (gauge_end_[0] - hi_node));
            const double k0 = coef[0], k1 = coef[1], k2 = coef[2], k3 = coef[3];
            coef[0] = scale * (k0 + k1 * g1 + k2 * g2 + k3 * g3);
            coef[1] = scale * (k1 + 2.0 * k2 * g1 + 3.0 * k3 * g2);
            coef[2] = scale * (k2 + 3.0 * k3 * g1);
            coef[3] = scale * k3;
        }
        for (int k = 0; k < 4; ++k) {
            const auto& e = endpoint_[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < M; ++j)
                if (e[j] != 0.0) row[j] += coef[k] * e[j];
        }
        mass += c0 * unscale;
        terr = std::max(terr, Z4 * unscale / mass);
    }
    if (tail_error) *tail_error = terr;
    return K;
}

PressureEstimate CylinderSums::pressure(double t, const SolveOptions& opts) const {
    if (has_tail_ && !(tails_.front().gamma * t > 1.0))
        return PressureEstimate::divergent(Method::cylinder, "branch series diverges: gamma*t <= 1");
    double terr = 0.0, S = 0.0;
    const auto K = matrix(t, &terr, &S);
    std::vector<double> f;
    const PowerResult pr = power_iterate(K, grid_.size(), f, opts);
    PressureEstimate e;
    e.method = Method::cylinder;
    e.N = N_;
    e.depth = pr.iterations;
    e.converged = pr.converged;
    e.lower = pr.lower + S;
    e.upper = pr.upper + S;
    e.value = 0.5 * (e.lower + e.upper);
    e.error = 0.5 * (pr.upper - pr.lower) + terr + grid_.resolution(f);
    if (!pr.positive) {
        e.converged = false;
        e.diagnostic = "recursion lost positivity on the grid";
    } else if (!pr.converged) {
        e.diagnostic = "bracket wider than tol at the depth cap";
    }
    return e;
}

}  // namespace thermokit
