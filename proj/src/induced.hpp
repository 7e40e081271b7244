#pragma once

#include <span>
#include <vector>

#include "maps.hpp"
#include "numeric.hpp"
#include "transfer.hpp"

namespace thermokit {

struct InducedBranch {
    long n;
    long j;  // return time
    Interval interval;
    double deriv_inf;
    double deriv_sup;
};

// Fitted tail exponents of the scheme. Lengths satisfy
// c_lo |I_n| j^-rho <= |I_{n,j}| <= c_hi |I_n| j^-rho over the enumeration, and
// |(g^k)'| decays like k^-jacobian_decay along parabolic orbits.
struct InducedTailModel {
    double rho;
    double c_lo;
    double c_hi;
    double jacobian_decay;
    double branch_gamma;  // 0 when the branch set is finite
};

// First-return scheme over the base [1/2, 1) of a map whose branch 1 carries the
// parabolic point 0. Inverse branches of the return map are psi_n o g^(j-1),
// g the inverse of branch 1.
class InducedScheme {
public:
    InducedScheme(MapModel model, long N_max = 400, long J_max = 400);

    const MapModel& model() const { return model_; }
    long N_max() const { return N_max_; }
    long J_max() const { return J_max_; }
    Interval base() const { return {base_lo_, base_hi_}; }
    const InducedTailModel& tail_model() const { return tail_; }

    // Branches with 2 <= n <= n_cap, 1 <= j <= j_cap (caps default to the scheme cutoffs).
    std::vector<InducedBranch> branches(long n_cap = 0, long j_cap = 0) const;

    bool finite(double t, double q) const;
    // Bracket of P(-t log|F'| - q tau) from the induced cylinder sums.
    PressureEstimate two_var_pressure(double t, double q, const SolveOptions& opts = {}) const;
    // q* with P(t, q*) = 0, the pressure of the original map at t; 0 once P(t, 0) <= 0.
    PressureEstimate pressure(double t, const SolveOptions& opts = {}) const;
    // Root in t of P(t, 0) = 0.
    double dim_estimate() const;

private:
    // Entries are divided by exp(log_scale) so the largest explicit weight is one.
    std::vector<double> inner_matrix(double t, double& tail_err, double& log_scale) const;
    std::vector<double> return_matrix(double t, double q, double& tail_err, double& log_scale) const;
    PressureEstimate solve(std::span<const double> inner, double inner_err, double inner_scale, double t, double q,
                           const SolveOptions& opts) const;

    MapModel model_;
    long N_max_;
    long J_max_;
    bool branch_tail_ = false;
    double base_lo_ = 0.5;
    double base_hi_ = 1.0;
    ChebGrid base_grid_;
    ChebGrid inner_grid_;
    InducedTailModel tail_{};

    // inner nodes x_a, branches n = 2..N_max
    std::vector<int> in_panel_;
    std::vector<double> in_bw_;
    std::vector<double> in_lj_;
    std::vector<BranchTail> in_tail_;
    std::vector<std::vector<double>> base_end_;  // f^(k)(1) functionals on the base grid
    // base nodes y_i, orbit k = 0..J_max-1 under g
    std::vector<double> orbit_x_;
    std::vector<double> orbit_G_;  // log |(g^k)'(y_i)|
    std::vector<double> orbit_bw_;
    std::vector<int> orbit_panel_;
    std::vector<double> decay_s_;  // per-node fitted jacobian exponent
    std::vector<double> decay_r_;  // per-node fitted position exponent
    std::vector<double> inner_end0_;
    std::vector<double> inner_end1_;
};

InducedScheme build_induced(const MapModel& model, long N_max = 400, long J_max = 400);
PressureEstimate pressure_via_inducing(const InducedScheme& scheme, double t);

}  // namespace thermokit
