#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maps.hpp"
#include "numeric.hpp"

namespace thermokit {

enum class Method { cylinder, induced, closed_form, degenerate };
std::string_view method_name(Method m);

// A pressure value with its bracket. `infinite` is the explicit +inf sentinel;
// when set, value/lower/upper are +inf and carry no other meaning.
struct PressureEstimate {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double error = 0.0;
    bool infinite = false;
    bool converged = true;
    long N = 0;
    int depth = 0;
    Method method = Method::cylinder;
    std::string diagnostic;

    static PressureEstimate divergent(Method m, std::string why);
    static PressureEstimate exact(double v, Method m);
};

struct SolveOptions {
    double tol = 1e-13;
    int depth_cap = 20000;
};

struct PowerResult {
    double lower;  // log min_i (Kf)_i / f_i
    double upper;  // log max_i (Kf)_i / f_i
    int iterations;
    bool converged;
    bool positive;
};

// Iterates f <- K f / |K f| on a dense row-major size x size matrix and tracks
// the Collatz-Wielandt ratio bracket. f holds the start vector and the result.
PowerResult power_iterate(std::span<const double> K, std::size_t size, std::vector<double>& f,
                          const SolveOptions& opts);

// Depth recursion of the cylinder sums Z_d(y) = sum_{|w|=d} |psi_w'(y)|^t on a
// collocation grid, with branches 1..N explicit and, for full countable models,
// the branches n > N summed through their asymptotic expansion.
class CylinderSums {
public:
    CylinderSums(MapModel model, long N_explicit, std::optional<ChebGrid> grid = std::nullopt);

    PressureEstimate pressure(double t, const SolveOptions& opts = {}) const;
    // The recursion matrix at t (size x size, row-major). With log_scale set, entries are
    // divided by exp(*log_scale), chosen so the largest explicit weight is one.
    std::vector<double> matrix(double t, double* tail_error = nullptr, double* log_scale = nullptr) const;
    bool has_tail() const { return has_tail_; }
    long explicit_branches() const { return N_; }
    const ChebGrid& grid() const { return grid_; }

    static ChebGrid default_grid(const MapModel& model);

private:
    MapModel model_;
    long N_;
    ChebGrid grid_;
    bool has_tail_ = false;
    std::vector<int> panel_;
    std::vector<double> bw_;
    std::vector<double> lj_;
    std::vector<BranchTail> tails_;
    std::vector<std::vector<double>> endpoint_;
    // Gauge f = exp(t H) u with H the cocycle of the least expanding fixed point,
    // which keeps u smooth for large t. Empty when not used.
    std::vector<double> gauge_node_;
    std::vector<double> gauge_pos_;
    std::array<double, 4> gauge_end_{};
};

}  // namespace thermokit
