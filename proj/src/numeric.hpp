#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace thermokit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double s = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - s) + x;
        else
            comp_ += (x - s) + sum_;
        sum_ = s;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Accumulates log(sum exp(x_i)) with a running shift, compensated.
class LogSumExp {
public:
    void add(double x);
    double value() const;
    bool empty() const { return !(shift_ > -kInf); }

private:
    double shift_ = -kInf;
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Panel {
    double lo;
    double hi;
};

// Piecewise Chebyshev (first kind) collocation grid. Panels are contiguous and
// sorted; every panel carries the same number of nodes.
class ChebGrid {
public:
    ChebGrid(std::vector<Panel> panels, int nodes_per_panel);

    // [a,b] with `levels` dyadic panels shrinking toward a, plus the panel [a, a+(b-a)2^-levels].
    static ChebGrid graded_left(double a, double b, int levels, int nodes_per_panel);
    static ChebGrid single(double a, double b, int nodes) { return ChebGrid({{a, b}}, nodes); }

    std::size_t size() const { return nodes_.size(); }
    int nodes_per_panel() const { return m_; }
    const std::vector<Panel>& panels() const { return panels_; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }
    double lo() const { return panels_.front().lo; }
    double hi() const { return panels_.back().hi; }

    int locate(double x) const;
    // Barycentric weights of the panel containing x; out has nodes_per_panel entries.
    int weights(double x, std::span<double> out) const;
    double interpolate(std::span<const double> values, double x) const;

    // Functional f -> f^(order)(endpoint) on nodal values, order <= 3. Size size().
    std::vector<double> endpoint_functional(bool at_hi, int order) const;
    // Largest trailing Chebyshev coefficient relative to max |f|, a resolution proxy.
    double resolution(std::span<const double> values) const;

private:
    std::vector<Panel> panels_;
    int m_;
    std::vector<double> ref_nodes_;
    std::vector<double> bary_;
    std::vector<double> nodes_;
};

// Chebyshev coefficients of values at first-kind nodes (size m).
std::vector<double> cheb_coefficients(std::span<const double> values);
// Clenshaw evaluation of sum c_k T_k(z) and its first two derivatives in z.
struct ChebEval {
    double f, df, d2f;
};
ChebEval cheb_evaluate(std::span<const double> coeffs, double z);

// Hurwitz zeta via GSL; returns +inf for s <= 1.
double hurwitz_zeta(double s, double a);

// Integral of h over [a, inf) with geometric blocks and 10-point Gauss-Legendre.
// Stops once a block contributes below rel_tol of the running total or past u_max.
double tail_integral(const std::function<double(double)>& h, double a, double rel_tol = 1e-16,
                     double u_max = 1e15);

// Worker count from THERMOKIT_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count();
// Runs body(i) for i in [0, n) on up to worker_count() threads; each index is
// processed exactly once, so results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace thermokit
