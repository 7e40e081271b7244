#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thermokit {

enum class Family { gauss, renyi, infinite_mp, pathological, linear_custom };

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
    bool contains(const Interval& other, double tol = 0.0) const {
        return other.lo >= lo - tol && other.hi <= hi + tol;
    }
};

struct Parabolic {
    double point;
    long branch;
    double beta;
};

// Asymptotics of the inverse branches psi_n at a point y as n -> inf, with m = n + shift:
//   |psi_n'(y)|^t = m^(-gamma t) (1 + w2_per_t t m^-2 + ...)
//   psi_n(y) = accumulation + d1/m + d2/m^2 + d3/m^3 + ...
struct BranchTail {
    double accumulation;
    double shift;
    double gamma;
    double w2_per_t;
    double d1, d2, d3;
};

struct AffineBranch {
    Interval interval;
    double slope;  // negative slope means an orientation-reversing branch
};

struct MapParams {
    double beta = 0.0;
    long N = 0;
    std::vector<AffineBranch> affine;
};

class MapFamily;

struct Branch {
    long index;
    Interval interval;
    double deriv_inf;
    double deriv_sup;
    const MapFamily* impl;

    double forward(double x) const;
    double derivative(double x) const;
    double inverse(double y) const;
};

// Family implementation. Branch indices start at 1.
class MapFamily {
public:
    virtual ~MapFamily() = default;
    virtual Family family() const = 0;
    virtual MapParams params() const { return {}; }
    virtual std::optional<long> branch_count() const { return std::nullopt; }
    virtual Interval interval(long n) const = 0;
    virtual double forward(long n, double x) const = 0;
    virtual double derivative(long n, double x) const = 0;
    virtual double inverse(long n, double y) const = 0;
    virtual double log_inverse_jacobian(long n, double y) const = 0;
    virtual std::pair<double, double> deriv_bounds(long n) const = 0;
    // Branch containing x, or 0 when x lies in a gap of the partition.
    virtual long locate(double x) const = 0;
    virtual std::optional<Parabolic> parabolic() const { return std::nullopt; }
    virtual std::optional<BranchTail> tail(double /*y*/) const { return std::nullopt; }
    // (l(v), l'(v)) with l(v) = log sup|T'| on the branch of index e^v.
    virtual std::optional<std::pair<double, double>> log_growth(double /*v*/) const { return std::nullopt; }
    // Closed form of the continuous iterate g^u of the inverse parabolic branch, if any.
    virtual bool closed_form_iterates() const { return false; }
    virtual double parabolic_iterate(double y, double u) const;
    virtual double parabolic_iterate_log_jacobian(double y, double u) const;
    virtual std::optional<double> declared_dim() const { return std::nullopt; }
    virtual std::optional<double> declared_gamma() const { return std::nullopt; }
    virtual bool non_condition5() const { return false; }
};

inline constexpr long kBranchCap = 1'000'000;

class MapModel {
public:
    explicit MapModel(std::shared_ptr<const MapFamily> impl, std::optional<long> truncation = std::nullopt);

    Family family() const { return impl_->family(); }
    MapParams params() const { return impl_->params(); }
    std::optional<long> branch_count() const;
    bool finite() const { return branch_count().has_value(); }
    std::optional<long> truncation() const { return truncation_; }
    bool truncated() const { return truncation_.has_value(); }

    Branch branch(long n) const;
    double forward(long n, double x) const { return impl_->forward(n, x); }
    double derivative(long n, double x) const { return impl_->derivative(n, x); }
    double inverse(long n, double y) const { return impl_->inverse(n, y); }
    double log_inverse_jacobian(long n, double y) const { return impl_->log_inverse_jacobian(n, y); }
    long locate(double x) const;

    std::optional<Parabolic> parabolic() const { return impl_->parabolic(); }
    // Branch-tail asymptotics; absent for finite and truncated models.
    std::optional<BranchTail> tail(double y) const;
    std::optional<std::pair<double, double>> log_growth(double v) const;
    bool closed_form_iterates() const { return impl_->closed_form_iterates(); }
    double parabolic_iterate(double y, double u) const { return impl_->parabolic_iterate(y, u); }
    double parabolic_iterate_log_jacobian(double y, double u) const {
        return impl_->parabolic_iterate_log_jacobian(y, u);
    }
    std::optional<double> declared_dim() const { return truncated() ? std::nullopt : impl_->declared_dim(); }
    std::optional<double> declared_gamma() const { return impl_->declared_gamma(); }
    bool non_condition5() const { return impl_->non_condition5() && !truncated(); }

    const MapFamily& impl() const { return *impl_; }
    MapModel with_truncation(long N) const { return MapModel(impl_, N); }
    std::string describe() const;

private:
    void check_index(long n) const;

    std::shared_ptr<const MapFamily> impl_;
    std::optional<long> truncation_;
};

MapModel build_gauss();
MapModel build_renyi();
MapModel build_infinite_mp(double beta);
MapModel build_pathological(long N, double beta = 1.0);
MapModel build_linear_custom(std::vector<AffineBranch> branches);
// Branches of the given slopes packed left to right from 0, orientation preserving.
MapModel build_linear_from_slopes(const std::vector<double>& slopes);
MapModel truncate(const MapModel& model, long N);

// Slope of the affine branch with label n in the pathological example.
double pathological_slope(long n);

}  // namespace thermokit
