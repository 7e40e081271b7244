#include "maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace thermokit {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::gauss: return "gauss";
        case Family::renyi: return "renyi";
        case Family::infinite_mp: return "infinite_mp";
        case Family::pathological: return "pathological";
        case Family::linear_custom: return "linear_custom";
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
    for (Family f : {Family::gauss, Family::renyi, Family::infinite_mp, Family::pathological,
                     Family::linear_custom})
        if (family_name(f) == name) return f;
    return std::nullopt;
}

double Branch::forward(double x) const { return impl->forward(index, x); }
double Branch::derivative(double x) const { return impl->derivative(index, x); }
double Branch::inverse(double y) const { return impl->inverse(index, y); }

double MapFamily::parabolic_iterate(double, double) const {
    fail(ErrorCode::invalid_argument, "no closed-form parabolic iterates for this family");
}
double MapFamily::parabolic_iterate_log_jacobian(double, double) const {
    fail(ErrorCode::invalid_argument, "no closed-form parabolic iterates for this family");
}

namespace {

double dn(long n) { return static_cast<double>(n); }

double log1pexp_neg(double v) { return std::log1p(std::exp(-v)); }

class GaussFamily final : public MapFamily {
public:
    Family family() const override { return Family::gauss; }
    Interval interval(long n) const override { return {1.0 / (dn(n) + 1.0), 1.0 / dn(n)}; }
    double forward(long n, double x) const override { return 1.0 / x - dn(n); }
    double derivative(long, double x) const override { return 1.0 / (x * x); }
    double inverse(long n, double y) const override { return 1.0 / (dn(n) + y); }
    double log_inverse_jacobian(long n, double y) const override { return -2.0 * std::log(dn(n) + y); }
    std::pair<double, double> deriv_bounds(long n) const override {
        return {dn(n) * dn(n), (dn(n) + 1.0) * (dn(n) + 1.0)};
    }
    long locate(double x) const override {
        if (!(x > 0.0) || x > 1.0) return 0;
        return std::max(1L, static_cast<long>(std::floor(1.0 / x)));
    }
    std::optional<BranchTail> tail(double y) const override { return BranchTail{0.0, y, 2.0, 0.0, 1.0, 0.0, 0.0}; }
    std::optional<std::pair<double, double>> log_growth(double v) const override {
        return std::pair{2.0 * (v + log1pexp_neg(v)), 2.0 / (1.0 + std::exp(-v))};
    }
    std::optional<double> declared_dim() const override { return 1.0; }
    std::optional<double> declared_gamma() const override { return 2.0; }
};

class RenyiFamily final : public MapFamily {
public:
    Family family() const override { return Family::renyi; }
    Interval interval(long n) const override { return {1.0 - 1.0 / dn(n), 1.0 - 1.0 / (dn(n) + 1.0)}; }
    double forward(long n, double x) const override { return 1.0 / (1.0 - x) - dn(n); }
    double derivative(long, double x) const override { return 1.0 / ((1.0 - x) * (1.0 - x)); }
    double inverse(long n, double y) const override { return 1.0 - 1.0 / (dn(n) + y); }
    double log_inverse_jacobian(long n, double y) const override { return -2.0 * std::log(dn(n) + y); }
    std::pair<double, double> deriv_bounds(long n) const override {
        return {dn(n) * dn(n), (dn(n) + 1.0) * (dn(n) + 1.0)};
    }
    long locate(double x) const override {
        if (x < 0.0 || !(x < 1.0)) return 0;
        return std::max(1L, static_cast<long>(std::floor(1.0 / (1.0 - x))));
    }
    std::optional<Parabolic> parabolic() const override { return Parabolic{0.0, 1, 1.0}; }
    std::optional<BranchTail> tail(double y) const override { return BranchTail{1.0, y, 2.0, 0.0, -1.0, 0.0, 0.0}; }
    std::optional<std::pair<double, double>> log_growth(double v) const override {
        return std::pair{2.0 * (v + log1pexp_neg(v)), 2.0 / (1.0 + std::exp(-v))};
    }
    bool closed_form_iterates() const override { return true; }
    double parabolic_iterate(double y, double u) const override { return y / (1.0 + u * y); }
    double parabolic_iterate_log_jacobian(double y, double u) const override { return -2.0 * std::log1p(u * y); }
    std::optional<double> declared_dim() const override { return 1.0; }
    std::optional<double> declared_gamma() const override { return 2.0; }
};

// Parabolic branch x -> x + 2^beta x^(1+beta) on [0, 1/2).
class ParabolicBranch {
public:
    explicit ParabolicBranch(double beta) : beta_(beta), c_(std::exp2(beta)) {}
    double beta() const { return beta_; }
    double forward(double x) const { return x + c_ * std::pow(x, 1.0 + beta_); }
    double derivative(double x) const { return 1.0 + (1.0 + beta_) * c_ * std::pow(x, beta_); }
    // Newton from the right is monotone since the branch is convex.
    double inverse(double y) const {
        if (y <= 0.0) return 0.0;
        double x = std::min(y, 0.5);
        for (int it = 0; it < 200; ++it) {
            const double step = (forward(x) - y) / derivative(x);
            const double next = x - step;
            if (!(next < x) || step <= 1e-17 * x) {
                x = std::max(next, 0.0);
                break;
            }
            x = next;
        }
        return x;
    }
    double log_inverse_jacobian(double y) const { return -std::log(derivative(inverse(y))); }
    std::pair<double, double> deriv_bounds() const { return {1.0, derivative(0.5)}; }

private:
    double beta_;
    double c_;
};

class InfiniteMPFamily final : public MapFamily {
public:
    explicit InfiniteMPFamily(double beta) : p_(beta) {}
    Family family() const override { return Family::infinite_mp; }
    MapParams params() const override { return {p_.beta(), 0, {}}; }
    Interval interval(long n) const override {
        if (n == 1) return {0.0, 0.5};
        return {(dn(n) - 1.0) / dn(n), dn(n) / (dn(n) + 1.0)};
    }
    double forward(long n, double x) const override {
        if (n == 1) return p_.forward(x);
        return dn(n) * (dn(n) + 1.0) * ((x - 1.0) + 1.0 / dn(n));
    }
    double derivative(long n, double x) const override {
        if (n == 1) return p_.derivative(x);
        return dn(n) * (dn(n) + 1.0);
    }
    double inverse(long n, double y) const override {
        if (n == 1) return p_.inverse(y);
        return (y + dn(n) * dn(n) - 1.0) / (dn(n) * (dn(n) + 1.0));
    }
    double log_inverse_jacobian(long n, double y) const override {
        if (n == 1) return p_.log_inverse_jacobian(y);
        return -std::log(dn(n) * (dn(n) + 1.0));
    }
    std::pair<double, double> deriv_bounds(long n) const override {
        if (n == 1) return p_.deriv_bounds();
        const double s = dn(n) * (dn(n) + 1.0);
        return {s, s};
    }
    long locate(double x) const override {
        if (x < 0.0 || !(x < 1.0)) return 0;
        if (x < 0.5) return 1;
        return std::max(2L, static_cast<long>(std::floor(1.0 / (1.0 - x))));
    }
    std::optional<Parabolic> parabolic() const override { return Parabolic{0.0, 1, p_.beta()}; }
    std::optional<BranchTail> tail(double y) const override {
        return BranchTail{1.0, 0.5, 2.0, 0.25, -1.0, -(0.5 - y), -0.25};
    }
    std::optional<std::pair<double, double>> log_growth(double v) const override {
        return std::pair{2.0 * v + log1pexp_neg(v), 1.0 + 1.0 / (1.0 + std::exp(-v))};
    }
    std::optional<double> declared_dim() const override { return 1.0; }
    std::optional<double> declared_gamma() const override { return 2.0; }

private:
    ParabolicBranch p_;
};

class PathologicalFamily final : public MapFamily {
public:
    PathologicalFamily(long N, double beta) : N_(N), p_(beta) {
        starts_.reserve(kBranchCap + 2);
        starts_.push_back(0.0);  // unused slot for index 0
        starts_.push_back(0.0);
        CompensatedSum edge;
        edge.add(0.5);
        for (long k = 2; k <= kBranchCap + 1; ++k) {
            starts_.push_back(edge.value());
            edge.add(1.0 / pathological_slope(label(k)));
        }
        // Remaining lengths beyond the cap by the integral of 1/(2u log^2 2u).
        const double far = dn(label(kBranchCap + 2)) - 0.5;
        total_ = edge.value() + 1.0 / (2.0 * std::log(2.0 * far));
        require(total_ <= 1.0, "pathological packing exceeds [0,1] for N=" + std::to_string(N));
    }
    Family family() const override { return Family::pathological; }
    MapParams params() const override { return {p_.beta(), N_, {}}; }
    long label(long k) const { return N_ + k - 1; }
    double packed_length() const { return total_; }
    Interval interval(long n) const override {
        if (n == 1) return {0.0, 0.5};
        const double s = starts_[static_cast<std::size_t>(n)];
        return {s, s + 1.0 / pathological_slope(label(n))};
    }
    double forward(long n, double x) const override {
        if (n == 1) return p_.forward(x);
        return pathological_slope(label(n)) * (x - starts_[static_cast<std::size_t>(n)]);
    }
    double derivative(long n, double x) const override {
        if (n == 1) return p_.derivative(x);
        return pathological_slope(label(n));
    }
    double inverse(long n, double y) const override {
        if (n == 1) return p_.inverse(y);
        return starts_[static_cast<std::size_t>(n)] + y / pathological_slope(label(n));
    }
    double log_inverse_jacobian(long n, double y) const override {
        if (n == 1) return p_.log_inverse_jacobian(y);
        return -std::log(pathological_slope(label(n)));
    }
    std::pair<double, double> deriv_bounds(long n) const override {
        if (n == 1) return p_.deriv_bounds();
        const double s = pathological_slope(label(n));
        return {s, s};
    }
    long locate(double x) const override {
        if (x < 0.0 || !(x < 1.0)) return 0;
        if (x < 0.5) return 1;
        auto it = std::upper_bound(starts_.begin() + 2, starts_.end(), x);
        const long k = static_cast<long>(it - starts_.begin()) - 1;
        if (k < 2 || k > kBranchCap) return 0;
        return interval(k).hi > x ? k : 0;
    }
    std::optional<Parabolic> parabolic() const override { return Parabolic{0.0, 1, p_.beta()}; }
    std::optional<std::pair<double, double>> log_growth(double v) const override {
        const double l2 = std::log(2.0) + v;
        return std::pair{l2 + 2.0 * std::log(l2), 1.0 + 2.0 / l2};
    }
    std::optional<double> declared_dim() const override { return 1.0; }
    bool non_condition5() const override { return true; }

private:
    long N_;
    ParabolicBranch p_;
    std::vector<double> starts_;
    double total_ = 0.0;
};

class LinearFamily final : public MapFamily {
public:
    explicit LinearFamily(std::vector<AffineBranch> b) : b_(std::move(b)) {
        require(!b_.empty(), "linear_custom needs at least one branch");
        std::sort(b_.begin(), b_.end(),
                  [](const AffineBranch& x, const AffineBranch& y) { return x.interval.lo < y.interval.lo; });
        for (std::size_t i = 0; i < b_.size(); ++i) {
            const auto& br = b_[i];
            require(br.interval.lo >= 0.0 && br.interval.hi <= 1.0 && br.interval.hi > br.interval.lo,
                    "linear_custom interval outside [0,1]");
            require(std::abs(std::abs(br.slope) * br.interval.length() - 1.0) <= 1e-9,
                    "linear_custom branch is not full: |slope| * length must equal 1");
            require(std::abs(br.slope) > 1.0, "linear_custom slopes must exceed 1 in modulus");
            if (i > 0) require(br.interval.lo >= b_[i - 1].interval.hi - 1e-15, "linear_custom intervals overlap");
        }
    }
    Family family() const override { return Family::linear_custom; }
    MapParams params() const override { return {0.0, 0, b_}; }
    std::optional<long> branch_count() const override { return static_cast<long>(b_.size()); }
    const AffineBranch& at(long n) const { return b_[static_cast<std::size_t>(n - 1)]; }
    Interval interval(long n) const override { return at(n).interval; }
    double forward(long n, double x) const override {
        const auto& br = at(n);
        return br.slope > 0 ? br.slope * (x - br.interval.lo) : -br.slope * (br.interval.hi - x);
    }
    double derivative(long n, double) const override { return std::abs(at(n).slope); }
    double inverse(long n, double y) const override {
        const auto& br = at(n);
        return br.slope > 0 ? br.interval.lo + y / br.slope : br.interval.hi + y / br.slope;
    }
    double log_inverse_jacobian(long n, double) const override { return -std::log(std::abs(at(n).slope)); }
    std::pair<double, double> deriv_bounds(long n) const override {
        const double s = std::abs(at(n).slope);
        return {s, s};
    }
    long locate(double x) const override {
        for (std::size_t i = 0; i < b_.size(); ++i)
            if (x >= b_[i].interval.lo && x < b_[i].interval.hi) return static_cast<long>(i) + 1;
        if (x == b_.back().interval.hi) return static_cast<long>(b_.size());
        return 0;
    }

private:
    std::vector<AffineBranch> b_;
};

}  // namespace

double pathological_slope(long n) {
    const double two_n = 2.0 * dn(n);
    const double l = std::log(two_n);
    return two_n * l * l;
}

MapModel::MapModel(std::shared_ptr<const MapFamily> impl, std::optional<long> truncation)
    : impl_(std::move(impl)), truncation_(truncation) {
    require(impl_ != nullptr, "null map family");
    if (truncation_) {
        require(*truncation_ >= 1, "truncation must be positive");
        if (auto c = impl_->branch_count()) truncation_ = std::min(*truncation_, *c);
    }
}

std::optional<long> MapModel::branch_count() const {
    if (truncation_) return truncation_;
    return impl_->branch_count();
}

void MapModel::check_index(long n) const {
    require(n >= 1, "branch index must be positive");
    if (auto c = branch_count()) require(n <= *c, "branch index beyond the branch count");
    if (n > kBranchCap) fail(ErrorCode::budget, "branch index beyond the evaluation cap");
}

Branch MapModel::branch(long n) const {
    check_index(n);
    auto [lo, hi] = impl_->deriv_bounds(n);
    return Branch{n, impl_->interval(n), lo, hi, impl_.get()};
}

long MapModel::locate(double x) const {
    const long n = impl_->locate(x);
    if (auto c = branch_count(); c && n > *c) return 0;
    return n;
}

std::optional<BranchTail> MapModel::tail(double y) const {
    if (truncated()) return std::nullopt;
    return impl_->tail(y);
}

std::optional<std::pair<double, double>> MapModel::log_growth(double v) const {
    if (truncated()) return std::nullopt;
    return impl_->log_growth(v);
}

std::string MapModel::describe() const {
    std::ostringstream os;
    os << family_name(family());
    const auto p = params();
    if (family() == Family::infinite_mp) os << "(beta=" << p.beta << ")";
    if (family() == Family::pathological) os << "(N=" << p.N << ", beta=" << p.beta << ")";
    if (family() == Family::linear_custom) {
        os << "(slopes=";
        for (std::size_t i = 0; i < p.affine.size(); ++i) os << (i ? "," : "") << p.affine[i].slope;
        os << ")";
    }
    if (truncation_) os << " truncated to " << *truncation_;
    return os.str();
}

MapModel build_gauss() { return MapModel(std::make_shared<GaussFamily>()); }
MapModel build_renyi() { return MapModel(std::make_shared<RenyiFamily>()); }

MapModel build_infinite_mp(double beta) {
    require(beta > 0.0 && std::isfinite(beta), "infinite_mp requires beta > 0");
    return MapModel(std::make_shared<InfiniteMPFamily>(beta));
}

MapModel build_pathological(long N, double beta) {
    require(N >= 1, "pathological requires N >= 1");
    require(beta > 0.0 && std::isfinite(beta), "pathological requires beta > 0");
    return MapModel(std::make_shared<PathologicalFamily>(N, beta));
}

MapModel build_linear_custom(std::vector<AffineBranch> branches) {
    return MapModel(std::make_shared<LinearFamily>(std::move(branches)));
}

MapModel build_linear_from_slopes(const std::vector<double>& slopes) {
    std::vector<AffineBranch> b;
    CompensatedSum edge;
    for (double s : slopes) {
        require(s > 1.0, "linear_custom slopes must exceed 1");
        const double lo = edge.value();
        edge.add(1.0 / s);
        b.push_back({{lo, edge.value()}, s});
    }
    require(edge.value() <= 1.0 + 1e-12, "linear_custom slopes do not fit in [0,1]: sum of 1/slope > 1");
    if (b.back().interval.hi > 1.0) b.back().interval.hi = 1.0;
    return build_linear_custom(std::move(b));
}

MapModel truncate(const MapModel& model, long N) {
    require(N >= 2, "truncation requires N >= 2");
    if (N > kBranchCap) fail(ErrorCode::budget, "truncation beyond the branch cap");
    return model.with_truncation(N);
}

}  // namespace thermokit
