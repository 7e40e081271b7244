#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "induced.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "transfer.hpp"

namespace thermokit {

// Bisection for the onset of convergence of sum_n (sup_{I_n}|T'|)^-t; 0 for finite models.
double critical_t(const MapModel& model);

// P_N(-t log|T'|) for the truncation to branches 1..N.
PressureEstimate pressure_truncated(const MapModel& model, double t, long N, const SolveOptions& opts = {});

enum class Route { automatic, cylinder, induced };
std::string_view route_name(Route r);
std::optional<Route> parse_route(std::string_view s);

struct EngineOptions {
    Route route = Route::automatic;
    long cylinder_N = 200;   // explicit branches of the cylinder route
    long induced_N = 400;
    long induced_J = 2000;
    SolveOptions solve{};
};

// Width of the band above t* in which values are reported as the +inf sentinel.
inline constexpr double kCriticalBand = 1e-5;

class PressureEngine {
public:
    explicit PressureEngine(MapModel model, EngineOptions opts = {});

    const MapModel& model() const { return model_; }
    const EngineOptions& options() const { return opts_; }
    double t_star() const { return t_star_; }
    double dim_estimate() const { return dim_; }
    bool degenerate() const { return model_.non_condition5(); }
    // Finite, real-analytic region (t_lo, t_hi) of the pressure; (-inf, inf) for finite models.
    double finite_lo() const;
    double finite_hi() const;
    const InducedScheme* induced() const { return induced_.get(); }

    PressureEstimate pressure(double t) const;
    // Forces a route regardless of the configured one (for cross-validation).
    PressureEstimate pressure_by(double t, Route route) const;

private:
    PressureEstimate cylinder_route(double t) const;

    MapModel model_;
    EngineOptions opts_;
    double t_star_ = 0.0;
    double dim_ = 0.0;
    std::unique_ptr<CylinderSums> cyl_;
    std::unique_ptr<InducedScheme> induced_;
};

// One-sided limit of -P'(t) as t -> dim from the left, with an extrapolation flag.
struct LeftDerivative {
    double value = 0.0;
    double error = 0.0;
    bool slow_convergence = false;
    std::vector<double> raw;  // difference quotients at dim - delta_k
};
LeftDerivative left_derivative_at_dim(const PressureEngine& engine);

enum class Regime { gauss_like, renyi_like, infinite_mp_like, degenerate };
std::string_view regime_name(Regime r);

struct RegimeReport {
    double t_star = 0.0;
    double dim_estimate = 0.0;
    Regime regime = Regime::gauss_like;
    bool differentiable_at_dim = true;
    double confidence = 0.0;       // |gap - threshold| / (threshold + error)
    double derivative_gap = 0.0;   // |left - right derivative| at dim
    bool slow_convergence = false;
};

inline constexpr double kDifferentiabilityGap = 0.1;

RegimeReport classify_regime(const PressureEngine& engine);
RegimeReport classify_regime(const MapModel& model);

struct CurvePoint {
    double t;
    double value;
    double lower;
    double upper;
    double error;
    bool infinite;
    long N;
    int depth;
    Method method;
    bool converged;
};

// Sampled pressure with a piecewise Chebyshev interpolant on the finite region.
class PressureCurve {
public:
    // Smooth curve with automatic panels over the finite region.
    static PressureCurve build(std::shared_ptr<const PressureEngine> engine);
    // Points at the given t values; the interpolant is built as for `build`.
    static PressureCurve build(std::shared_ptr<const PressureEngine> engine, std::span<const double> t_grid);

    const std::vector<CurvePoint>& points() const { return points_; }
    const PressureEngine& engine() const { return *engine_; }
    std::shared_ptr<const PressureEngine> engine_ptr() const { return engine_; }
    bool interpolated() const { return !panels_.empty(); }
    double lo() const { return interpolated() ? panels_.front().lo : kInf; }
    double hi() const { return interpolated() ? panels_.back().hi : -kInf; }
    bool covers(double t) const { return interpolated() && t >= lo() && t <= hi(); }

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;
    // Error of the sampled values near t.
    double value_error(double t) const;
    // Largest relative trailing Chebyshev coefficient over the panels.
    double resolution() const { return resolution_; }
    // False if any sampled value, panel nodes included, missed its tolerance.
    bool converged() const { return converged_; }

private:
    struct PanelFit {
        double lo, hi;
        std::vector<double> coeffs;
        double error;
    };
    const PanelFit& panel(double t) const;

    std::shared_ptr<const PressureEngine> engine_;
    std::vector<CurvePoint> points_;
    std::vector<PanelFit> panels_;
    double resolution_ = 0.0;
    bool converged_ = true;
};

// P'(t) from the interpolant, or a difference quotient of the engine when t lies
// outside the interpolated region.
double pressure_derivative(const PressureCurve& curve, double t);

// Invariant checks on emitted curves: monotone, midpoint convex, bracketed.
struct CurveCheck {
    bool monotone = true;
    bool convex = true;
    bool bracketed = true;
};
CurveCheck check_curve(const std::vector<CurvePoint>& points);

}  // namespace thermokit
