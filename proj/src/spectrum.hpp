#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pressure.hpp"

namespace thermokit {

struct SpectrumPoint {
    double alpha = 0.0;
    double L = 0.0;
    double L_error = 0.0;
    double t_alpha = 0.0;
    double residual = 0.0;        // R = P(t_a) + (a^2/2) t_a'
    double residual_error = 0.0;
    bool present = true;          // false when alpha lies outside the spectrum's domain
    bool pinned = false;          // parabolic plateau alpha <= alpha*, L = dim
    bool bound = false;           // t_a beyond the resolved region; L from the bracket [t_hi, dim]
    std::string flags() const;
};

struct AlphaStar {
    double value = 0.0;
    double error = 0.0;
    bool slow_convergence = false;
};

class SpectrumCurve {
public:
    const std::vector<SpectrumPoint>& points() const { return points_; }
    const PressureCurve& source() const { return *source_; }
    const AlphaStar& alpha_star() const { return alpha_star_; }
    // Pointwise evaluation at any alpha (residual from t' = -1/P'').
    SpectrumPoint at(double alpha) const;

private:
    friend SpectrumCurve legendre_spectrum(std::shared_ptr<const PressureCurve>, std::span<const double>);
    std::shared_ptr<const PressureCurve> source_;
    AlphaStar alpha_star_{};
    std::vector<SpectrumPoint> points_;
};

// L(a) = inf_t (P(t) + t a) / a on the grid; t' from centered differences across the grid.
SpectrumCurve legendre_spectrum(std::shared_ptr<const PressureCurve> curve, std::span<const double> alpha_grid);

// Geometric grid on [max(alpha_min, 1e-3), hi].
std::vector<double> default_alpha_grid(double alpha_min, double hi = 50.0, int n = 240);

AlphaStar alpha_star(const PressureCurve& curve, double dim);
// Minimum Lyapunov exponent over periodic points of period <= period_cap among branches 1..N_max.
double alpha_min(const MapModel& model, int period_cap = 4, long N_max = 12);

struct SpectrumFeatures {
    AlphaStar alpha_star;
    double alpha_min = 0.0;
    double alpha_max_at = 0.0;
    double L_max = 0.0;
    bool boundary_maximum = false;
    std::optional<double> asymptote;        // absent for bounded domains
    double asymptote_error = 0.0;
    std::vector<double> inflections;
    bool inflections_incomplete = false;
    double dim_estimate = 0.0;
    double dim_irregular = 0.0;             // reported equal to dim_estimate
};

SpectrumFeatures features(const PressureCurve& curve, const SpectrumCurve& spectrum, const MapModel& model);

// Second differences of L on the grid against the residual sign (L'' = 2R / a^3).
struct InflectionRow {
    double alpha;
    double residual;
    double residual_error;
    double second_difference;
    bool significant;  // |R| above its error bar
    bool agree;        // sign match, or not significant
};
std::vector<InflectionRow> inflection_consistency(const SpectrumCurve& spectrum);

// |t_a - L(a)| at `at`; vanishes at an interior maximum.
double maximum_t_identity(const SpectrumCurve& spectrum, double at);

struct TruncatedValue {
    long N;
    bool present;
    double L;
    double t_alpha;
};
struct TruncatedSpectra {
    double alpha;
    std::vector<TruncatedValue> values;
    bool monotone = true;
    std::optional<double> full_L;
    double gap = std::nan("");  // full L minus the largest present L_N
};
TruncatedSpectra truncated_spectra(const MapModel& model, double alpha, std::span<const long> N_list,
                                   std::optional<double> full_L = std::nullopt);

}  // namespace thermokit
