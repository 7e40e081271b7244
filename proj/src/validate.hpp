#pragma once

#include <string>
#include <vector>

#include "maps.hpp"

namespace thermokit {

struct ConditionCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    int expansion_m = 0;          // smallest m in 1..8 with |(T^m)'| > 1 off the parabolic point; 0 if none
    double gamma = 0.0;           // fitted growth exponent of sup|T'| on branch n
    double log_C = 0.0;           // fitted log constant
    double growth_drift = 0.0;    // excess of log sup|T'| over the power law far out
    std::vector<double> rho;      // rho_d = max_w log(sup/inf |(T^d)'|) / d over 6-branch cylinders
    double inverse_error = 0.0;   // max |T(psi(y)) - y| over samples
    bool passed() const;
    const ConditionCheck* find(const std::string& name) const;
};

// Samples the structural conditions of an MR map. Failures are reported, not thrown.
ValidationReport validate(const MapModel& model, int depth = 6);

}  // namespace thermokit
