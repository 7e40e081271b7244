#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "io.hpp"

namespace thermokit {

struct Verdict {
    std::string name;
    double value;
    double target;
    double tolerance;
    std::string relation;  // "abs", "ge", "le", "range", "bool"
    bool pass;
};

Verdict check_abs(std::string name, double value, double target, double tol);
Verdict check_ge(std::string name, double value, double bound);
Verdict check_range(std::string name, double value, double lo, double hi);
Verdict check_true(std::string name, bool ok);
Json to_json(const Verdict& v);

struct ReportOptions {
    EngineOptions engine{};
    std::uint64_t seed = 1;
    long orbit_count = 1000;
    long orbit_n = 10000;
};

// Closed-form pressure log sum |s_i|^-t of a model whose branches are all affine and full.
double affine_pressure(const MapModel& model, double t);
// inf_t (P(t) + t a) / a for the closed form, by bracketed minimization.
double affine_spectrum(const MapModel& model, double alpha);

// Full battery for the model's family: regime, spectrum features and the verdicts.
Json run_report(const MapModel& model, const ReportOptions& opts = {});

}  // namespace thermokit
