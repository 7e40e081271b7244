#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "maps.hpp"

namespace thermokit {

struct CylinderWord {
    std::vector<long> word;
    Interval interval;
    double deriv_inf;
    double deriv_sup;
};

inline constexpr std::uint64_t kDefaultWordBudget = 10'000'000;

// Visits all N^depth words of the N-truncation in lexicographic order.
void for_each_cylinder(const MapModel& model, long N, int depth,
                       const std::function<void(const CylinderWord&)>& visit,
                       std::uint64_t budget = kDefaultWordBudget);
std::vector<CylinderWord> cylinders(const MapModel& model, long N, int depth,
                                    std::uint64_t budget = kDefaultWordBudget);

struct Bracket {
    double lower;
    double upper;
    double mid() const { return 0.5 * (lower + upper); }
};

// (1/depth) log of the depth-word sums of deriv_sup^-t and deriv_inf^-t.
Bracket pressure_cylinder(const MapModel& model, double t, long N, int depth,
                          std::uint64_t budget = kDefaultWordBudget);

// log|psi_w'(y)| at the cylinder sample points y in {0, 1/4, 1/2, 3/4, 1}.
inline constexpr int kCylinderSamples = 5;

}  // namespace thermokit
