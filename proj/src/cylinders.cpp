#include "cylinders.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "numeric.hpp"

namespace thermokit {

namespace {

constexpr std::array<double, kCylinderSamples> kSamples{0.0, 0.25, 0.5, 0.75, 1.0};

std::uint64_t word_count(long N, int depth, std::uint64_t budget) {
    require(N >= 1 && depth >= 1, "cylinders need N >= 1 and depth >= 1");
    std::uint64_t count = 1;
    for (int k = 0; k < depth; ++k) {
        if (count > budget / static_cast<std::uint64_t>(N))
            fail(ErrorCode::budget, "cylinder enumeration of " + std::to_string(N) + "^" + std::to_string(depth) +
                                        " words exceeds the word budget");
        count *= static_cast<std::uint64_t>(N);
    }
    return count;
}

long effective_N(const MapModel& model, long N) {
    if (auto c = model.branch_count()) require(N <= *c, "N exceeds the model's branch count");
    if (N > kBranchCap) fail(ErrorCode::budget, "N beyond the branch cap");
    return N;
}

}  // namespace

void for_each_cylinder(const MapModel& model, long N, int depth,
                       const std::function<void(const CylinderWord&)>& visit, std::uint64_t budget) {
    N = effective_N(model, N);
    const std::uint64_t total = word_count(N, depth, budget);
    CylinderWord cw;
    cw.word.assign(static_cast<std::size_t>(depth), 1);
    for (std::uint64_t w = 0; w < total; ++w) {
        std::array<double, kCylinderSamples> z = kSamples, lj{};
        for (int k = depth - 1; k >= 0; --k) {
            const long s = cw.word[static_cast<std::size_t>(k)];
            for (int i = 0; i < kCylinderSamples; ++i) {
                lj[i] += model.log_inverse_jacobian(s, z[i]);
                z[i] = model.inverse(s, z[i]);
            }
        }
        cw.interval = {std::min(z.front(), z.back()), std::max(z.front(), z.back())};
        const auto [lmin, lmax] = std::minmax_element(lj.begin(), lj.end());
        cw.deriv_inf = std::exp(-*lmax);
        cw.deriv_sup = std::exp(-*lmin);
        visit(cw);
        for (int k = depth - 1; k >= 0; --k) {
            auto& s = cw.word[static_cast<std::size_t>(k)];
            if (++s <= N) break;
            s = 1;
        }
    }
}

std::vector<CylinderWord> cylinders(const MapModel& model, long N, int depth, std::uint64_t budget) {
    std::vector<CylinderWord> out;
    for_each_cylinder(model, N, depth, [&](const CylinderWord& c) { out.push_back(c); }, budget);
    return out;
}

Bracket pressure_cylinder(const MapModel& model, double t, long N, int depth, std::uint64_t budget) {
    N = effective_N(model, N);
    word_count(N, depth, budget);
    // Depth-first from the innermost symbol; the summation order is fixed.
    std::vector<std::array<double, kCylinderSamples>> z(static_cast<std::size_t>(depth) + 1),
        lj(static_cast<std::size_t>(depth) + 1);
    z[0] = kSamples;
    lj[0] = {};
    LogSumExp upper, lower;
    std::vector<long> sym(static_cast<std::size_t>(depth), 0);
    int level = 0;
    while (level >= 0) {
        auto& s = sym[static_cast<std::size_t>(level)];
        if (++s > N) {
            s = 0;
            --level;
            continue;
        }
        const auto& zin = z[static_cast<std::size_t>(level)];
        const auto& lin = lj[static_cast<std::size_t>(level)];
        auto& zout = z[static_cast<std::size_t>(level) + 1];
        auto& lout = lj[static_cast<std::size_t>(level) + 1];
        for (int i = 0; i < kCylinderSamples; ++i) {
            lout[i] = lin[i] + model.log_inverse_jacobian(s, zin[i]);
            zout[i] = model.inverse(s, zin[i]);
        }
        if (level + 1 == depth) {
            double hi = -kInf, lo = kInf;
            for (int i = 0; i < kCylinderSamples; ++i) {
                hi = std::max(hi, t * lout[i]);
                lo = std::min(lo, t * lout[i]);
            }
            upper.add(hi);
            lower.add(lo);
        } else {
            ++level;
        }
    }
    return {lower.value() / depth, upper.value() / depth};
}

}  // namespace thermokit
