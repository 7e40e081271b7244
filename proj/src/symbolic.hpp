#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maps.hpp"

namespace thermokit {

// renewal_block(K) and cycle(K) are not among the named shifts: the first is the coding
// used by the conjugacy check, the second a non-mixing fixture.
enum class RuleKind { renewal, n_renewal, infinite_renewal, renewal_block, cycle };
std::string_view rule_kind_name(RuleKind k);
std::optional<RuleKind> parse_rule_kind(std::string_view s);

// Transition matrix on the vertices 0, 1, 2, ...
class TransitionRule {
public:
    RuleKind kind() const { return kind_; }
    std::optional<long> N() const { return N_; }
    bool allowed(long i, long j) const;
    std::string describe() const;

private:
    friend TransitionRule build_rule(RuleKind, std::optional<long>);
    TransitionRule(RuleKind k, std::optional<long> N) : kind_(k), N_(N) {}
    RuleKind kind_;
    std::optional<long> N_;
};

// N is required for n_renewal (N >= 1), renewal_block and cycle (K >= 1), and rejected otherwise.
TransitionRule build_rule(RuleKind kind, std::optional<long> N = std::nullopt);

// Locally constant potential phi(x) = weight(x_0).
struct CyclePotential {
    std::function<double(long)> weight;
    std::string description;

    static CyclePotential constant(double c);
};

struct GurevichEstimate {
    long n;
    double raw;        // (1/n) log Z_n, Z_n the weighted count of n-cycles through base
    double estimate;   // stabilized value
};

struct GurevichResult {
    std::vector<GurevichEstimate> sequence;  // lengths n with Z_n > 0
    double estimate;
    long period;
    long cap;
};

GurevichResult gurevich_pressure(const TransitionRule& rule, const CyclePotential& phi, long base, long n_max,
                                 long vertex_cap);

// Strongly connected class of `base` under the cap; empty when base lies on no cycle.
std::vector<long> connected_block(const TransitionRule& rule, long base, long vertex_cap);
// Primitivity of the capped matrix on the class of vertex 0.
bool check_mixing(const TransitionRule& rule, long vertex_cap);

struct ConjugacyMismatch {
    std::vector<long> word;    // branch itinerary, 1-based
    std::vector<long> cycle;   // vertex cycle
    std::string reason;
};

struct ConjugacyReport {
    long branches = 0;
    long depth = 0;
    long block = 0;            // K of renewal_block(K)
    long words_checked = 0;
    long cycles_checked = 0;
    long mismatch_count = 0;
    std::vector<ConjugacyMismatch> mismatches;  // first few
};

// Compares periodic itineraries of a parabolic model truncated to N branches with
// cycles of renewal_block(N - 1). Symbol n >= 2 maps to block vertex n - 2; a run of j
// parabolic steps maps to vertices K - 1 + j, K - 2 + j, ..., K.
ConjugacyReport itinerary_conjugacy_check(const MapModel& model, long N, long depth);

// Periodic point of the full-branch model with the given periodic itinerary.
double periodic_point(const MapModel& model, const std::vector<long>& word);

}  // namespace thermokit
