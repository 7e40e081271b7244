#include "symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace thermokit {

std::string_view rule_kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::renewal: return "renewal";
        case RuleKind::n_renewal: return "n_renewal";
        case RuleKind::infinite_renewal: return "infinite_renewal";
        case RuleKind::renewal_block: return "renewal_block";
        case RuleKind::cycle: return "cycle";
    }
    return "unknown";
}

std::optional<RuleKind> parse_rule_kind(std::string_view s) {
    for (RuleKind k : {RuleKind::renewal, RuleKind::n_renewal, RuleKind::infinite_renewal, RuleKind::renewal_block,
                       RuleKind::cycle})
        if (rule_kind_name(k) == s) return k;
    return std::nullopt;
}

TransitionRule build_rule(RuleKind kind, std::optional<long> N) {
    const bool needs_N = kind == RuleKind::n_renewal || kind == RuleKind::renewal_block || kind == RuleKind::cycle;
    if (needs_N) {
        if (!N || *N < 1) fail(ErrorCode::config, std::string(rule_kind_name(kind)) + " requires N >= 1");
    } else if (N) {
        fail(ErrorCode::config, std::string(rule_kind_name(kind)) + " takes no N");
    }
    return TransitionRule(kind, N);
}

bool TransitionRule::allowed(long i, long j) const {
    if (i < 0 || j < 0) return false;
    switch (kind_) {
        case RuleKind::renewal:
            return i == 0 || j == i - 1;
        case RuleKind::n_renewal: {
            const long N = *N_;
            if (i <= N) return true;
            if (i == N + 1) return j <= N;
            // a_{n+2,n+1} = 1 for n >= N + 2; rows N + 2 and N + 3 are empty.
            return i >= N + 4 && j == i - 1;
        }
        case RuleKind::infinite_renewal:
            if (i % 2 == 0) return true;
            if (i == 1) return j % 2 == 0;
            return j == i - 1;
        case RuleKind::renewal_block: {
            const long K = *N_;
            if (i < K) return true;
            if (i == K) return j < K;
            return j == i - 1;
        }
        case RuleKind::cycle:
            return i < *N_ && j == (i + 1) % *N_;
    }
    return false;
}

std::string TransitionRule::describe() const {
    std::string s(rule_kind_name(kind_));
    if (N_) s += "(" + std::to_string(*N_) + ")";
    return s;
}

CyclePotential CyclePotential::constant(double c) {
    std::ostringstream os;
    os.precision(17);
    os << "constant " << c;
    return {[c](long) { return c; }, os.str()};
}

namespace {

std::vector<char> reach(const TransitionRule& rule, long from, long cap, bool backward) {
    std::vector<char> seen(static_cast<std::size_t>(cap), 0);
    std::deque<long> q;
    auto visit = [&](long u) {
        for (long v = 0; v < cap; ++v) {
            const bool e = backward ? rule.allowed(v, u) : rule.allowed(u, v);
            if (e && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                q.push_back(v);
            }
        }
    };
    visit(from);
    while (!q.empty()) {
        const long u = q.front();
        q.pop_front();
        visit(u);
    }
    return seen;
}

long block_period(const TransitionRule& rule, const std::vector<long>& block) {
    std::vector<long> level(block.size(), -1);
    level[0] = 0;
    std::deque<std::size_t> q{0};
    long g = 0;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop_front();
        for (std::size_t k = 0; k < block.size(); ++k) {
            if (!rule.allowed(block[u], block[k])) continue;
            if (level[k] < 0) {
                level[k] = level[u] + 1;
                q.push_back(k);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[k]));
            }
        }
    }
    return g;
}

}  // namespace

std::vector<long> connected_block(const TransitionRule& rule, long base, long cap) {
    require(cap >= 1 && base >= 0 && base < cap, "base vertex must lie under the cap");
    const auto fwd = reach(rule, base, cap, false), bwd = reach(rule, base, cap, true);
    std::vector<long> block;
    if (!fwd[static_cast<std::size_t>(base)]) return block;
    for (long v = 0; v < cap; ++v)
        if (fwd[static_cast<std::size_t>(v)] && bwd[static_cast<std::size_t>(v)]) block.push_back(v);
    return block;
}

bool check_mixing(const TransitionRule& rule, long cap) {
    const auto block = connected_block(rule, 0, cap);
    if (block.empty()) return false;
    return block_period(rule, block) == 1;
}

GurevichResult gurevich_pressure(const TransitionRule& rule, const CyclePotential& phi, long base, long n_max,
                                 long cap) {
    require(n_max >= 1, "n_max must be positive");
    const auto block = connected_block(rule, base, cap);
    if (block.empty()) fail(ErrorCode::config, "base vertex lies on no cycle under the cap");

    // Cycles through base never leave its class, so the iteration runs on the block.
    const std::size_t m = block.size();
    std::vector<double> W(m * m, 0.0);
    std::size_t b = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (block[i] == base) b = i;
        const double w = std::exp(phi.weight(block[i]));
        require(std::isfinite(w), "potential must be finite on every vertex");
        for (std::size_t j = 0; j < m; ++j)
            if (rule.allowed(block[i], block[j])) W[i * m + j] = w;
    }

    GurevichResult r;
    r.cap = cap;
    r.period = block_period(rule, block);
    std::vector<double> v(m, 0.0), next(m);
    v[b] = 1.0;
    double log_scale = 0.0;
    std::vector<double> logZ(static_cast<std::size_t>(n_max) + 1, -kInf);
    for (long n = 1; n <= n_max; ++n) {
        parallel_for(m, [&](std::size_t j) {
            CompensatedSum s;
            for (std::size_t i = 0; i < m; ++i)
                if (v[i] != 0.0 && W[i * m + j] != 0.0) s.add(v[i] * W[i * m + j]);
            next[j] = s.value();
        });
        const double top = *std::max_element(next.begin(), next.end());
        require(top > 0.0, "vector iteration collapsed");
        log_scale += std::log(top);
        for (std::size_t j = 0; j < m; ++j) v[j] = next[j] / top;
        if (v[b] <= 0.0) continue;
        const double lz = std::log(v[b]) + log_scale;
        logZ[static_cast<std::size_t>(n)] = lz;
        // Average growth over the second half of the recorded lengths.
        double est = lz / n;
        for (long k = n / 2; k >= 1; --k)
            if (std::isfinite(logZ[static_cast<std::size_t>(k)])) {
                est = (lz - logZ[static_cast<std::size_t>(k)]) / static_cast<double>(n - k);
                break;
            }
        r.sequence.push_back({n, lz / n, est});
    }
    if (r.sequence.empty()) fail(ErrorCode::nonconvergence, "no cycle through base within n_max");
    r.estimate = r.sequence.back().estimate;
    return r;
}

double periodic_point(const MapModel& model, const std::vector<long>& word) {
    require(!word.empty(), "empty word");
    double x = 0.5;
    for (int it = 0; it < 100000; ++it) {
        double y = x;
        for (auto k = word.rbegin(); k != word.rend(); ++k) y = model.inverse(*k, y);
        const bool done = std::abs(y - x) <= 1e-16;
        x = y;
        if (done) break;
    }
    return x;
}

namespace {

std::vector<long> recode(const std::vector<long>& w, long K) {
    const std::size_t p = w.size();
    std::vector<long> c(p);
    for (std::size_t i = 0; i < p; ++i) {
        if (w[i] >= 2) {
            c[i] = w[i] - 2;
            continue;
        }
        long j = 0;
        while (j < static_cast<long>(p) && w[(i + static_cast<std::size_t>(j)) % p] == 1) ++j;
        c[i] = K - 1 + j;
    }
    return c;
}

std::vector<long> decode(const std::vector<long>& c, long K) {
    std::vector<long> w(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = c[i] < K ? c[i] + 2 : 1;
    return w;
}

bool admissible(const TransitionRule& rule, const std::vector<long>& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!rule.allowed(c[i], c[(i + 1) % c.size()])) return false;
    return true;
}

bool itinerary_matches(const MapModel& model, double x, const std::vector<long>& w) {
    for (long s : w) {
        if (model.locate(x) != s) return false;
        x = model.forward(s, x);
    }
    return true;
}

}  // namespace

ConjugacyReport itinerary_conjugacy_check(const MapModel& model, long N, long depth) {
    require(N >= 2, "conjugacy check needs at least two branches");
    require(depth >= 1 && depth <= 12, "depth must lie in 1..12");
    const auto par = model.parabolic();
    require(par && par->branch == 1, "conjugacy check needs the parabolic point in branch 1");
    const MapModel m = truncate(model, N);
    const long K = N - 1;
    const TransitionRule rule = build_rule(RuleKind::renewal_block, K);

    ConjugacyReport r;
    r.branches = N;
    r.depth = depth;
    r.block = K;
    auto report = [&](std::vector<long> w, std::vector<long> c, std::string why) {
        ++r.mismatch_count;
        if (r.mismatches.size() < 20) r.mismatches.push_back({std::move(w), std::move(c), std::move(why)});
    };

    for (long p = 1; p <= depth; ++p) {
        // Interval side: every word except the fixed point 1^p.
        std::vector<long> w(static_cast<std::size_t>(p), 1);
        for (;;) {
            if (std::any_of(w.begin(), w.end(), [](long s) { return s != 1; })) {
                ++r.words_checked;
                const auto c = recode(w, K);
                const double x = periodic_point(m, w);
                if (!itinerary_matches(m, x, w))
                    report(w, c, "periodic point does not follow its word");
                else if (!admissible(rule, c))
                    report(w, c, "recoded itinerary is not admissible");
            }
            long j = p - 1;
            while (j >= 0 && ++w[static_cast<std::size_t>(j)] > N) w[static_cast<std::size_t>(j--)] = 1;
            if (j < 0) break;
        }
        // Symbolic side: every admissible cycle of length p; runs of 1 are shorter than p.
        const long V = K + p - 1;
        std::vector<long> c(static_cast<std::size_t>(p), 0);
        for (;;) {
            if (admissible(rule, c)) {
                ++r.cycles_checked;
                const auto w2 = decode(c, K);
                if (recode(w2, K) != c) {
                    report(w2, c, "cycle does not round-trip through the recoding");
                } else if (!itinerary_matches(m, periodic_point(m, w2), w2)) {
                    report(w2, c, "cycle has no interval periodic point");
                }
            }
            long j = p - 1;
            while (j >= 0 && ++c[static_cast<std::size_t>(j)] >= V) c[static_cast<std::size_t>(j--)] = 0;
            if (j < 0) break;
        }
    }
    if (r.words_checked != r.cycles_checked) report({}, {}, "word and cycle counts differ");
    return r;
}

}  // namespace thermokit
