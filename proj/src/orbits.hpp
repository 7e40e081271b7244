#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <mpfr.h>

#include "maps.hpp"

namespace thermokit {

inline constexpr unsigned kDefaultBits = 256;

// MPFR value with its own mantissa length.
class Real {
public:
    explicit Real(unsigned bits = kDefaultBits);
    Real(double v, unsigned bits);
    Real(const Real& other);
    Real& operator=(const Real& other);
    ~Real();

    // Decimal literal or one of: golden, 1/pi, sqrt2-1, e-2.
    static Real parse(const std::string& text, unsigned bits = kDefaultBits);
    // `bits` random mantissa bits, uniform on (0,1).
    static Real random(std::mt19937_64& rng, unsigned bits = kDefaultBits);

    unsigned bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(int digits = 40) const;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

enum class CFKind { regular, backward };

struct CFExpansion {
    CFKind kind = CFKind::regular;
    std::vector<long> digits;
    Real origin;
    bool truncated = false;   // fewer digits than requested
    std::string reason;
};

// Regular digits of the Gauss orbit, or backward digits (branch index + 1) of the Renyi orbit.
CFExpansion cf_expand(const Real& x, long n, CFKind kind);
CFExpansion cf_expand(double x, long n, CFKind kind, unsigned bits = kDefaultBits);

using BigInt = boost::multiprecision::mpz_int;

struct Approximant {
    BigInt p;
    BigInt q;
};

// p_n / q_n for n = 1 .. digits.size().
std::vector<Approximant> approximants(std::span<const long> digits);
// p/q as a Real.
Real evaluate(const Approximant& a, unsigned bits = kDefaultBits);
// log |x - p/q|.
double log_abs_error(const Real& x, const Approximant& a);

struct LyapunovPair {
    double a = 0.0;   // -(1/n) log |x - p_n/q_n|
    double b = 0.0;   // (1/n) log |(G^n)'(x)|
    bool valid = false;
    std::string reason;
};
LyapunovPair lyapunov_via_approximants(const Real& x, long n);

struct BirkhoffSample {
    double x0;
    long n;
    double lambda_hat;  // nan when x0 lies outside every branch
    bool escaped;
};

// Sample i starts from a generator seeded with (seed, i) and is independent of the worker count.
std::vector<BirkhoffSample> sample_lyapunov(const MapModel& model, long count, long n, std::uint64_t seed);
double median_lambda(const std::vector<BirkhoffSample>& samples);

}  // namespace thermokit
