#include "orbits.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "numeric.hpp"

namespace thermokit {

Real::Real(unsigned bits) {
    require(bits >= MPFR_PREC_MIN && bits <= 1u << 20, "mantissa length out of range");
    mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
    mpfr_set_zero(v_, 1);
}

Real::Real(double v, unsigned bits) : Real(bits) { mpfr_set_d(v_, v, MPFR_RNDN); }

Real::Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::parse(const std::string& text, unsigned bits) {
    Real r(bits);
    if (text == "golden") {
        mpfr_sqrt_ui(r.v_, 5, MPFR_RNDN);
        mpfr_sub_ui(r.v_, r.v_, 1, MPFR_RNDN);
        mpfr_div_2ui(r.v_, r.v_, 1, MPFR_RNDN);
    } else if (text == "1/pi") {
        mpfr_const_pi(r.v_, MPFR_RNDN);
        mpfr_ui_div(r.v_, 1, r.v_, MPFR_RNDN);
    } else if (text == "sqrt2-1") {
        mpfr_sqrt_ui(r.v_, 2, MPFR_RNDN);
        mpfr_sub_ui(r.v_, r.v_, 1, MPFR_RNDN);
    } else if (text == "e-2") {
        mpfr_set_ui(r.v_, 1, MPFR_RNDN);
        mpfr_exp(r.v_, r.v_, MPFR_RNDN);
        mpfr_sub_ui(r.v_, r.v_, 2, MPFR_RNDN);
    } else {
        char* end = nullptr;
        mpfr_strtofr(r.v_, text.c_str(), &end, 10, MPFR_RNDN);
        if (text.empty() || end == text.c_str() || *end != '\0')
            fail(ErrorCode::config, "cannot parse real number '" + text + "'");
    }
    return r;
}

Real Real::random(std::mt19937_64& rng, unsigned bits) {
    const std::size_t words = (bits + 63) / 64;
    std::vector<std::uint64_t> w(words);
    for (auto& x : w) x = rng();
    mpz_t z;
    mpz_init(z);
    mpz_import(z, words, 1, sizeof(std::uint64_t), 0, 0, w.data());
    // (m + 1/2) / 2^(64 words) lies strictly inside (0,1).
    mpz_mul_2exp(z, z, 1);
    mpz_add_ui(z, z, 1);
    Real r(bits);
    mpfr_set_z(r.v_, z, MPFR_RNDN);
    mpfr_div_2ui(r.v_, r.v_, static_cast<unsigned long>(64 * words + 1), MPFR_RNDN);
    mpz_clear(z);
    return r;
}

std::string Real::str(int digits) const {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

CFExpansion cf_expand(const Real& x, long n, CFKind kind) {
    require(n >= 1, "digit count must be positive");
    require(mpfr_cmp_ui(x.get(), 0) > 0 && mpfr_cmp_ui(x.get(), 1) < 0, "x must lie in (0,1)");
    CFExpansion cf;
    cf.kind = kind;
    cf.origin = x;
    const unsigned bits = x.bits();
    Real y = x, z(bits), a(bits), rest(bits);
    const double ulp = std::ldexp(1.0, -static_cast<int>(bits) + 2);
    double err = ulp;
    for (long k = 0; k < n; ++k) {
        if (kind == CFKind::regular) {
            mpfr_ui_div(z.get(), 1, y.get(), MPFR_RNDN);
        } else {
            mpfr_ui_sub(z.get(), 1, y.get(), MPFR_RNDN);
            mpfr_ui_div(z.get(), 1, z.get(), MPFR_RNDN);
        }
        mpfr_floor(a.get(), z.get());
        mpfr_sub(rest.get(), z.get(), a.get(), MPFR_RNDN);
        const double f = rest.to_double(), zd = z.to_double();
        const double gap = std::min(f, 1.0 - f);
        if (gap < 1e-14 || zd > 1e15) {
            cf.truncated = true;
            cf.reason = "orbit hits a branch endpoint";
            break;
        }
        err = err * zd * zd + ulp * (1.0 + zd);
        if (err > 1e-3 * gap) {
            cf.truncated = true;
            cf.reason = "precision exhausted";
            break;
        }
        const long digit = mpfr_get_si(a.get(), MPFR_RNDN);
        cf.digits.push_back(kind == CFKind::regular ? digit : digit + 1);
        y = rest;
    }
    return cf;
}

CFExpansion cf_expand(double x, long n, CFKind kind, unsigned bits) { return cf_expand(Real(x, bits), n, kind); }

std::vector<Approximant> approximants(std::span<const long> digits) {
    std::vector<Approximant> out;
    out.reserve(digits.size());
    BigInt p2 = 1, q2 = 0, p1 = 0, q1 = 1;
    for (long a : digits) {
        require(a >= 1, "regular digits must be positive");
        BigInt p = a * p1 + p2, q = a * q1 + q2;
        p2 = p1;
        q2 = q1;
        p1 = p;
        q1 = q;
        out.push_back({p, q});
    }
    return out;
}

Real evaluate(const Approximant& a, unsigned bits) {
    Real r(bits), q(bits);
    mpfr_set_z(r.get(), a.p.backend().data(), MPFR_RNDN);
    mpfr_set_z(q.get(), a.q.backend().data(), MPFR_RNDN);
    mpfr_div(r.get(), r.get(), q.get(), MPFR_RNDN);
    return r;
}

double log_abs_error(const Real& x, const Approximant& a) {
    Real d = evaluate(a, x.bits());
    mpfr_sub(d.get(), x.get(), d.get(), MPFR_RNDN);
    if (mpfr_zero_p(d.get())) return -kInf;
    mpfr_abs(d.get(), d.get(), MPFR_RNDN);
    mpfr_log(d.get(), d.get(), MPFR_RNDN);
    return d.to_double();
}

LyapunovPair lyapunov_via_approximants(const Real& x, long n) {
    LyapunovPair r;
    const CFExpansion cf = cf_expand(x, n, CFKind::regular);
    if (cf.truncated) {
        r.reason = cf.reason;
        return r;
    }
    const auto apps = approximants(cf.digits);
    const double e = log_abs_error(x, apps.back());
    if (!std::isfinite(e)) {
        r.reason = "x equals its approximant";
        return r;
    }
    r.a = -e / static_cast<double>(n);
    Real y = x, l(x.bits());
    CompensatedSum s;
    for (long k = 0; k < n; ++k) {
        mpfr_log(l.get(), y.get(), MPFR_RNDN);
        s.add(-2.0 * l.to_double());
        mpfr_ui_div(y.get(), 1, y.get(), MPFR_RNDN);
        mpfr_sub_si(y.get(), y.get(), cf.digits[static_cast<std::size_t>(k)], MPFR_RNDN);
    }
    r.b = s.value() / static_cast<double>(n);
    r.valid = true;
    return r;
}

std::vector<BirkhoffSample> sample_lyapunov(const MapModel& model, long count, long n, std::uint64_t seed) {
    require(count >= 1 && n >= 1, "count and n must be positive");
    std::vector<BirkhoffSample> out(static_cast<std::size_t>(count));
    parallel_for(out.size(), [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        double x0 = 0.0;
        while (x0 == 0.0) x0 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double x = x0;
        CompensatedSum s;
        long k = 0;
        bool escaped = false;
        for (; k < n; ++k) {
            const long b = std::isfinite(x) ? model.locate(x) : 0;
            if (b == 0) {
                escaped = true;
                break;
            }
            s.add(std::log(model.derivative(b, x)));
            x = model.forward(b, x);
        }
        out[i] = {x0, n, k ? s.value() / static_cast<double>(k) : std::nan(""), escaped};
    });
    return out;
}

double median_lambda(const std::vector<BirkhoffSample>& samples) {
    std::vector<double> v;
    for (const auto& s : samples)
        if (!s.escaped) v.push_back(s.lambda_hat);
    require(!v.empty(), "every sample escaped");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    if (v.size() % 2) return v[mid];
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace thermokit
