#ifndef QLH_RATIONAL_HPP
#define QLH_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlh {

// Exact rational scalar. mpq_class keeps gcd(|num|,den) = 1 and den >= 1
// as long as values are built through its arithmetic, which is all we do.
using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_one(const Rational& q) { return q == 1; }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline long to_long(const Rational& q) {
    if (!is_integer(q) || !q.get_num().fits_slong_p())
        throw std::domain_error("rational does not fit a long");
    return q.get_num().get_si();
}

inline Rational rat_pow(const Rational& q, long e) {
    if (e == 0) return Rational(1);
    if (e < 0) {
        if (is_zero(q)) throw std::domain_error("zero to a negative power");
        return rat_pow(Rational(1) / q, -e);
    }
    Rational acc(1), base(q);
    long k = e;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

inline Rational factorial(long n) {
    if (n < 0) throw std::domain_error("factorial of a negative integer");
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(f);
}

inline Rational binomial(long n, long k) {
    if (k < 0 || k > n) return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(b);
}

// Canonical rendering: "n" for integers, "n/d" otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rat_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    q.canonicalize();
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    return q;
}

}  // namespace qlh

#endif
