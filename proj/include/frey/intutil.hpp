// Exact integer/rational helpers on top of GMP.
#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace frey {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// v_q(n) for n != 0.
inline long val_q(Int n, const Int& q) {
    if (n == 0) throw std::domain_error("val_q: zero argument");
    long v = 0;
    while (mpz_divisible_p(n.get_mpz_t(), q.get_mpz_t())) {
        n /= q;
        ++v;
    }
    return v;
}

inline long val_q(const Rat& x, const Int& q) {
    if (x == 0) throw std::domain_error("val_q: zero argument");
    return val_q(Int(x.get_num()), q) - val_q(Int(x.get_den()), q);
}

// Legendre symbol (a/p), p an odd prime.
inline int legendre(const Int& a, const Int& p) {
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

inline Int mod_floor(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int inv_mod(const Int& a, const Int& m) {
    Int r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
        throw std::domain_error("inv_mod: not invertible");
    return r;
}

inline Int pow_mod(const Int& b, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

namespace intdetail {

// Brent-cycle Pollard rho; n odd composite, not a prime power of interest
inline Int pollard_rho(const Int& n) {
    for (unsigned long c = 1;; ++c) {
        Int x(2), y(2), d(1);
        Int saved_x = x;
        unsigned long power = 1, lam = 0;
        while (d == 1) {
            if (lam == power) {
                saved_x = x;
                power *= 2;
                lam = 0;
            }
            x = mod_floor(x * x + c, n);
            ++lam;
            Int diff = x - saved_x;
            if (diff == 0) break;  // cycle without factor: retry with c+1
            if (diff < 0) diff = -diff;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != 1 && d != n) return d;
    }
}

inline void factor_into(Int n, std::map<Int, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace intdetail

// Complete factorization: trial division for the small part, Pollard rho plus
// a primality test for the rest.
inline std::vector<std::pair<Int, int>> factor(Int n, long trial_bound = 20000) {
    if (n == 0) throw std::domain_error("factor: zero argument");
    std::vector<std::pair<Int, int>> out;
    if (n < 0) n = -n;
    if (n == 1) return out;
    auto strip = [&](unsigned long p) {
        int e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            ++e;
        }
        if (e) out.emplace_back(Int(p), e);
    };
    strip(2);
    for (unsigned long p = 3; (unsigned long)p <= (unsigned long)trial_bound; p += 2) {
        if (Int(p) * p > n) break;
        strip(p);
    }
    if (n > 1) {
        std::map<Int, int> rest;
        intdetail::factor_into(n, rest);
        for (auto& [p, e] : rest) out.emplace_back(p, e);
    }
    return out;
}

inline bool is_square(const Int& n) {
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t());
}

inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

// Exact square root of a rational; throws if not a perfect square.
inline Rat rat_sqrt_exact(const Rat& x) {
    if (x < 0) throw std::domain_error("rat_sqrt_exact: negative");
    Int num = x.get_num(), den = x.get_den();
    if (!is_square(num) || !is_square(den)) throw std::domain_error("rat_sqrt_exact: not a square");
    return Rat(isqrt(num), isqrt(den));
}

inline std::string to_str(const Int& n) { return n.get_str(); }

inline std::string to_str(const Rat& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace frey
