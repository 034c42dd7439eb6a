// Arithmetic and factorization for polynomials over prime fields F_q, and
// residue-field arithmetic in F_{q^f} presented as F_q[t]/(m). Primes here are
// small (sieve auxiliaries and coefficient-field primes), so coefficients are
// plain machine integers.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "intutil.hpp"

namespace frey {

using i64 = long;

inline i64 mod_pos(i64 a, i64 q) {
    a %= q;
    return a < 0 ? a + q : a;
}

inline i64 mul_mod(i64 a, i64 b, i64 q) {
    return (i64)(((__int128)a * b) % q);
}

inline i64 pow_mod_i(i64 b, i64 e, i64 q) {
    i64 r = 1 % q;
    b = mod_pos(b, q);
    while (e) {
        if (e & 1) r = mul_mod(r, b, q);
        b = mul_mod(b, b, q);
        e >>= 1;
    }
    return r;
}

inline i64 inv_mod_i(i64 a, i64 q) {
    __int128 t = 0, nt = 1, r = q, nr = mod_pos(a, q);
    while (nr) {
        __int128 qt = r / nr;
        __int128 tmp = t - qt * nt;
        t = nt;
        nt = tmp;
        tmp = r - qt * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::domain_error("inv_mod_i: not invertible");
    i64 res = (i64)(t % q);
    return mod_pos(res, q);
}

// --- polynomials over F_q, coefficient vector low-to-high, no trailing zeros

struct FqPoly {
    i64 q = 2;
    std::vector<i64> c;

    FqPoly() = default;
    FqPoly(i64 qq, std::vector<i64> cc) : q(qq), c(std::move(cc)) { norm(); }
    void norm() {
        for (auto& x : c) x = mod_pos(x, q);
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int deg() const { return (int)c.size() - 1; }
    bool is_zero() const { return c.empty(); }
    i64 coeff(int i) const { return (i >= 0 && i < (int)c.size()) ? c[i] : 0; }
    bool operator==(const FqPoly& o) const { return q == o.q && c == o.c; }
    bool operator<(const FqPoly& o) const {
        // ordering contract: degree, then coefficient tuple from the constant
        // term upward
        if (deg() != o.deg()) return deg() < o.deg();
        for (size_t i = 0; i < c.size(); ++i)
            if (c[i] != o.c[i]) return c[i] < o.c[i];
        return false;
    }
};

inline FqPoly fq_x(i64 q) { return FqPoly(q, {0, 1}); }

inline FqPoly operator+(const FqPoly& a, const FqPoly& b) {
    std::vector<i64> r(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return FqPoly(a.q, std::move(r));
}

inline FqPoly operator-(const FqPoly& a, const FqPoly& b) {
    std::vector<i64> r(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return FqPoly(a.q, std::move(r));
}

inline FqPoly operator*(const FqPoly& a, const FqPoly& b) {
    if (a.is_zero() || b.is_zero()) return FqPoly(a.q, {});
    std::vector<i64> r(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r[i + j] = (i64)((r[i + j] + (__int128)a.c[i] * b.c[j]) % a.q);
    return FqPoly(a.q, std::move(r));
}

inline std::pair<FqPoly, FqPoly> fq_divmod(const FqPoly& a, const FqPoly& b) {
    if (b.is_zero()) throw std::domain_error("fq_divmod: zero divisor");
    FqPoly r = a;
    std::vector<i64> qv(a.deg() >= b.deg() ? a.deg() - b.deg() + 1 : 0, 0);
    i64 binv = inv_mod_i(b.c.back(), a.q);
    while (!r.is_zero() && r.deg() >= b.deg()) {
        i64 f = mul_mod(r.c.back(), binv, a.q);
        int k = r.deg() - b.deg();
        qv[k] = f;
        for (int i = 0; i <= b.deg(); ++i)
            r.c[i + k] = (i64)mod_pos((i64)((r.c[i + k] - (__int128)f * b.c[i]) % a.q), a.q);
        r.norm();
    }
    return {FqPoly(a.q, std::move(qv)), r};
}

inline FqPoly fq_mod(const FqPoly& a, const FqPoly& b) { return fq_divmod(a, b).second; }

inline FqPoly fq_gcd(FqPoly a, FqPoly b) {
    while (!b.is_zero()) {
        FqPoly r = fq_mod(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero() && a.c.back() != 1) {
        i64 inv = inv_mod_i(a.c.back(), a.q);
        for (auto& x : a.c) x = mul_mod(x, inv, a.q);
    }
    return a;
}

inline FqPoly fq_powmod(FqPoly base, Int e, const FqPoly& m) {
    FqPoly r(base.q, {1});
    base = fq_mod(base, m);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = fq_mod(r * base, m);
        base = fq_mod(base * base, m);
        e >>= 1;
    }
    return r;
}

inline FqPoly fq_derivative(const FqPoly& a) {
    if (a.deg() <= 0) return FqPoly(a.q, {});
    std::vector<i64> r(a.deg());
    for (int i = 1; i <= a.deg(); ++i) r[i - 1] = mul_mod(a.c[i], i % a.q, a.q);
    return FqPoly(a.q, std::move(r));
}

// --- factorization over F_q -------------------------------------------------

namespace detail {

// c is a q-th power in F_q[x]: replace x^q by x (coefficient Frobenius is the
// identity on F_q)
inline FqPoly qth_root(const FqPoly& f) {
    std::vector<i64> r;
    for (int i = 0; i <= f.deg(); i += (int)f.q) r.push_back(f.coeff(i));
    return FqPoly(f.q, std::move(r));
}

inline void squarefree_decompose(const FqPoly& f, int mult, std::vector<std::pair<FqPoly, int>>& out) {
    FqPoly d = fq_derivative(f);
    if (d.is_zero()) {
        squarefree_decompose(qth_root(f), mult * (int)f.q, out);
        return;
    }
    FqPoly c = fq_gcd(f, d);
    FqPoly w = fq_divmod(f, c).first;
    int i = 1;
    while (w.deg() > 0) {
        FqPoly y = fq_gcd(w, c);
        FqPoly z = fq_divmod(w, y).first;
        if (z.deg() > 0) out.emplace_back(z, mult * i);
        ++i;
        w = y;
        c = fq_divmod(c, y).first;
    }
    if (c.deg() > 0) squarefree_decompose(qth_root(c), mult * (int)f.q, out);
}

// equal-degree splitting of a squarefree product of degree-d irreducibles
inline void edf(const FqPoly& f, int d, std::vector<FqPoly>& out, std::mt19937_64& rng) {
    if (f.deg() == d) {
        out.push_back(f);
        return;
    }
    const i64 q = f.q;
    FqPoly g(q, {});
    for (int attempt = 0;; ++attempt) {
        if (attempt > 4096) throw std::logic_error("edf: splitting failed to converge");
        std::vector<i64> rc(f.deg());
        for (auto& x : rc) x = (i64)(rng() % (uint64_t)q);
        FqPoly r(q, std::move(rc));
        if (r.is_zero()) continue;
        if (q == 2) {
            // trace map x + x^2 + ... + x^(2^(d-1))
            FqPoly t = r, acc = r;
            for (int i = 1; i < d; ++i) {
                t = fq_mod(t * t, f);
                acc = acc + t;
            }
            g = fq_gcd(acc, f);
        } else {
            Int e = (int_pow(Int(q), d) - 1) / 2;
            FqPoly s = fq_powmod(r, e, f);
            s = s - FqPoly(q, {1});
            g = fq_gcd(s, f);
        }
        if (g.deg() > 0 && g.deg() < f.deg()) break;
    }
    edf(g, d, out, rng);
    edf(fq_divmod(f, g).first, d, out, rng);
}

}  // namespace detail

// Full factorization of a nonzero polynomial over F_q into monic irreducibles
// with multiplicity, in a deterministic order (degree, then coefficient tuple).
inline std::vector<std::pair<FqPoly, int>> fq_factor(const FqPoly& fin) {
    if (fin.is_zero()) throw std::domain_error("fq_factor: zero polynomial");
    FqPoly f = fin;
    // make monic
    if (f.c.back() != 1) {
        i64 inv = inv_mod_i(f.c.back(), f.q);
        for (auto& x : f.c) x = mul_mod(x, inv, f.q);
    }
    std::vector<std::pair<FqPoly, int>> sqf;
    if (f.deg() > 0) detail::squarefree_decompose(f, 1, sqf);

    uint64_t seed = 0x9e3779b97f4a7c15ull ^ (uint64_t)f.q;
    for (i64 x : fin.c) seed = seed * 1099511628211ull + (uint64_t)x;
    std::mt19937_64 rng(seed);

    std::vector<std::pair<FqPoly, int>> out;
    for (auto& [part, mult] : sqf) {
        // distinct-degree on the squarefree part
        FqPoly rest = part;
        FqPoly h = fq_x(f.q);
        for (int d = 1; rest.deg() > 0 && d <= rest.deg() / 2; ++d) {
            h = fq_powmod(h, Int(f.q), rest);
            FqPoly g = fq_gcd(h - fq_x(f.q), rest);
            if (g.deg() > 0) {
                std::vector<FqPoly> irr;
                detail::edf(g, d, irr, rng);
                for (auto& p : irr) out.emplace_back(p, mult);
                rest = fq_divmod(rest, g).first;
                h = fq_mod(h, rest);
            }
        }
        if (rest.deg() > 0) out.emplace_back(rest, mult);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

// --- residue fields F_{q^f} --------------------------------------------------

struct ResidueField {
    i64 q = 2;
    int f = 1;
    FqPoly modulus;  // monic irreducible of degree f over F_q

    using Elem = std::vector<i64>;  // length f, coefficients of t^i

    Elem zero() const { return Elem(f, 0); }
    Elem one() const {
        Elem e(f, 0);
        e[0] = 1 % q;
        return e;
    }
    Elem from_int(i64 n) const {
        Elem e(f, 0);
        e[0] = mod_pos(n, q);
        return e;
    }
    Elem gen() const {
        Elem e(f, 0);
        if (f > 1) e[1] = 1;
        else e[0] = mod_pos(-modulus.coeff(0), q);  // degree-1 modulus: t = root
        return e;
    }
    bool is_zero(const Elem& a) const {
        for (i64 x : a)
            if (x) return false;
        return true;
    }
    Elem add(const Elem& a, const Elem& b) const {
        Elem r(f);
        for (int i = 0; i < f; ++i) r[i] = mod_pos(a[i] + b[i], q);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        Elem r(f);
        for (int i = 0; i < f; ++i) r[i] = mod_pos(a[i] - b[i], q);
        return r;
    }
    Elem neg(const Elem& a) const {
        Elem r(f);
        for (int i = 0; i < f; ++i) r[i] = mod_pos(-a[i], q);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        FqPoly pa(q, std::vector<i64>(a.begin(), a.end()));
        FqPoly pb(q, std::vector<i64>(b.begin(), b.end()));
        FqPoly pr = fq_mod(pa * pb, modulus);
        Elem r(f, 0);
        for (int i = 0; i <= pr.deg(); ++i) r[i] = pr.c[i];
        return r;
    }
    Elem scal(i64 s, const Elem& a) const {
        Elem r(f);
        s = mod_pos(s, q);
        for (int i = 0; i < f; ++i) r[i] = mul_mod(a[i], s, q);
        return r;
    }
    Elem inv(const Elem& a) const {
        if (is_zero(a)) throw std::domain_error("residue field: inverse of zero");
        FqPoly pa(q, std::vector<i64>(a.begin(), a.end()));
        // extended gcd in F_q[t]
        FqPoly r0 = modulus, r1 = pa;
        FqPoly t0(q, {}), t1(q, {1});
        while (!r1.is_zero()) {
            auto [qq, rr] = fq_divmod(r0, r1);
            FqPoly t = t0 - qq * t1;
            r0 = r1;
            r1 = rr;
            t0 = t1;
            t1 = t;
        }
        if (r0.deg() != 0) throw std::logic_error("residue field modulus not irreducible");
        i64 s = inv_mod_i(r0.c[0], q);
        Elem r(f, 0);
        for (int i = 0; i <= t0.deg(); ++i) r[i] = mul_mod(t0.c[i], s, q);
        return r;
    }
    Elem pow(Elem b, Int e) const {
        Elem r = one();
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }
    Int cardinality() const { return int_pow(Int(q), f); }
    // packs an element as an integer in [0, q^f): used for square tables
    size_t pack(const Elem& a) const {
        size_t idx = 0;
        for (int i = f - 1; i >= 0; --i) idx = idx * (size_t)q + (size_t)a[i];
        return idx;
    }
    Elem unpack(size_t idx) const {
        Elem a(f, 0);
        for (int i = 0; i < f; ++i) {
            a[i] = (i64)(idx % (size_t)q);
            idx /= (size_t)q;
        }
        return a;
    }
    bool is_square(const Elem& a) const {
        if (is_zero(a)) return true;
        if (q == 2) return true;
        Elem p = pow(a, (cardinality() - 1) / 2);
        return p == one();
    }
};

}  // namespace frey
