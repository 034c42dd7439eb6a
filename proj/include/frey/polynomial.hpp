// Dense univariate polynomials over the rationals: division, gcd, resultant.
#pragma once

#include <cassert>
#include <vector>

#include "intutil.hpp"

namespace frey {

struct QPoly {
    std::vector<Rat> c;  // c[i] is the coefficient of x^i; no trailing zeros

    QPoly() = default;
    explicit QPoly(std::vector<Rat> cc) : c(std::move(cc)) { normalize(); }
    static QPoly constant(const Rat& r) { return QPoly(std::vector<Rat>{r}); }
    static QPoly x() { return QPoly({Rat(0), Rat(1)}); }

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c.empty(); }
    const Rat& lead() const { return c.back(); }
    Rat coeff(int i) const { return (i >= 0 && i < (int)c.size()) ? c[i] : Rat(0); }

    bool operator==(const QPoly& o) const { return c == o.c; }
};

inline QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return QPoly(std::move(r));
}

inline QPoly operator-(const QPoly& a, const QPoly& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return QPoly(std::move(r));
}

inline QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<Rat> r(a.c.size() + b.c.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return QPoly(std::move(r));
}

inline QPoly operator*(const Rat& s, const QPoly& a) {
    std::vector<Rat> r = a.c;
    for (auto& x : r) x *= s;
    return QPoly(std::move(r));
}

// Quotient and remainder; b must be nonzero.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    assert(!b.is_zero());
    QPoly r = a;
    std::vector<Rat> q(a.degree() >= b.degree() ? a.degree() - b.degree() + 1 : 0, Rat(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        Rat f = r.lead() / b.lead();
        int k = r.degree() - b.degree();
        q[k] = f;
        for (int i = 0; i <= b.degree(); ++i) r.c[i + k] -= f * b.c[i];
        r.normalize();
    }
    return {QPoly(std::move(q)), r};
}

inline QPoly pmod(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }

inline Rat eval(const QPoly& p, const Rat& x) {
    Rat r(0);
    for (int i = p.degree(); i >= 0; --i) r = r * x + p.c[i];
    return r;
}

inline QPoly derivative(const QPoly& p) {
    if (p.degree() <= 0) return QPoly();
    std::vector<Rat> r(p.degree());
    for (int i = 1; i <= p.degree(); ++i) r[i - 1] = Rat(i) * p.c[i];
    return QPoly(std::move(r));
}

// Monic gcd.
inline QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = pmod(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero() && a.lead() != 1) a = (Rat(1) / a.lead()) * a;
    return a;
}

// Extended gcd: returns (g, u, v) with u*a + v*b = g, g monic (or zero).
inline std::tuple<QPoly, QPoly, QPoly> poly_xgcd(const QPoly& a, const QPoly& b) {
    QPoly r0 = a, r1 = b;
    QPoly s0 = QPoly::constant(1), s1;
    QPoly t0, t1 = QPoly::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        QPoly s = s0 - q * s1, t = t0 - q * t1;
        r0 = r1; r1 = r;
        s0 = s1; s1 = s;
        t0 = t1; t1 = t;
    }
    if (!r0.is_zero() && r0.lead() != 1) {
        Rat inv = Rat(1) / r0.lead();
        r0 = inv * r0; s0 = inv * s0; t0 = inv * t0;
    }
    return {r0, s0, t0};
}

// Resultant Res(f, g). With f monic this equals the product of g over the
// roots of f, which is the norm form used for number fields.
inline Rat resultant(QPoly f, QPoly g) {
    Rat acc(1);
    bool neg = false;
    while (true) {
        if (g.is_zero()) return Rat(0);
        if (g.degree() == 0) {
            Rat gn = g.c[0];
            Rat p(1);
            for (int i = 0; i < f.degree(); ++i) p *= gn;
            return (neg ? Rat(-1) : Rat(1)) * acc * p;
        }
        QPoly r = pmod(f, g);
        if (r.is_zero()) return Rat(0);
        // Res(f,g) = (-1)^{deg f * deg g} lc(g)^{deg f - deg r} Res(g, r)
        if ((f.degree() & 1) && (g.degree() & 1)) neg = !neg;
        Rat lcpow(1);
        for (int i = 0; i < f.degree() - r.degree(); ++i) lcpow *= g.lead();
        acc *= lcpow;
        f = g;
        g = r;
    }
}

}  // namespace frey
