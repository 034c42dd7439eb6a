// Exact arithmetic in a fixed set of number fields: Q, Q(sqrt5), Q(sqrt13),
// the cubic subfield K of Q(zeta13), and Q(zeta13) itself. Elements are dense
// rational coordinate vectors in the power basis of the defining polynomial.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "fq.hpp"
#include "polynomial.hpp"

namespace frey {

enum class FieldId { Q, Qsqrt5, Qsqrt13, CubicK, Zeta13 };

struct FieldMismatch : std::runtime_error {
    FieldMismatch() : std::runtime_error("operands live in different fields") {}
};
struct DivisionByZero : std::runtime_error {
    DivisionByZero() : std::runtime_error("division by zero field element") {}
};
struct UnsupportedField : std::runtime_error {
    explicit UnsupportedField(const char* what) : std::runtime_error(what) {}
};
struct NotInSubfield : std::runtime_error {
    NotInSubfield() : std::runtime_error("element has no exact representation in the target subfield") {}
};

struct FieldSpec {
    FieldId id;
    const char* name;
    QPoly defining;  // monic, irreducible over Q
    int degree;
};

namespace detail {

inline QPoly make_poly(std::vector<long> coeffs) {
    std::vector<Rat> c(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) c[i] = Rat(coeffs[i]);
    return QPoly(std::move(c));
}

// Certification at registry build: no rational roots, and irreducible modulo
// some small witness prime (which implies irreducibility over Q).
void certify_irreducible(const QPoly& f);

}  // namespace detail

inline const FieldSpec& field_spec(FieldId id) {
    static const std::array<FieldSpec, 5> table = [] {
        std::array<FieldSpec, 5> t{{
            {FieldId::Q, "Q", detail::make_poly({0, 1}), 1},
            {FieldId::Qsqrt5, "Qsqrt5", detail::make_poly({-1, -1, 1}), 2},
            {FieldId::Qsqrt13, "Qsqrt13", detail::make_poly({-13, 0, 1}), 2},
            {FieldId::CubicK, "CubicK", detail::make_poly({1, -4, 1, 1}), 3},
            {FieldId::Zeta13, "Zeta13",
             detail::make_poly({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}), 12},
        }};
        for (size_t i = 1; i < t.size(); ++i) detail::certify_irreducible(t[i].defining);
        return t;
    }();
    return table[static_cast<size_t>(id)];
}

namespace detail {

inline void certify_irreducible(const QPoly& f) {
    int d = f.degree();
    if (d < 1 || f.lead() != 1) throw std::logic_error("defining polynomial must be monic");
    // rational roots would divide the constant term
    Int c0 = f.coeff(0).get_num();
    if (c0 == 0) throw std::logic_error("defining polynomial has the root 0");
    Int bound = c0 < 0 ? -c0 : c0;
    for (Int r = 1; r <= bound; ++r) {
        if (!mpz_divisible_p(bound.get_mpz_t(), r.get_mpz_t())) continue;
        if (eval(f, Rat(r)) == 0 || eval(f, Rat(-r)) == 0)
            throw std::logic_error("defining polynomial has a rational root");
    }
    if (d <= 3) return;  // no root and degree <= 3: irreducible
    for (i64 q : {2, 3, 5, 7, 11, 17, 19, 23}) {
        std::vector<i64> c(d + 1);
        for (int i = 0; i <= d; ++i)
            c[i] = (i64)mpz_fdiv_ui(f.coeff(i).get_num().get_mpz_t(), (unsigned long)q);
        FqPoly fq(q, std::move(c));
        if (fq.deg() != d) continue;
        auto fac = fq_factor(fq);
        if (fac.size() == 1 && fac[0].second == 1 && fac[0].first.deg() == d) return;
    }
    throw std::logic_error("no irreducibility witness prime found");
}

}  // namespace detail

struct NFElem {
    FieldId fid = FieldId::Q;
    std::vector<Rat> c;  // length = field degree, fully reduced (mpq canonical)

    NFElem() : c(1, Rat(0)) {}
    NFElem(FieldId f, std::vector<Rat> cc) : fid(f), c(std::move(cc)) {
        c.resize(field_spec(f).degree, Rat(0));
        for (auto& x : c) x.canonicalize();
    }

    static NFElem from_rat(FieldId f, const Rat& r) {
        std::vector<Rat> cc(field_spec(f).degree, Rat(0));
        cc[0] = r;
        return NFElem(f, std::move(cc));
    }
    static NFElem zero(FieldId f) { return from_rat(f, Rat(0)); }
    static NFElem one(FieldId f) { return from_rat(f, Rat(1)); }
    // The class of x, i.e. the distinguished generator.
    static NFElem gen(FieldId f) {
        if (field_spec(f).degree == 1) return from_rat(f, Rat(0));
        std::vector<Rat> cc(field_spec(f).degree, Rat(0));
        cc[1] = 1;
        return NFElem(f, std::move(cc));
    }

    bool is_zero() const {
        for (const auto& x : c)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i] != 0) return false;
        return true;
    }
    Rat rational_value() const {
        if (!is_rational()) throw std::domain_error("element is not rational");
        return c[0];
    }
    bool operator==(const NFElem& o) const { return fid == o.fid && c == o.c; }
    bool operator!=(const NFElem& o) const { return !(*this == o); }

    QPoly to_poly() const { return QPoly(c); }
};

inline void check_same(const NFElem& a, const NFElem& b) {
    if (a.fid != b.fid) throw FieldMismatch();
}

inline NFElem operator+(const NFElem& a, const NFElem& b) {
    check_same(a, b);
    NFElem r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

inline NFElem operator-(const NFElem& a, const NFElem& b) {
    check_same(a, b);
    NFElem r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
    return r;
}

inline NFElem operator-(const NFElem& a) {
    NFElem r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

inline NFElem operator*(const NFElem& a, const NFElem& b) {
    check_same(a, b);
    const FieldSpec& spec = field_spec(a.fid);
    QPoly p = pmod(a.to_poly() * b.to_poly(), spec.defining);
    std::vector<Rat> cc(spec.degree, Rat(0));
    for (int i = 0; i <= p.degree(); ++i) cc[i] = p.c[i];
    return NFElem(a.fid, std::move(cc));
}

inline NFElem operator*(const Rat& s, const NFElem& a) {
    NFElem r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

inline NFElem inverse(const NFElem& a) {
    if (a.is_zero()) throw DivisionByZero();
    const FieldSpec& spec = field_spec(a.fid);
    auto [g, u, v] = poly_xgcd(a.to_poly(), spec.defining);
    if (g.degree() != 0) throw std::logic_error("defining polynomial not irreducible");
    QPoly inv = pmod(u, spec.defining);
    std::vector<Rat> cc(spec.degree, Rat(0));
    for (int i = 0; i <= inv.degree(); ++i) cc[i] = inv.c[i];
    return NFElem(a.fid, std::move(cc));
}

inline NFElem operator/(const NFElem& a, const NFElem& b) { return a * inverse(b); }

inline NFElem nf_pow(const NFElem& a, long e) {
    if (e < 0) return nf_pow(inverse(a), -e);
    NFElem r = NFElem::one(a.fid), base = a;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

// Field norm N_{F/Q}; normalized so that N(r) = r^degree for rational r.
inline Rat nf_norm(const NFElem& a) {
    const FieldSpec& spec = field_spec(a.fid);
    if (spec.degree == 1) return a.c[0];
    return resultant(spec.defining, a.to_poly());
}

// Trace of the multiplication-by-a matrix in the power basis.
inline Rat nf_trace(const NFElem& a) {
    const FieldSpec& spec = field_spec(a.fid);
    if (spec.degree == 1) return a.c[0];
    Rat t(0);
    NFElem xi = NFElem::one(a.fid);
    for (int i = 0; i < spec.degree; ++i) {
        NFElem col = a * xi;
        t += col.c[i];
        xi = xi * NFElem::gen(a.fid);
    }
    return t;
}

// Nontrivial automorphism of a quadratic field.
inline NFElem nf_conjugate(const NFElem& a) {
    const FieldSpec& spec = field_spec(a.fid);
    if (spec.degree == 1) return a;
    if (spec.degree != 2) throw UnsupportedField("conjugation is only defined for quadratic fields here");
    // theta satisfies x^2 + px + q; conjugate of theta is -p - theta
    Rat p = spec.defining.coeff(1);
    return NFElem(a.fid, {a.c[0] - a.c[1] * p, -a.c[1]});
}

// ---------------------------------------------------------------------------
// Embeddings into Q(zeta13) and exact descent back to subfields.

struct EmbeddingRegistry {
    // generator image of each subfield inside Zeta13
    std::map<FieldId, NFElem> gen_image;

    static const EmbeddingRegistry& instance();
};

inline NFElem zeta_power(long k) {
    // zeta13^k reduced into the power basis
    k %= 13;
    if (k < 0) k += 13;
    return nf_pow(NFElem::gen(FieldId::Zeta13), k);
}

inline const EmbeddingRegistry& EmbeddingRegistry::instance() {
    static const EmbeddingRegistry reg = [] {
        EmbeddingRegistry r;
        // w = sum over quadratic residues k mod 13 of zeta^k minus the rest;
        // the quadratic Gauss sum, which squares to 13.
        NFElem w = NFElem::zero(FieldId::Zeta13);
        for (long k = 1; k < 13; ++k) {
            bool qr = false;
            for (long t = 1; t < 13; ++t)
                if ((t * t) % 13 == k) { qr = true; break; }
            w = qr ? w + zeta_power(k) : w - zeta_power(k);
        }
        // z = zeta + zeta^5 + zeta^8 + zeta^12: the Gaussian period for the
        // order-4 subgroup <5> of (Z/13)^*, generating the cubic subfield.
        NFElem z = zeta_power(1) + zeta_power(5) + zeta_power(8) + zeta_power(12);

        if (w * w != NFElem::from_rat(FieldId::Zeta13, 13))
            throw std::logic_error("embedding registry: w^2 != 13");
        NFElem zchk = nf_pow(z, 3) + z * z - Rat(4) * z + NFElem::one(FieldId::Zeta13);
        if (!zchk.is_zero())
            throw std::logic_error("embedding registry: z does not satisfy its cubic");

        r.gen_image[FieldId::Qsqrt13] = w;
        r.gen_image[FieldId::CubicK] = z;
        return r;
    }();
    return reg;
}

inline NFElem nf_embed(const NFElem& x, FieldId super) {
    if (x.fid == super) return x;
    if (x.fid == FieldId::Q) return NFElem::from_rat(super, x.c[0]);
    if (super != FieldId::Zeta13) throw UnsupportedField("only embeddings into Zeta13 are registered");
    const auto& reg = EmbeddingRegistry::instance();
    auto it = reg.gen_image.find(x.fid);
    if (it == reg.gen_image.end()) throw UnsupportedField("no registered embedding for this field");
    const NFElem& g = it->second;
    NFElem acc = NFElem::zero(FieldId::Zeta13);
    for (int i = (int)x.c.size() - 1; i >= 0; --i)
        acc = acc * g + NFElem::from_rat(FieldId::Zeta13, x.c[i]);
    return acc;
}

// Solve for x as a Q-linear combination of powers of the embedded generator.
inline NFElem nf_descend(const NFElem& x, FieldId target) {
    if (x.fid != FieldId::Zeta13) throw UnsupportedField("descent source must be Zeta13");
    if (target == FieldId::Zeta13) return x;
    if (target == FieldId::Q) {
        if (!x.is_rational()) throw NotInSubfield();
        return NFElem::from_rat(FieldId::Q, x.c[0]);
    }
    if (target == FieldId::Qsqrt5) throw UnsupportedField("Qsqrt5 is not a subfield of Zeta13");
    const auto& reg = EmbeddingRegistry::instance();
    const NFElem& g = reg.gen_image.at(target);
    int d = field_spec(target).degree;

    // columns: power-basis coordinates of g^j, augmented with x
    std::vector<std::vector<Rat>> m(12, std::vector<Rat>(d + 1, Rat(0)));
    NFElem gp = NFElem::one(FieldId::Zeta13);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < 12; ++i) m[i][j] = gp.c[i];
        gp = gp * g;
    }
    for (int i = 0; i < 12; ++i) m[i][d] = x.c[i];

    // Gaussian elimination
    int row = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < d && row < 12; ++col) {
        int pr = -1;
        for (int i = row; i < 12; ++i)
            if (m[i][col] != 0) { pr = i; break; }
        if (pr < 0) continue;
        std::swap(m[row], m[pr]);
        Rat inv = Rat(1) / m[row][col];
        for (int j = col; j <= d; ++j) m[row][j] *= inv;
        for (int i = 0; i < 12; ++i) {
            if (i == row || m[i][col] == 0) continue;
            Rat f = m[i][col];
            for (int j = col; j <= d; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    // consistency: all rows below the pivots must be zero in the augmented column
    for (int i = row; i < 12; ++i)
        if (m[i][d] != 0) throw NotInSubfield();
    if ((int)pivot_col.size() != d) throw std::logic_error("descent basis is degenerate");

    std::vector<Rat> sol(d, Rat(0));
    for (int i = 0; i < d; ++i) sol[pivot_col[i]] = m[i][d];
    return NFElem(target, std::move(sol));
}

namespace detail {

inline void registry_self_check() {
    // defining polynomials irreducible over Q: witness prime with irreducible
    // reduction, checked in fq.hpp's factorizer at first use; here assert the
    // embedding identities once more so a bad registry fails fast.
    EmbeddingRegistry::instance();
}

}  // namespace detail

}  // namespace frey
