// Weierstrass models over the registered fields: invariants, twists, point
// counts over residue fields, Tate's algorithm over Q, reduction
// classification over extensions, and inertia-order comparison.
#pragma once

#include <optional>
#include <set>

#include "localfield.hpp"

namespace frey {

struct SingularModel : std::runtime_error {
    SingularModel() : std::runtime_error("discriminant vanishes") {}
};
struct BadReduction : std::runtime_error {
    BadReduction() : std::runtime_error("model has bad reduction at this slot") {}
};
struct InconsistentValuations : std::runtime_error {
    InconsistentValuations() : std::runtime_error("valuations violate c4^3 - c6^2 = 1728*disc") {}
};

struct Model {
    FieldId fid = FieldId::Q;
    NFElem a1, a2, a3, a4, a6;

    static Model make(FieldId f, NFElem A1, NFElem A2, NFElem A3, NFElem A4, NFElem A6) {
        return Model{f, std::move(A1), std::move(A2), std::move(A3), std::move(A4), std::move(A6)};
    }
    static Model from_rat(FieldId f, const Rat& A1, const Rat& A2, const Rat& A3, const Rat& A4,
                          const Rat& A6) {
        return Model{f, NFElem::from_rat(f, A1), NFElem::from_rat(f, A2), NFElem::from_rat(f, A3),
                     NFElem::from_rat(f, A4), NFElem::from_rat(f, A6)};
    }
};

struct InvariantSet {
    NFElem b2, b4, b6, b8, c4, c6, disc, j;
};

inline InvariantSet invariants(const Model& m) {
    const Rat two(2), four(4);
    InvariantSet s;
    s.b2 = m.a1 * m.a1 + four * m.a2;
    s.b4 = two * m.a4 + m.a1 * m.a3;
    s.b6 = m.a3 * m.a3 + four * m.a6;
    s.b8 = m.a1 * m.a1 * m.a6 + four * m.a2 * m.a6 - m.a1 * m.a3 * m.a4 + m.a2 * m.a3 * m.a3 -
           m.a4 * m.a4;
    s.c4 = s.b2 * s.b2 - Rat(24) * s.b4;
    s.c6 = -(s.b2 * s.b2 * s.b2) + Rat(36) * s.b2 * s.b4 - Rat(216) * s.b6;
    s.disc = -(s.b2 * s.b2) * s.b8 - Rat(8) * (s.b4 * s.b4 * s.b4) - Rat(27) * (s.b6 * s.b6) +
             Rat(9) * s.b2 * s.b4 * s.b6;
    if (s.disc.is_zero()) throw SingularModel();
    NFElem lhs = s.c4 * s.c4 * s.c4 - s.c6 * s.c6;
    if (lhs != Rat(1728) * s.disc) throw std::logic_error("invariant identity c4^3-c6^2=1728D failed");
    if (s.b2 * s.b2 - Rat(24) * s.b4 != s.c4) throw std::logic_error("b-invariant identity failed");
    s.j = (s.c4 * s.c4 * s.c4) / s.disc;
    return s;
}

// Twist by a squarefree integer D: short-form completion, then the standard
// (D^2, D^3) scaling of (c4, c6).
inline Model quadratic_twist(const Model& m, const Rat& D) {
    InvariantSet s = invariants(m);
    NFElem d = NFElem::from_rat(m.fid, D);
    NFElem a4 = Rat(-27) * (d * d * s.c4);
    NFElem a6 = Rat(-54) * (d * d * d * s.c6);
    return Model{m.fid, NFElem::zero(m.fid), NFElem::zero(m.fid), NFElem::zero(m.fid), a4, a6};
}

struct TraceRecord {
    PrimeSlot slot;
    long a = 0;   // trace of Frobenius
    Int norm;     // #residue field = q^f
};

// Square tables per residue field, cached; counting enumerates x and reads the
// quadratic character of 4x^3+b2x^2+2b4x+b6.
namespace elldetail {

struct CountCtx {
    ResidueField rf;
    std::vector<int8_t> chi;  // chi[pack(u)] in {-1,0,1}
};

inline const CountCtx& count_ctx(const PrimeSlot& slot) {
    static std::map<PrimeSlot, CountCtx> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(slot);
    if (it == cache.end()) {
        CountCtx ctx;
        ctx.rf = residue_field(slot);
        if (ctx.rf.cardinality() > (1 << 22))
            throw UnsupportedPrime("residue field too large for naive counting");
        size_t n = (size_t)ctx.rf.cardinality().get_ui();
        ctx.chi.assign(n, -1);
        ctx.chi[0] = 0;
        for (size_t i = 0; i < n; ++i) {
            auto e = ctx.rf.unpack(i);
            auto sq = ctx.rf.mul(e, e);
            ctx.chi[ctx.rf.pack(sq)] = 1;
        }
        ctx.chi[0] = 0;
        it = cache.emplace(slot, std::move(ctx)).first;
    }
    return it->second;
}

}  // namespace elldetail

inline TraceRecord point_count(const Model& m, const PrimeSlot& slot) {
    if (slot.q == 2) throw UnsupportedPrime("naive counting requires odd residue characteristic");
    InvariantSet s = invariants(m);
    const auto& ctx = elldetail::count_ctx(slot);
    const ResidueField& rf = ctx.rf;

    auto rb2 = reduce_element(s.b2, slot);
    auto rb4 = reduce_element(s.b4, slot);
    auto rb6 = reduce_element(s.b6, slot);
    auto rdisc = reduce_element(s.disc, slot);
    if (rf.is_zero(rdisc)) throw BadReduction();

    // inner loop on raw arrays: evaluate g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6
    const int f = rf.f;
    const i64 q = rf.q;
    // reduction rows: t^k mod modulus for k = f .. 2f-2
    i64 red[5][3] = {};
    {
        std::vector<i64> cur(rf.modulus.c.begin(), rf.modulus.c.end() - 1);
        for (auto& c : cur) c = mod_pos(-c, q);  // t^f = -(m0 + m1 t + ...)
        for (int k = 0; k < f - 1 || k == 0; ++k) {
            if (k > 0) {
                // multiply by t and reduce once
                std::vector<i64> nxt(f, 0);
                i64 top = cur[f - 1];
                for (int i = f - 1; i >= 1; --i) nxt[i] = cur[i - 1];
                nxt[0] = 0;
                if (top) {
                    for (int i = 0; i < f; ++i)
                        nxt[i] = (i64)((nxt[i] + (__int128)top * red[0][i]) % q);
                }
                cur = nxt;
            }
            for (int i = 0; i < f; ++i) red[k][i] = cur[i];
        }
    }
    auto mulf = [&](const i64* a, const i64* b, i64* out) {
        i64 full[5] = {};
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j) full[i + j] = (i64)((full[i + j] + (__int128)a[i] * b[j]) % q);
        for (int i = 0; i < f; ++i) out[i] = full[i];
        for (int k = f; k <= 2 * f - 2; ++k) {
            if (!full[k]) continue;
            const i64* row = red[k - f];
            for (int i = 0; i < f; ++i)
                out[i] = (i64)((out[i] + (__int128)full[k] * row[i]) % q);
        }
    };
    i64 B2[3] = {}, B4[3] = {}, B6[3] = {};
    for (int i = 0; i < f; ++i) {
        B2[i] = rb2[i];
        B4[i] = mod_pos(2 * rb4[i], q);
        B6[i] = rb6[i];
    }
    size_t n = (size_t)rf.cardinality().get_ui();
    long sum = 0;
    std::vector<i64> xd(f, 0);
    for (size_t i = 0; i < n; ++i) {
        // xd enumerates all tuples
        i64 x2[3], x3[3], t1[3], g[3];
        const i64* x = xd.data();
        mulf(x, x, x2);
        mulf(x2, x, x3);
        mulf(B2, x2, t1);
        for (int j = 0; j < f; ++j) g[j] = (4 * x3[j] + t1[j]) % q;
        mulf(B4, x, t1);
        for (int j = 0; j < f; ++j) g[j] = (g[j] + t1[j] + B6[j]) % q;
        size_t idx = 0;
        for (int j = f - 1; j >= 0; --j) idx = idx * (size_t)q + (size_t)g[j];
        sum += ctx.chi[idx];
        // increment the tuple
        for (int j = 0; j < f; ++j) {
            if (++xd[j] < q) break;
            xd[j] = 0;
        }
    }
    TraceRecord t;
    t.slot = slot;
    t.a = -sum;
    t.norm = rf.cardinality();
    if (Int(t.a) * Int(t.a) > 4 * t.norm) throw std::logic_error("Hasse bound violated");
    return t;
}

// Scale a model until it is minimal at every slot above an odd prime q.
// Solving for (b2, b4, b6) from the scaled invariants keeps the result
// integral above q, which a direct coordinate scaling does not guarantee.
inline Model minimalize_at_odd_q(Model m, i64 q) {
    if (q == 2) throw UnsupportedPrime("odd residue characteristic required");
    auto slots = prime_split(m.fid, q);
    while (true) {
        InvariantSet inv = invariants(m);
        bool all_high = true;
        for (const auto& s : slots) {
            ResidueField rf = residue_field(s);
            if (!rf.is_zero(reduce_element(inv.disc, s))) { all_high = false; break; }
            bool c4_high = inv.c4.is_zero() || padic_valuation(inv.c4, s) >= 4;
            if (padic_valuation(inv.disc, s) < 12 || !c4_high) {
                all_high = false;
                break;
            }
        }
        if (!all_high) return m;
        Rat uq(1, q);
        Rat u4 = uq * uq * uq * uq, u6 = u4 * uq * uq, u12 = u6 * u6;
        NFElem c4s = u4 * inv.c4, c6s = u6 * inv.c6, ds = u12 * inv.disc;
        NFElem b2, b4, b6;
        if (!c4s.is_zero()) {
            b2 = -(c6s / c4s);
            b4 = Rat(-72) * (ds / (c4s * c4s));
            b6 = Rat(4) * ((c6s * ds) / (c4s * c4s * c4s));
        } else {
            b2 = NFElem::zero(m.fid);
            b4 = NFElem::zero(m.fid);
            b6 = Rat(-1, 216) * c6s;
        }
        auto zero = NFElem::zero(m.fid);
        m = Model{m.fid, zero, Rat(1, 4) * b2, zero, Rat(1, 2) * b4, Rat(1, 4) * b6};
        InvariantSet chk = invariants(m);
        if (chk.c4 != c4s || chk.c6 != c6s || chk.disc != ds)
            throw std::logic_error("minimalize_at_odd_q: invariant reconstruction failed");
    }
}

// --- rational two-torsion ----------------------------------------------------

// Rational 2-torsion point exists iff X^3 + b2 X^2 + 8 b4 X + 16 b6 has an
// integer root (X = 4x for the 2-division cubic of an integral model).
inline bool has_rational_two_torsion(const Model& m) {
    if (m.fid != FieldId::Q) throw UnsupportedField("2-torsion test implemented over Q only");
    InvariantSet s = invariants(m);
    Int b2 = s.b2.rational_value().get_num();
    Int b4 = s.b4.rational_value().get_num();
    Int b6 = s.b6.rational_value().get_num();
    if (s.b2.rational_value().get_den() != 1 || s.b4.rational_value().get_den() != 1 ||
        s.b6.rational_value().get_den() != 1)
        throw std::domain_error("integral model required");
    auto evalc = [&](const Int& X) -> Int { return ((X + b2) * X + 8 * b4) * X + 16 * b6; };
    if (b6 == 0) return true;
    Int target = 16 * b6;
    if (target < 0) target = -target;
    // integer roots divide 16*b6
    std::vector<Int> divs{1};
    for (auto& [p, e] : factor(target)) {
        size_t base = divs.size();
        Int pk(1);
        for (int i = 0; i < e; ++i) {
            pk *= p;
            for (size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pk);
        }
    }
    for (const Int& d : divs)
        if (evalc(d) == 0 || evalc(-d) == 0) return true;
    return false;
}

// --- Tate's algorithm over Q --------------------------------------------------

struct Kodaira {
    enum Family { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar } fam = I0;
    long nu = 0;  // for In / Instar

    std::string str() const {
        switch (fam) {
            case I0: return "I0";
            case In: return "I" + std::to_string(nu);
            case II: return "II";
            case III: return "III";
            case IV: return "IV";
            case I0star: return "I0*";
            case Instar: return "I" + std::to_string(nu) + "*";
            case IVstar: return "IV*";
            case IIIstar: return "III*";
            case IIstar: return "II*";
        }
        return "?";
    }
};

enum class RedKind { good, multiplicative, additive };

struct LocalReduction {
    RedKind kind = RedKind::good;
    Kodaira kodaira;
    int cond_exp = 0;
    long vdelta_min = 0;
    bool split = false;     // multiplicative only
    int u_valuation = 0;    // valuation of the scaling that minimalized the model
};

namespace elldetail {

struct ZModel {
    Int a1, a2, a3, a4, a6;

    void bvals(Int& b2, Int& b4, Int& b6, Int& b8) const {
        b2 = a1 * a1 + 4 * a2;
        b4 = 2 * a4 + a1 * a3;
        b6 = a3 * a3 + 4 * a6;
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    }
    Int c4() const {
        Int b2, b4, b6, b8;
        bvals(b2, b4, b6, b8);
        return b2 * b2 - 24 * b4;
    }
    Int c6() const {
        Int b2, b4, b6, b8;
        bvals(b2, b4, b6, b8);
        return -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    }
    Int disc() const {
        Int b2, b4, b6, b8;
        bvals(b2, b4, b6, b8);
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    }
    // (r, s, t) translation, u = 1
    void translate(const Int& r, const Int& s, const Int& t) {
        Int A1 = a1 + 2 * s;
        Int A2 = a2 - s * a1 + 3 * r - s * s;
        Int A3 = a3 + r * a1 + 2 * t;
        Int A4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        Int A6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        a1 = A1; a2 = A2; a3 = A3; a4 = A4; a6 = A6;
    }
};

inline long vp(const Int& x, const Int& p) { return x == 0 ? LONG_MAX : val_q(x, p); }

inline Int exact_div(const Int& x, const Int& d) {
    if (!mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t()))
        throw std::logic_error("tate: expected exact division");
    return x / d;
}

inline bool split_test(const Int& c6, const Int& p) {
    Int mc6 = -c6;
    if (p == 2) return mod_floor(mc6, Int(8)) == 1;
    return legendre(mc6, p) == 1;
}

// Full step algorithm; valid for any p, used in production for p = 2, 3
// (root searches iterate over F_p, so p must stay small).
inline LocalReduction tate_steps(ZModel E, const Int& p) {
    if (p > 1000) throw std::domain_error("tate_steps: prime too large for residue enumeration");
    const long pl = (long)p.get_si();
    LocalReduction out;
    int uval = 0;

    auto inv2 = (p == 2) ? Int(0) : inv_mod(Int(2), p);

    while (true) {
        Int b2, b4, b6, b8;
        E.bvals(b2, b4, b6, b8);
        Int disc = E.disc(), c4 = E.c4(), c6 = E.c6();
        long n = vp(disc, p);
        if (n == LONG_MAX) throw SingularModel();
        if (n == 0) {
            out.kind = RedKind::good;
            out.kodaira = {Kodaira::I0, 0};
            out.cond_exp = 0;
            out.vdelta_min = 0;
            out.u_valuation = uval;
            return out;
        }
        if (vp(c4, p) == 0) {
            out.kind = RedKind::multiplicative;
            out.kodaira = {Kodaira::In, n};
            out.cond_exp = 1;
            out.vdelta_min = n;
            out.split = split_test(c6, p);
            out.u_valuation = uval;
            return out;
        }

        // additive: move the singular point of the reduction to the origin
        {
            bool found = false;
            for (long x0 = 0; x0 < pl && !found; ++x0)
                for (long y0 = 0; y0 < pl && !found; ++y0) {
                    Int X(x0), Y(y0);
                    Int F = Y * Y + E.a1 * X * Y + E.a3 * Y - (X * X * X + E.a2 * X * X + E.a4 * X + E.a6);
                    Int Fx = E.a1 * Y - (3 * X * X + 2 * E.a2 * X + E.a4);
                    Int Fy = 2 * Y + E.a1 * X + E.a3;
                    if (mod_floor(F, p) == 0 && mod_floor(Fx, p) == 0 && mod_floor(Fy, p) == 0) {
                        E.translate(X, 0, Y);
                        found = true;
                    }
                }
            if (!found) throw std::logic_error("tate: singular point not found");
        }
        if (vp(E.a3, p) < 1 || vp(E.a4, p) < 1 || vp(E.a6, p) < 1)
            throw std::logic_error("tate: origin translation failed");

        E.bvals(b2, b4, b6, b8);
        if (vp(E.a6, p) < 2) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::II, 0};
            out.cond_exp = (int)n;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }
        if (vp(b8, p) < 3) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::III, 0};
            out.cond_exp = (int)n - 1;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }
        if (vp(b6, p) < 3) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::IV, 0};
            out.cond_exp = (int)n - 2;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }

        // normalize to v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3
        if (p == 2) {
            if (vp(E.a1, p) < 1) throw std::logic_error("tate: a1 odd in additive case");
            E.translate(0, mod_floor(E.a2, p), 0);
        } else {
            E.translate(0, mod_floor(-E.a1 * inv2, p), 0);
        }
        if (vp(E.a2, p) < 1) throw std::logic_error("tate: a2 normalization failed");
        if (p == 2) {
            if (vp(E.a3, p) < 2) throw std::logic_error("tate: a3 should be divisible by 4 here");
            Int a6q = exact_div(E.a6, Int(4));
            E.translate(0, 0, 2 * mod_floor(a6q, p));
        } else {
            Int a3q = exact_div(E.a3, p);
            E.translate(0, 0, p * mod_floor(-a3q * inv2, p));
        }
        if (vp(E.a1, p) < 1 || vp(E.a2, p) < 1 || vp(E.a3, p) < 2 || vp(E.a4, p) < 2 ||
            vp(E.a6, p) < 3)
            throw std::logic_error("tate: step-7 normalization failed");

        // P(T) = T^3 + (a2/p) T^2 + (a4/p^2) T + (a6/p^3) over F_p
        Int p2 = p * p, p3 = p2 * p;
        Int pc2 = exact_div(E.a2, p), pc1 = exact_div(E.a4, p2), pc0 = exact_div(E.a6, p3);
        // root multiplicities over F_p via repeated synthetic division
        std::vector<long> roots;
        std::vector<int> mults;
        {
            std::vector<Int> poly{pc0, pc1, pc2, Int(1)};
            for (long t = 0; t < pl; ++t) {
                int mult = 0;
                std::vector<Int> cur = poly;
                while (true) {
                    // synthetic division by (T - t)
                    Int rem(0);
                    std::vector<Int> quot(cur.size() - 1);
                    for (int i = (int)cur.size() - 1; i >= 1; --i) {
                        quot[i - 1] = mod_floor(rem * t + cur[i], p);
                        rem = quot[i - 1];
                    }
                    Int r0 = mod_floor(rem * t + cur[0], p);
                    if (r0 != 0) break;
                    ++mult;
                    cur = quot;
                    if (cur.size() == 1) break;
                }
                if (mult > 0) {
                    roots.push_back(t);
                    mults.push_back(mult);
                }
            }
        }
        int maxmult = 0;
        long where = 0;
        for (size_t i = 0; i < roots.size(); ++i)
            if (mults[i] > maxmult) {
                maxmult = mults[i];
                where = roots[i];
            }
        // a repeated root over an extension is impossible for a cubic unless it
        // is rational; separability check via gcd with the derivative
        bool separable;
        {
            FqPoly P(pl, {mod_floor(pc0, p).get_si(), mod_floor(pc1, p).get_si(),
                          mod_floor(pc2, p).get_si(), 1});
            separable = fq_gcd(P, fq_derivative(P)).deg() == 0;
        }

        if (separable) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::I0star, 0};
            out.cond_exp = (int)n - 4;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }

        if (maxmult == 2) {
            // type In*, n >= 1
            E.translate(p * Int(where), 0, 0);
            if (vp(E.a2, p) != 1 || vp(E.a4, p) < 3 || vp(E.a6, p) < 4)
                throw std::logic_error("tate: In* entry conditions failed");
            long ix = 3, iy = 3;
            Int mx = p * p, my = p * p;
            while (true) {
                // Y^2 + (a3/my) Y - a6/(mx*my)
                Int a3t = exact_div(E.a3, my);
                Int a6t = exact_div(E.a6, mx * my);
                if (vp(a3t * a3t + 4 * a6t, p) == 0) break;
                Int ry = (p == 2) ? mod_floor(a6t, p) : mod_floor(-a3t * inv2, p);
                E.translate(0, 0, my * ry);
                ++iy;
                my *= p;
                // (a2/p) X^2 + (a4/(p*mx)) X + a6/(mx*my)
                Int a2t = exact_div(E.a2, p);
                Int a4t = exact_div(E.a4, p * mx);
                Int a6s = exact_div(E.a6, mx * my);
                if (vp(a4t * a4t - 4 * a2t * a6s, p) == 0) break;
                Int rx;
                if (p == 2)
                    rx = mod_floor(a6s * inv_mod(a2t, p), p);
                else
                    rx = mod_floor(-a4t * inv_mod(2 * a2t, p), p);
                E.translate(mx * rx, 0, 0);
                ++ix;
                mx *= p;
            }
            long nu_star = ix + iy - 5;
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::Instar, nu_star};
            out.cond_exp = (int)(n - 4 - nu_star);
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }

        if (maxmult != 3) throw std::logic_error("tate: impossible root multiplicity");
        // triple root
        E.translate(p * Int(where), 0, 0);
        if (vp(E.a2, p) < 2 || vp(E.a4, p) < 3 || vp(E.a6, p) < 4)
            throw std::logic_error("tate: triple-root entry conditions failed");

        Int a3t = exact_div(E.a3, p2);
        Int a6t = exact_div(E.a6, p2 * p2);
        if (vp(a3t * a3t + 4 * a6t, p) == 0) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::IVstar, 0};
            out.cond_exp = (int)n - 6;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }
        {
            Int ry = (p == 2) ? mod_floor(a6t, p) : mod_floor(-a3t * inv2, p);
            E.translate(0, 0, p2 * ry);
        }
        if (vp(E.a3, p) < 3 || vp(E.a6, p) < 5)
            throw std::logic_error("tate: step-9 normalization failed");
        if (vp(E.a4, p) < 4) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::IIIstar, 0};
            out.cond_exp = (int)n - 7;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }
        if (vp(E.a6, p) < 6) {
            out.kind = RedKind::additive;
            out.kodaira = {Kodaira::IIstar, 0};
            out.cond_exp = (int)n - 8;
            out.vdelta_min = n;
            out.u_valuation = uval;
            return out;
        }
        // non-minimal: rescale and restart
        E.a1 = exact_div(E.a1, p);
        E.a2 = exact_div(E.a2, p2);
        E.a3 = exact_div(E.a3, p3);
        E.a4 = exact_div(E.a4, p2 * p2);
        E.a6 = exact_div(E.a6, p3 * p3);
        ++uval;
    }
}

// Classification for p >= 5 straight from the minimal (v(c4), v(c6), v(disc)).
inline LocalReduction tate_table(const ZModel& E, const Int& p) {
    Int c4 = E.c4(), c6 = E.c6(), disc = E.disc();
    if (disc == 0) throw SingularModel();
    long vc4 = vp(c4, p), vc6 = vp(c6, p), vd = vp(disc, p);
    long k = std::min({vc4 == LONG_MAX ? LONG_MAX / 4 : vc4 / 4,
                       vc6 == LONG_MAX ? LONG_MAX / 6 : vc6 / 6, vd / 12});
    vc4 = (vc4 == LONG_MAX) ? LONG_MAX : vc4 - 4 * k;
    vc6 = (vc6 == LONG_MAX) ? LONG_MAX : vc6 - 6 * k;
    vd -= 12 * k;

    LocalReduction out;
    out.u_valuation = (int)k;
    out.vdelta_min = vd;
    if (vd == 0) {
        out.kind = RedKind::good;
        out.kodaira = {Kodaira::I0, 0};
        out.cond_exp = 0;
        return out;
    }
    if (vc4 == 0) {
        out.kind = RedKind::multiplicative;
        out.kodaira = {Kodaira::In, vd};
        out.cond_exp = 1;
        Int c6min = c6 / int_pow(p, (unsigned long)(6 * k));
        out.split = split_test(c6min, p);
        return out;
    }
    out.kind = RedKind::additive;
    out.cond_exp = 2;
    long vj = (vc4 == LONG_MAX) ? LONG_MAX : 3 * vc4 - vd;
    if (vj != LONG_MAX && vj < 0) {
        if (vc4 != 2) throw std::logic_error("tate_table: potentially multiplicative additive needs v(c4)=2");
        out.kodaira = {Kodaira::Instar, vd - 6};
        return out;
    }
    switch (vd) {
        case 2: out.kodaira = {Kodaira::II, 0}; break;
        case 3: out.kodaira = {Kodaira::III, 0}; break;
        case 4: out.kodaira = {Kodaira::IV, 0}; break;
        case 6: out.kodaira = {Kodaira::I0star, 0}; break;
        case 8: out.kodaira = {Kodaira::IVstar, 0}; break;
        case 9: out.kodaira = {Kodaira::IIIstar, 0}; break;
        case 10: out.kodaira = {Kodaira::IIstar, 0}; break;
        default: throw std::logic_error("tate_table: impossible minimal discriminant valuation");
    }
    return out;
}

inline ZModel to_integral(const Model& m) {
    if (m.fid != FieldId::Q) throw UnsupportedField("Tate over Q only");
    Int u(1);
    for (const NFElem* a : {&m.a1, &m.a2, &m.a3, &m.a4, &m.a6})
        u = lcm(u, Int(a->rational_value().get_den()));
    auto scale = [&](const NFElem& a, int pow) {
        Rat r = a.rational_value() * Rat(int_pow(u, pow));
        if (r.get_den() != 1) throw std::logic_error("integralization failed");
        return Int(r.get_num());
    };
    return ZModel{scale(m.a1, 1), scale(m.a2, 2), scale(m.a3, 3), scale(m.a4, 4), scale(m.a6, 6)};
}

}  // namespace elldetail

// Local reduction data of a rational model at ell, on the minimal model.
inline LocalReduction tate_conductor_Q(const Model& m, const Int& ell) {
    elldetail::ZModel E = elldetail::to_integral(m);
    if (ell <= 3) return elldetail::tate_steps(E, ell);
    return elldetail::tate_table(E, ell);
}

// Full conductor of a rational model.
inline Int conductor_Q(const Model& m) {
    elldetail::ZModel E = elldetail::to_integral(m);
    Int disc = E.disc();
    if (disc == 0) throw SingularModel();
    Int N(1);
    for (auto& [p, e] : factor(disc)) {
        LocalReduction lr = tate_conductor_Q(m, p);
        N *= int_pow(p, (unsigned long)lr.cond_exp);
    }
    return N;
}

// Trace of Frobenius at ell for a rational model, any reduction type.
inline long frobenius_trace_Q(const Model& m, i64 ell) {
    LocalReduction lr = tate_conductor_Q(m, Int(ell));
    if (lr.kind == RedKind::additive) return 0;
    if (lr.kind == RedKind::multiplicative) return lr.split ? 1 : -1;
    if (ell == 2)
        throw UnsupportedPrime("good reduction at 2: minimal 2-adic models are not produced here");
    auto slots = prime_split(FieldId::Q, ell);
    return point_count(minimalize_at_odd_q(m, ell), slots[0]).a;
}

// --- reduction classification over extensions ---------------------------------

enum class Potential { not_applicable, potentially_good, potentially_multiplicative };

struct ReductionClass {
    RedKind kind = RedKind::good;
    Potential potential = Potential::not_applicable;
    std::optional<Kodaira> kodaira;
    std::optional<int> cond_exp;
    long vdelta_min = 0;
};

// Classification from valuations alone (odd residue characteristic); performs
// the (4,12) normalization shift itself.
inline ReductionClass classify_reduction(long vc4, long vdelta, long vj) {
    if (vj != 3 * vc4 - vdelta) throw InconsistentValuations();
    while (vc4 >= 4 && vdelta >= 12) {
        vc4 -= 4;
        vdelta -= 12;
    }
    ReductionClass rc;
    rc.vdelta_min = vdelta;
    if (vdelta == 0) {
        rc.kind = RedKind::good;
        rc.cond_exp = 0;
        return rc;
    }
    if (vc4 == 0) {
        rc.kind = RedKind::multiplicative;
        rc.potential = Potential::potentially_multiplicative;
        rc.cond_exp = 1;
        return rc;
    }
    rc.kind = RedKind::additive;
    rc.potential = (vj < 0) ? Potential::potentially_multiplicative : Potential::potentially_good;
    return rc;
}

// --- image of inertia, version 1 ----------------------------------------------

struct InertiaProfile {
    std::set<long> orders;
    bool p_dependent = false;  // contains the 2p entry of the Tate-curve case
};

inline InertiaProfile inertia_order_set(const ReductionClass& rc, long vdelta_min, i64 ell, i64 p) {
    InertiaProfile pr;
    if (rc.kind == RedKind::good) {
        pr.orders = {1};
        return pr;
    }
    if (rc.potential == Potential::potentially_multiplicative) {
        pr.orders = {2, 2 * (long)p};
        pr.p_dependent = true;
        return pr;
    }
    // potentially good
    if (ell == 2) {
        pr.orders = {2, 3, 4, 6, 8, 24};
    } else if (ell == 3) {
        pr.orders = {2, 3, 4, 6, 12};
    } else {
        long g = std::gcd(vdelta_min, 12L);
        long e = 12 / g;
        pr.orders = {e, 2 * e};
    }
    return pr;
}

inline bool inertia_v1_disjoint(const InertiaProfile& A, const InertiaProfile& B) {
    for (long x : A.orders)
        if (B.orders.count(x)) return false;
    return true;
}

}  // namespace frey
