// The five Frey curves: factor polynomials, curve constructors, closed-form
// invariant identities, conductor profiles with valuation cross-checks,
// predicted levels after level lowering, and residue-class trace tables.
#pragma once

#include <thread>

#include "ellcurve.hpp"

namespace frey {

struct DegeneratePair : std::runtime_error {
    explicit DegeneratePair(const std::string& w) : std::runtime_error(w) {}
};
struct HypothesisViolated : std::runtime_error {
    explicit HypothesisViolated(const std::string& w) : std::runtime_error(w) {}
};
struct CrossCheckFailed : std::runtime_error {
    explicit CrossCheckFailed(const std::string& w) : std::runtime_error(w) {}
};
struct InadmissibleAuxPrime : std::runtime_error {
    explicit InadmissibleAuxPrime(const std::string& w) : std::runtime_error(w) {}
};

// --- homogeneous bivariate forms ----------------------------------------------

struct HForm {
    FieldId fid = FieldId::Q;
    int deg = 0;
    std::vector<NFElem> c;  // c[i] is the coefficient of x^(deg-i) y^i

    HForm() = default;
    HForm(FieldId f, int d) : fid(f), deg(d), c(d + 1, NFElem::zero(f)) {}

    static HForm constant(const NFElem& v) {
        HForm h(v.fid, 0);
        h.c[0] = v;
        return h;
    }
    bool operator==(const HForm& o) const { return fid == o.fid && deg == o.deg && c == o.c; }
    bool is_zero() const {
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    NFElem eval(const Int& a, const Int& b) const {
        NFElem acc = NFElem::zero(fid);
        Rat ap(1);
        std::vector<Rat> bpow(deg + 1, Rat(1));
        for (int i = 1; i <= deg; ++i) bpow[i] = bpow[i - 1] * Rat(b);
        // accumulate from y-heavy end so a-powers build up once
        for (int i = deg; i >= 0; --i) {
            acc = acc + (ap * bpow[i]) * c[i];
            ap *= Rat(a);
        }
        return acc;
    }
};

inline HForm operator+(const HForm& a, const HForm& b) {
    if (a.deg != b.deg || a.fid != b.fid) throw std::logic_error("HForm degree/field mismatch");
    HForm r = a;
    for (int i = 0; i <= a.deg; ++i) r.c[i] = r.c[i] + b.c[i];
    return r;
}

inline HForm operator-(const HForm& a, const HForm& b) {
    if (a.deg != b.deg || a.fid != b.fid) throw std::logic_error("HForm degree/field mismatch");
    HForm r = a;
    for (int i = 0; i <= a.deg; ++i) r.c[i] = r.c[i] - b.c[i];
    return r;
}

inline HForm operator*(const HForm& a, const HForm& b) {
    if (a.fid != b.fid) throw std::logic_error("HForm field mismatch");
    HForm r(a.fid, a.deg + b.deg);
    for (int i = 0; i <= a.deg; ++i)
        for (int j = 0; j <= b.deg; ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    return r;
}

inline HForm operator*(const NFElem& s, const HForm& a) {
    HForm r = a;
    for (auto& x : r.c) x = s * x;
    return r;
}

inline HForm operator*(const Rat& s, const HForm& a) {
    HForm r = a;
    for (auto& x : r.c) x = s * x;
    return r;
}

inline HForm hform_descend(const HForm& a, FieldId target) {
    HForm r(target, a.deg);
    for (int i = 0; i <= a.deg; ++i) r.c[i] = nf_descend(a.c[i], target);
    return r;
}

// x + zeta^k y over Zeta13
inline HForm linear_zeta(long k) {
    HForm h(FieldId::Zeta13, 1);
    h.c[0] = NFElem::one(FieldId::Zeta13);
    h.c[1] = zeta_power(k);
    return h;
}

// --- curve kinds and formula registry ------------------------------------------

enum class FreyKind { W, E5, F5, E13, F13 };

inline const char* kind_name(FreyKind k) {
    switch (k) {
        case FreyKind::W: return "W";
        case FreyKind::E5: return "E5";
        case FreyKind::F5: return "F5";
        case FreyKind::E13: return "E13";
        case FreyKind::F13: return "F13";
    }
    return "?";
}

inline FieldId host_field(FreyKind k) {
    switch (k) {
        case FreyKind::W: return FieldId::Q;
        case FreyKind::E5: case FreyKind::F5: return FieldId::Qsqrt5;
        case FreyKind::E13: return FieldId::Qsqrt13;
        case FreyKind::F13: return FieldId::CubicK;
    }
    return FieldId::Q;
}

inline int signature_r(FreyKind k) {
    return (k == FreyKind::E13 || k == FreyKind::F13) ? 13 : 5;
}

struct FactorTriple {
    // degree-2 forms with A + B + C = 0, and their scalar constants
    HForm A, B, C;
    NFElem alpha, beta, gamma;
};

// All curve coefficient data, as forms in the solution pair. Built once and
// checked against the defining identities.
struct FreyFormulas {
    // signature 5
    HForm phi5_Q;                 // over Q
    HForm phi5, psi5, psib5;      // over Qsqrt5
    NFElem omega, omega_bar;      // the roots of X^2+X-1 inside Qsqrt5
    NFElem uF, uFbar;             // the F-curve scaling constants
    HForm W_a2, W_a4;             // over Q
    HForm E5_a2, E5_a4;           // over Qsqrt5
    HForm F5_a2, F5_a4;

    // signature 13
    HForm phi13_Q;                          // over Q
    HForm psi13, psib13, phi13;             // over Qsqrt13
    FactorTriple tE;                        // the sqrt13-curve triple (in Zeta13)
    FactorTriple tF;                        // the cubic-curve triple (in Zeta13)
    HForm E13_a4, E13_a6;                   // descended to Qsqrt13
    HForm F13_a4, F13_a6;                   // descended to CubicK
    HForm E13_a4z, E13_a6z, F13_a4z, F13_a6z;  // the same, in Zeta13

    static const FreyFormulas& instance();
};

namespace freydetail {

inline HForm power_sum_form(FieldId f, int r) {
    // x^r + y^r
    HForm h(f, r);
    h.c[0] = NFElem::one(f);
    h.c[r] = NFElem::one(f);
    return h;
}

inline HForm xy_sum(FieldId f, bool minus = false) {
    HForm h(f, 1);
    h.c[0] = NFElem::one(f);
    h.c[1] = minus ? -NFElem::one(f) : NFElem::one(f);
    return h;
}

inline HForm quadratic_with_middle(const NFElem& mid) {
    HForm h(mid.fid, 2);
    h.c[0] = NFElem::one(mid.fid);
    h.c[1] = mid;
    h.c[2] = NFElem::one(mid.fid);
    return h;
}

inline std::pair<HForm, HForm> model2_invariants_c4c6(const HForm& a2, const HForm& a4) {
    // y^2 = x^3 + a2 x^2 + a4 x
    HForm c4 = Rat(16) * (a2 * a2) - Rat(48) * a4;
    HForm c6 = Rat(-64) * (a2 * a2 * a2) + Rat(288) * (a2 * a4);
    return {c4, c6};
}
inline HForm model2_disc(const HForm& a2, const HForm& a4) {
    return Rat(16) * (a4 * a4 * (a2 * a2)) - Rat(64) * (a4 * a4 * a4);
}
inline HForm model3_c4(const HForm& a4) { return Rat(-48) * a4; }
inline HForm model3_disc(const HForm& a4, const HForm& a6) {
    return Rat(-64) * (a4 * a4 * a4) - Rat(432) * (a6 * a6);
}

}  // namespace freydetail

inline const FreyFormulas& FreyFormulas::instance() {
    static const FreyFormulas ff = [] {
        FreyFormulas F;
        using namespace freydetail;
        const FieldId Q5 = FieldId::Qsqrt5, Q13 = FieldId::Qsqrt13, K = FieldId::CubicK,
                      Z = FieldId::Zeta13, Q = FieldId::Q;

        // ---- signature 5
        NFElem g = NFElem::gen(Q5);  // g^2 = g + 1
        F.omega = g - NFElem::one(Q5);   // root of X^2+X-1
        F.omega_bar = -g;                // its conjugate
        if (F.omega * F.omega + F.omega - NFElem::one(Q5) != NFElem::zero(Q5))
            throw std::logic_error("omega normalization broken");
        F.psi5 = quadratic_with_middle(F.omega);
        F.psib5 = quadratic_with_middle(F.omega_bar);
        {
            // phi5 = x^4 - x^3 y + x^2 y^2 - x y^3 + y^4
            F.phi5 = HForm(Q5, 4);
            F.phi5_Q = HForm(Q, 4);
            for (int i = 0; i <= 4; ++i) {
                F.phi5.c[i] = NFElem::from_rat(Q5, Rat((i % 2) ? -1 : 1));
                F.phi5_Q.c[i] = NFElem::from_rat(Q, Rat((i % 2) ? -1 : 1));
            }
        }
        if (!(xy_sum(Q5) * F.psi5 * F.psib5 - power_sum_form(Q5, 5)).is_zero())
            throw std::logic_error("x^5+y^5 factorization identity failed");
        if (!(F.psi5 * F.psib5 - F.phi5).is_zero())
            throw std::logic_error("phi5 = psi5*psib5 failed");

        // W: y^2 = x^3 - 5(a^2+b^2) x^2 + 5 phi5(a,b) x
        {
            HForm sq(Q, 2);
            sq.c[0] = NFElem::one(Q);
            sq.c[2] = NFElem::one(Q);
            F.W_a2 = Rat(-5) * sq;
            F.W_a4 = Rat(5) * F.phi5_Q;
        }
        // E: y^2 = x^3 + 2(a+b) x^2 - omega_bar psi5(a,b) x
        F.E5_a2 = Rat(2) * xy_sum(Q5);
        F.E5_a4 = (-F.omega_bar) * F.psi5;
        // F: y^2 = x^3 + 2(a-b) x^2 + (-(3/10)(omega-omega_bar)+1/2) psi5(a,b) x
        F.uF = Rat(-3, 10) * (F.omega - F.omega_bar) + NFElem::from_rat(Q5, Rat(1, 2));
        F.uFbar = Rat(3, 10) * (F.omega - F.omega_bar) + NFElem::from_rat(Q5, Rat(1, 2));
        F.F5_a2 = Rat(2) * xy_sum(Q5, true);
        F.F5_a4 = F.uF * F.psi5;

        // ---- signature 13
        {
            F.phi13_Q = HForm(Q, 12);
            for (int i = 0; i <= 12; ++i) F.phi13_Q.c[i] = NFElem::from_rat(Q, Rat((i % 2) ? -1 : 1));
        }
        {
            // psi13 = prod over quadratic residues k mod 13 of (x + zeta^k y)
            HForm psiz = linear_zeta(1);
            for (long k : {3, 4, 9, 10, 12}) psiz = psiz * linear_zeta(k);
            HForm psibz = linear_zeta(2);
            for (long k : {5, 6, 7, 8, 11}) psibz = psibz * linear_zeta(k);
            F.psi13 = hform_descend(psiz, Q13);
            F.psib13 = hform_descend(psibz, Q13);
            F.phi13 = F.psi13 * F.psib13;
            // expanded coefficients: x^6 + 1/2(w-1)x^5y + 2x^4y^2 + 1/2(w+1)x^3y^3 + ...
            NFElem w = NFElem::gen(Q13);
            HForm expect(Q13, 6);
            expect.c[0] = expect.c[6] = NFElem::one(Q13);
            expect.c[1] = expect.c[5] = Rat(1, 2) * (w - NFElem::one(Q13));
            expect.c[2] = expect.c[4] = NFElem::from_rat(Q13, 2);
            expect.c[3] = Rat(1, 2) * (w + NFElem::one(Q13));
            if (!(F.psi13 - expect).is_zero())
                throw std::logic_error("psi13 does not match its expanded coefficients");
            HForm phi13_in13 = hform_descend(
                [&] {
                    HForm h(Z, 12);
                    for (int i = 0; i <= 12; ++i) h.c[i] = NFElem::from_rat(Z, Rat((i % 2) ? -1 : 1));
                    return h;
                }(),
                Q13);
            if (!(F.phi13 - phi13_in13).is_zero())
                throw std::logic_error("phi13 = psi13 * psib13 failed");
        }
        auto zc = [&](std::initializer_list<long> plus, std::initializer_list<long> minus) {
            NFElem v = NFElem::zero(Z);
            for (long k : plus) v = v + zeta_power(k);
            for (long k : minus) v = v - zeta_power(k);
            return v;
        };
        // triple for the curve over Q(sqrt13)
        {
            FactorTriple t;
            t.alpha = zc({4, 9}, {3, 10});
            t.beta = zc({1, 12}, {4, 9});
            t.gamma = zc({3, 10}, {1, 12});
            t.A = t.alpha * quadratic_with_middle(zc({1, 12}, {}));
            t.B = t.beta * quadratic_with_middle(zc({3, 10}, {}));
            t.C = t.gamma * quadratic_with_middle(zc({4, 9}, {}));
            if (!(t.A + t.B + t.C).is_zero()) throw std::logic_error("A+B+C != 0 (sqrt13 triple)");
            F.tE = std::move(t);
        }
        // triple for the curve over the cubic field
        {
            FactorTriple t;
            t.alpha = zc({8, 5}, {1, 12});
            t.beta = NFElem::from_rat(Z, 2) - zeta_power(8) - zeta_power(5);
            t.gamma = zc({1, 12}, {}) - NFElem::from_rat(Z, 2);
            t.A = t.alpha * (xy_sum(Z) * xy_sum(Z));
            t.B = t.beta * quadratic_with_middle(zc({1, 12}, {}));
            t.C = t.gamma * quadratic_with_middle(zc({8, 5}, {}));
            if (!(t.A + t.B + t.C).is_zero()) throw std::logic_error("A+B+C != 0 (cubic triple)");
            F.tF = std::move(t);
        }
        auto curve_forms = [&](const FactorTriple& t, const Rat& s4, const Rat& s6) {
            const HForm &A = t.A, &B = t.B, &C = t.C;
            HForm a4 = s4 * (A * B + A * C + B * C);
            HForm a6 = s6 * (Rat(2) * (A * A * A) + Rat(3) * (A * A * B) - Rat(3) * (A * (B * B)) -
                             Rat(2) * (B * B * B));
            return std::make_pair(a4, a6);
        };
        {
            auto [a4, a6] = curve_forms(F.tE, Rat(27), Rat(-27));
            F.E13_a4z = a4;
            F.E13_a6z = a6;
            F.E13_a4 = hform_descend(a4, Q13);
            F.E13_a6 = hform_descend(a6, Q13);
        }
        {
            auto [a4, a6] = curve_forms(F.tF, Rat(27) * Rat(169), Rat(-27) * Rat(2197));
            F.F13_a4z = a4;
            F.F13_a6z = a6;
            F.F13_a4 = hform_descend(a4, K);
            F.F13_a6 = hform_descend(a6, K);
        }
        return F;
    }();
    return ff;
}

// --- curve construction ---------------------------------------------------------

struct FreyModel {
    FreyKind kind;
    Int a, b;
    Model model;
};

inline Model frey_model_at(FreyKind kind, const Int& a, const Int& b) {
    const auto& F = FreyFormulas::instance();
    FieldId fid = host_field(kind);
    auto zero = NFElem::zero(fid);
    switch (kind) {
        case FreyKind::W:
            return Model{fid, zero, F.W_a2.eval(a, b), zero, F.W_a4.eval(a, b), zero};
        case FreyKind::E5:
            return Model{fid, zero, F.E5_a2.eval(a, b), zero, F.E5_a4.eval(a, b), zero};
        case FreyKind::F5:
            return Model{fid, zero, F.F5_a2.eval(a, b), zero, F.F5_a4.eval(a, b), zero};
        case FreyKind::E13:
            return Model{fid, zero, zero, zero, F.E13_a4.eval(a, b), F.E13_a6.eval(a, b)};
        case FreyKind::F13:
            return Model{fid, zero, zero, zero, F.F13_a4.eval(a, b), F.F13_a6.eval(a, b)};
    }
    throw std::logic_error("unknown kind");
}

inline FreyModel build_frey(FreyKind kind, const Int& a, const Int& b) {
    if (a == 0 && b == 0) throw DegeneratePair("(0,0) is not a valid pair");
    if (gcd(a, b) != 1) throw DegeneratePair("pair is not coprime");
    if ((kind == FreyKind::W || kind == FreyKind::F13) && a + b == 0)
        throw DegeneratePair("a+b = 0 is excluded for this curve");
    FreyModel fm{kind, a, b, frey_model_at(kind, a, b)};
    invariants(fm.model);  // nonsingularity
    return fm;
}

// The closed-form invariant identities of each family, verified symbolically.
inline bool invariant_identity_check(FreyKind kind) {
    const auto& F = FreyFormulas::instance();
    using namespace freydetail;
    switch (kind) {
        case FreyKind::W: {
            HForm disc = model2_disc(F.W_a2, F.W_a4);
            HForm expect = Rat(2000) * (xy_sum(FieldId::Q) * xy_sum(FieldId::Q) *
                                        power_sum_form(FieldId::Q, 5) * power_sum_form(FieldId::Q, 5));
            return (disc - expect).is_zero();
        }
        case FreyKind::E5: {
            auto [c4, c6] = model2_invariants_c4c6(F.E5_a2, F.E5_a4);
            HForm disc = model2_disc(F.E5_a2, F.E5_a4);
            HForm c4e = Rat(-16) * (F.omega_bar * F.psi5 + Rat(4) * (F.omega * F.psib5));
            HForm c6e = Rat(-64) * (xy_sum(FieldId::Qsqrt5) *
                                    (F.omega_bar * F.psi5 - Rat(8) * (F.omega * F.psib5)));
            HForm de = Rat(64) * (F.omega_bar * (F.phi5 * F.psi5));
            return (c4 - c4e).is_zero() && (c6 - c6e).is_zero() && (disc - de).is_zero();
        }
        case FreyKind::F5: {
            auto [c4, c6] = model2_invariants_c4c6(F.F5_a2, F.F5_a4);
            HForm disc = model2_disc(F.F5_a2, F.F5_a4);
            HForm c4e = Rat(16) * (F.uF * F.psi5 + Rat(4) * (F.uFbar * F.psib5));
            HForm c6e = Rat(64) * (xy_sum(FieldId::Qsqrt5, true) *
                                   (F.uF * F.psi5 - Rat(8) * (F.uFbar * F.psib5)));
            HForm de = Rat(64) * ((F.uF * F.uF * F.uFbar) * (F.phi5 * F.psi5));
            return (c4 - c4e).is_zero() && (c6 - c6e).is_zero() && (disc - de).is_zero();
        }
        case FreyKind::E13: {
            HForm c4 = model3_c4(F.E13_a4z);
            HForm disc = model3_disc(F.E13_a4z, F.E13_a6z);
            const auto& t = F.tE;
            HForm c4e = Rat(-16 * 81) * (t.A * t.B + t.A * t.C + t.B * t.C);
            HForm de = Rat(16) * Rat(531441) * ((t.A * t.B * t.C) * (t.A * t.B * t.C));
            // and the descended discriminant against 2^4 3^12 13 psi13^2
            HForm d13 = model3_disc(F.E13_a4, F.E13_a6);
            HForm de13 = Rat(16) * Rat(531441) * Rat(13) * (F.psi13 * F.psi13);
            return (c4 - c4e).is_zero() && (disc - de).is_zero() && (d13 - de13).is_zero();
        }
        case FreyKind::F13: {
            HForm c4 = model3_c4(F.F13_a4z);
            HForm disc = model3_disc(F.F13_a4z, F.F13_a6z);
            const auto& t = F.tF;
            HForm c4e = (Rat(-16 * 81) * Rat(169)) * (t.A * t.B + t.A * t.C + t.B * t.C);
            HForm de = (Rat(16) * Rat(531441) * Rat(169 * 169) * Rat(169)) *
                       ((t.A * t.B * t.C) * (t.A * t.B * t.C));
            return (c4 - c4e).is_zero() && (disc - de).is_zero();
        }
    }
    return false;
}

// --- conductor profiles -----------------------------------------------------------

struct ProfileEntry {
    PrimeSlot slot;
    std::vector<int> exponents;  // usually one; two when the parity of a+b leaves the 2-exponent open
    RedKind kind = RedKind::good;
    std::optional<long> vdelta_min;
};

struct ConductorProfile {
    FreyKind kind;
    Int a, b;
    std::vector<ProfileEntry> entries;  // sorted by (q, slot index)

    const ProfileEntry* at(i64 q, int index = 0) const {
        for (const auto& e : entries)
            if (e.slot.q == q && e.slot.index == index) return &e;
        return nullptr;
    }
};

namespace freydetail {

inline void require(bool cond, const char* what) {
    if (!cond) throw CrossCheckFailed(what);
}

inline long vslot(const NFElem& x, const PrimeSlot& s) { return padic_valuation(x, s); }

}  // namespace freydetail

inline ConductorProfile conductor_profile(FreyKind kind, const Int& a, const Int& b, const Int& d) {
    using freydetail::require;
    using freydetail::vslot;
    const int r = signature_r(kind);
    for (auto& [ell, e] : factor(d))
        if (mod_floor(ell, Int(r)) == 1)
            throw HypothesisViolated("d has a prime factor congruent to 1 mod r");
    if (gcd(a, b) != 1) throw DegeneratePair("pair is not coprime");

    const auto& F = FreyFormulas::instance();
    ConductorProfile prof{kind, a, b, {}};
    Model m = frey_model_at(kind, a, b);
    InvariantSet inv = invariants(m);

    auto add = [&](const PrimeSlot& s, std::vector<int> exps, RedKind k,
                   std::optional<long> vd = std::nullopt) {
        prof.entries.push_back({s, std::move(exps), k, vd});
    };

    if (kind == FreyKind::W) {
        // alpha-table at 2, exponent 2 at 5, exponent 1 at odd primes of a^5+b^5
        Int ab = a * b, apb = a + b;
        long v2apb = (apb == 0) ? LONG_MAX : val_q(apb, 2);
        int alpha;
        if (mod_floor(ab, Int(4)) == 0) alpha = 3;  // includes ab = 0
        else if (mod_floor(ab, Int(4)) == 2 || v2apb == 1) alpha = 4;
        else if (v2apb == 2) alpha = 0;
        else alpha = 1;  // v2(a+b) >= 3
        auto s2 = prime_split(FieldId::Q, 2)[0];
        add(s2, {alpha}, alpha == 0 ? RedKind::good : (alpha == 1 ? RedKind::multiplicative : RedKind::additive));
        auto s5 = prime_split(FieldId::Q, 5)[0];
        add(s5, {2}, RedKind::additive);
        Int a5b5 = int_pow(a, 5) + int_pow(b, 5);
        for (auto& [ell, e] : factor(a5b5)) {
            if (ell == 2 || ell == 5) continue;
            if (!ell.fits_slong_p())
                throw UnsupportedPrime("bad prime exceeds the machine word used for slot data");
            auto sl = prime_split(FieldId::Q, ell.get_si())[0];
            long vD = val_q(Int(inv.disc.rational_value().get_num()), ell);
            long vell = val_q(a5b5, ell);
            Int phi = F.phi5_Q.eval(a, b).rational_value().get_num();
            long delta = mpz_divisible_p(phi.get_mpz_t(), ell.get_mpz_t()) ? 2 : 4;
            require(vD == delta * vell, "W: v(disc) = delta * v(a^5+b^5) failed at an odd prime");
            add(sl, {1}, RedKind::multiplicative, vD);
        }
        // j-valuation facts of this family
        Rat j = inv.j.rational_value();
        long v2j = val_q(j, Int(2));
        require((v2j >= 0) == (v2apb == LONG_MAX || v2apb <= 2), "W: v2(j) sign rule failed");
        if (apb != 0 && mod_floor(apb, Int(5)) == 0) {
            long v5apb = val_q(apb, 5);
            require(val_q(j, Int(5)) == 1 - 4 * v5apb, "W: v5(j) = 1 - 4 v5(a+b) failed");
        } else {
            require(val_q(j, Int(5)) == 0, "W: v5(j) = 0 failed");
        }
        return prof;
    }

    if (kind == FreyKind::E5 || kind == FreyKind::F5) {
        bool isE = kind == FreyKind::E5;
        auto s2 = prime_split(FieldId::Qsqrt5, 2)[0];
        auto s5 = prime_split(FieldId::Qsqrt5, 5)[0];
        bool five_divides = mod_floor(a + b, Int(5)) == 0;
        // cross-checks at 2: (v(c4), v(disc)) = (4, 6)
        require(vslot(inv.c4, s2) == 4 && vslot(inv.disc, s2) == 6,
                "5-family: (v2(c4), v2(disc)) != (4, 6)");
        add(s2, {6}, RedKind::additive, 6);
        if (isE) {
            if (five_divides) {
                require(vslot(inv.c4, s5) == 1 && vslot(inv.disc, s5) == 3,
                        "E5: (v(c4), v(disc)) at the ramified 5-slot should be (1, 3)");
                add(s5, {2}, RedKind::additive, 3);
            } else {
                require(vslot(inv.disc, s5) == 0, "E5: expected good reduction over 5");
                add(s5, {0}, RedKind::good, 0);
            }
        } else {
            if (five_divides) {
                require(vslot(inv.disc, s5) == 0, "F5: expected good reduction over 5");
                add(s5, {0}, RedKind::good, 0);
            } else {
                require(vslot(inv.c4, s5) == -1 && vslot(inv.disc, s5) == -3,
                        "F5: non-integral valuations at 5 should be (-1, -3)");
                add(s5, {2}, RedKind::additive, 9);  // after the integralizing change of variables
            }
        }
        // multiplicative part: odd primes dividing phi5(a,b)
        Int phi = F.phi5_Q.eval(a, b).rational_value().get_num();
        NFElem psi = F.psi5.eval(a, b), psib = F.psib5.eval(a, b);
        for (auto& [ell, e] : factor(phi)) {
            if (ell == 2 || ell == 5) continue;
            require(mod_floor(ell, Int(5)) == 1, "5-family: bad odd prime not 1 mod 5");
            if (!ell.fits_slong_p())
                throw UnsupportedPrime("bad prime exceeds the machine word used for slot data");
            for (const auto& sl : prime_split(FieldId::Qsqrt5, ell.get_si())) {
                long vpsi = psi.is_zero() ? 0 : vslot(psi, sl);
                long vpsib = psib.is_zero() ? 0 : vslot(psib, sl);
                if (vpsi + vpsib == 0) continue;
                require(vslot(inv.c4, sl) == 0, "5-family: v(c4) != 0 at a multiplicative slot");
                long vD = vslot(inv.disc, sl);
                require(vD == 2 * vpsi + vpsib, "5-family: v(disc) != 2 v(psi) + v(psib)");
                add(sl, {1}, RedKind::multiplicative, vD);
            }
        }
        std::sort(prof.entries.begin(), prof.entries.end(),
                  [](const ProfileEntry& x, const ProfileEntry& y) { return x.slot < y.slot; });
        return prof;
    }

    if (kind == FreyKind::E13) {
        auto sw = prime_split(FieldId::Qsqrt13, 13)[0];
        auto s2 = prime_split(FieldId::Qsqrt13, 2)[0];
        add(sw, {2}, RedKind::additive);
        Int apb = a + b;
        if (mod_floor(apb, Int(2)) == 0) {
            int s = (mod_floor(apb, Int(4)) == 0) ? 3 : 4;
            add(s2, {s}, RedKind::additive);
        } else {
            add(s2, {3, 4}, RedKind::additive);
        }
        // good reduction over 3 after a change of variables
        for (const auto& s3 : prime_split(FieldId::Qsqrt13, 3)) {
            require(vslot(inv.c4, s3) >= 4 && vslot(inv.disc, s3) == 12,
                    "E13: (v(c4), v(disc)) over 3 should be (>=4, 12)");
            add(s3, {0}, RedKind::good, 0);
        }
        NFElem psi = F.psi13.eval(a, b);
        Int nrm = Int(nf_norm(psi).get_num());
        for (auto& [ell, e] : factor(nrm)) {
            if (ell == 2 || ell == 13 || ell == 3) continue;
            if (!ell.fits_slong_p())
                throw UnsupportedPrime("bad prime exceeds the machine word used for slot data");
            bool any = false;
            for (const auto& sl : prime_split(FieldId::Qsqrt13, ell.get_si())) {
                long vpsi = vslot(psi, sl);
                if (vpsi == 0) continue;
                any = true;
                require(vslot(inv.c4, sl) == 0, "E13: v(c4) != 0 at a multiplicative slot");
                require(vslot(inv.disc, sl) == 2 * vpsi, "E13: v(disc) != 2 v(psi13)");
                add(sl, {1}, RedKind::multiplicative, 2 * vpsi);
            }
            if (any) require(mod_floor(ell, Int(13)) == 1, "E13: bad prime not 1 mod 13");
        }
        std::sort(prof.entries.begin(), prof.entries.end(),
                  [](const ProfileEntry& x, const ProfileEntry& y) { return x.slot < y.slot; });
        return prof;
    }

    // F13
    {
        if (a + b == 0) throw DegeneratePair("a+b = 0 is excluded for this curve");
        auto s13 = prime_split(FieldId::CubicK, 13)[0];
        auto s2 = prime_split(FieldId::CubicK, 2)[0];
        auto s3 = prime_split(FieldId::CubicK, 3)[0];
        Int apb = a + b, ab = a * b;
        bool d13 = mod_floor(apb, Int(13)) == 0;
        long v13 = d13 ? val_q(apb, 13) : 0;

        // pi-adic cross-checks of the factor products inside Zeta13
        auto piz = prime_split(FieldId::Zeta13, 13)[0];
        NFElem Az = F.tF.A.eval(a, b), Bz = F.tF.B.eval(a, b), Cz = F.tF.C.eval(a, b);
        long vAB = vslot(Az * Bz, piz), vAC = vslot(Az * Cz, piz), vBC = vslot(Bz * Cz, piz);
        require(vAB == 24 * v13 + (d13 ? 6 : 4), "F13: v_pi(AB) mismatch");
        require(vAC == 24 * v13 + (d13 ? 6 : 4), "F13: v_pi(AC) mismatch");
        require(vBC == (d13 ? 8 : 4), "F13: v_pi(BC) mismatch");

        if (d13) {
            require(vslot(inv.c4, s13) == 8 && vslot(inv.disc, s13) == 23 + 12 * v13,
                    "F13: (v(c4), v(disc)) at q13 should be (8, 23+12 v13(a+b))");
            add(s13, {1}, RedKind::multiplicative, 12 * v13 - 1 /* after minimalization */);
        } else {
            require(vslot(inv.c4, s13) >= 7 && vslot(inv.disc, s13) == 21,
                    "F13: (v(c4), v(disc)) at q13 should be (>=7, 21)");
            add(s13, {2}, RedKind::additive);
        }
        if (mod_floor(apb, Int(3)) == 0) {
            long v3 = val_q(apb, 3);
            require(vslot(inv.c4, s3) == 4 && vslot(inv.disc, s3) == 12 + 4 * v3,
                    "F13: (v(c4), v(disc)) at 3 should be (4, 12+4 v3(a+b))");
            add(s3, {1}, RedKind::multiplicative, 4 * v3);
        } else {
            require(vslot(inv.c4, s3) >= 4 && vslot(inv.disc, s3) == 12,
                    "F13: (v(c4), v(disc)) at 3 should be (>=4, 12)");
            add(s3, {0}, RedKind::good, 0);
        }
        long v2 = (mod_floor(apb, Int(2)) == 0) ? val_q(apb, 2) : 0;
        require(vslot(inv.disc, s2) == 4 + 4 * v2, "F13: v2(disc) != 4 + 4 v2(a+b)");
        int e2;
        if (v2 == 2) e2 = 0;
        else if (v2 >= 3) e2 = 1;
        else if (ab != 0 && mod_floor(ab, Int(4)) == 0) e2 = 3;
        else e2 = 4;  // v2(a+b) = 1 or ab = 2 mod 4
        add(s2, {e2}, e2 == 0 ? RedKind::good : (e2 == 1 ? RedKind::multiplicative : RedKind::additive));

        Int phi13 = F.phi13_Q.eval(a, b).rational_value().get_num();
        Int bad = apb * phi13;
        NFElem discK = inv.disc;
        for (auto& [ell, e] : factor(bad)) {
            if (ell == 2 || ell == 3 || ell == 13) continue;
            if (!ell.fits_slong_p())
                throw UnsupportedPrime("bad prime exceeds the machine word used for slot data");
            for (const auto& sl : prime_split(FieldId::CubicK, ell.get_si())) {
                long vD = vslot(discK, sl);
                if (vD == 0) continue;
                require(vslot(inv.c4, sl) == 0, "F13: v(c4) != 0 at a multiplicative slot");
                long vell = val_q(Int(int_pow(a, 13) + int_pow(b, 13)), ell);
                Int phi_l = phi13;
                long delta = mpz_divisible_p(phi_l.get_mpz_t(), ell.get_mpz_t()) ? 2 : 4;
                require(vD == delta * vell, "F13: v(disc) != delta * v(a^13+b^13)");
                add(sl, {1}, RedKind::multiplicative, vD);
            }
        }
        std::sort(prof.entries.begin(), prof.entries.end(),
                  [](const ProfileEntry& x, const ProfileEntry& y) { return x.slot < y.slot; });
        return prof;
    }
}

// --- predicted levels after level lowering ------------------------------------

struct SerreLevel {
    FieldId fid;
    // each candidate level is a list of (slot, exponent)
    std::vector<std::vector<std::pair<PrimeSlot, int>>> candidates;
    std::string condition;  // human-readable branch description
};

inline SerreLevel serre_level(FreyKind kind, const Int& a, const Int& b, const Int& d, const Int& p) {
    const int r = signature_r(kind);
    for (auto& [ell, e] : factor(d))
        if (mod_floor(ell, Int(r)) == 1)
            throw HypothesisViolated("d has a prime factor congruent to 1 mod r");
    SerreLevel out;
    out.fid = host_field(kind);
    Int apb = a + b;
    switch (kind) {
        case FreyKind::W:
            throw HypothesisViolated("level prediction is handled over Q by the classical route");
        case FreyKind::E5: {
            if (p < 7) throw HypothesisViolated("p >= 7 required");
            if (mod_floor(apb, Int(5)) == 0)
                throw HypothesisViolated("the sqrt5 E-curve route requires 5 not dividing a+b");
            auto s2 = prime_split(FieldId::Qsqrt5, 2)[0];
            out.candidates = {{{s2, 6}}};
            out.condition = "5 does not divide a+b";
            return out;
        }
        case FreyKind::F5: {
            if (p < 7) throw HypothesisViolated("p >= 7 required");
            if (mod_floor(apb, Int(5)) != 0)
                throw HypothesisViolated("the sqrt5 F-curve route requires 5 | a+b");
            auto s2 = prime_split(FieldId::Qsqrt5, 2)[0];
            out.candidates = {{{s2, 6}}};
            out.condition = "5 divides a+b";
            return out;
        }
        case FreyKind::E13: {
            bool p5ok = (p == 5 && mod_floor(apb, Int(3)) == 0);
            if (!(p >= 7 || p5ok) || p == 13)
                throw HypothesisViolated("p >= 7 (or p = 5 with 3 | a+b), p != 13 required");
            auto s2 = prime_split(FieldId::Qsqrt13, 2)[0];
            auto sw = prime_split(FieldId::Qsqrt13, 13)[0];
            if (mod_floor(apb, Int(2)) == 0) {
                int s = (mod_floor(apb, Int(4)) == 0) ? 3 : 4;
                out.candidates = {{{s2, s}, {sw, 2}}};
                out.condition = s == 3 ? "4 | a+b" : "2 || a+b";
            } else {
                out.candidates = {{{s2, 3}, {sw, 2}}, {{s2, 4}, {sw, 2}}};
                out.condition = "a+b odd: both 2-exponents possible";
            }
            return out;
        }
        case FreyKind::F13: {
            bool thirteen = mod_floor(apb, Int(13)) == 0;
            if (p == 13) throw HypothesisViolated("p = 13 excluded");
            if (p < 5) throw HypothesisViolated("p >= 5 required");
            if (!thirteen && (p == 17 || p == 37))
                throw HypothesisViolated("p in {17, 37} needs 13 | a+b");
            auto prof = conductor_profile(FreyKind::F13, a, b, d);
            auto s2 = prime_split(FieldId::CubicK, 2)[0];
            auto s3 = prime_split(FieldId::CubicK, 3)[0];
            auto s13 = prime_split(FieldId::CubicK, 13)[0];
            int a2 = prof.at(2)->exponents[0];
            int a3 = prof.at(3)->exponents[0];
            int a13 = prof.at(13)->exponents[0];
            std::vector<std::pair<PrimeSlot, int>> lvl;
            if (a2) lvl.push_back({s2, a2});
            if (a3) lvl.push_back({s3, a3});
            lvl.push_back({s13, a13});
            out.candidates = {lvl};
            out.condition = "exponents from the conductor table";
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

// --- residue-class trace tables -------------------------------------------------

struct TraceTableEntry {
    bool multiplicative = false;
    std::vector<TraceRecord> traces;  // one per slot, slot order
};

struct TraceTable {
    FreyKind kind;
    i64 q;
    std::vector<PrimeSlot> slots;
    // indexed x*q + y, entry (0,0) unused
    std::vector<TraceTableEntry> entries;

    const TraceTableEntry& at(i64 x, i64 y) const { return entries[(size_t)(x * q + y)]; }
};

inline void check_aux_admissible(FreyKind kind, i64 q) {
    const int r = signature_r(kind);
    std::vector<i64> banned = {2, (i64)r};
    if (kind == FreyKind::F13) banned.push_back(3);
    if (kind == FreyKind::E5 || kind == FreyKind::F5) banned.push_back(5);
    for (i64 bq : banned)
        if (q == bq) throw InadmissibleAuxPrime("q divides the fixed bad primes of this curve");
    if (q % r == 1) throw InadmissibleAuxPrime("q = 1 mod r gives unbounded bad classes");
    if (!is_prime(Int(q))) throw InadmissibleAuxPrime("q not prime");
}

inline TraceTable trace_table(FreyKind kind, i64 q) {
    check_aux_admissible(kind, q);
    if (kind == FreyKind::W) throw InadmissibleAuxPrime("trace tables are for the number-field curves");
    static std::map<std::pair<FreyKind, i64>, TraceTable> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({kind, q});
        if (it != cache.end()) return it->second;
    }
    FreyFormulas::instance();  // build and check the formula registry once
    FieldId fid = host_field(kind);
    TraceTable tbl;
    tbl.kind = kind;
    tbl.q = q;
    tbl.slots = prime_split(fid, q);
    tbl.entries.resize((size_t)q * q);

    auto fill_class = [&](i64 x, i64 y) {
        Model m = minimalize_at_odd_q(frey_model_at(kind, Int(x), Int(y)), q);
        InvariantSet inv = invariants(m);
        TraceTableEntry ent;
        for (const auto& s : tbl.slots) {
            ResidueField rf = residue_field(s);
            if (rf.is_zero(reduce_element(inv.disc, s))) {
                if (kind != FreyKind::F13)
                    throw std::logic_error("unexpected bad reduction in a trace table");
                if (mod_pos(x + y, q) != 0)
                    throw std::logic_error("bad reduction off the a+b = 0 classes");
                if (rf.is_zero(reduce_element(inv.c4, s)))
                    throw std::logic_error("additive reduction cannot appear here");
                ent.multiplicative = true;
                ent.traces.clear();
                break;
            }
            ent.traces.push_back(point_count(m, s));
        }
        tbl.entries[(size_t)(x * q + y)] = std::move(ent);
    };

    // classes are independent; fan out over x-stripes, each writing disjoint
    // entries (the slot/valuation caches are internally locked)
    unsigned workers = std::min(4u, std::max(1u, std::thread::hardware_concurrency()));
    if (workers > 1 && q >= 17) {
        // warm the shared caches once to avoid duplicated first-touch work
        fill_class(0, 1);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (i64 x = (i64)w; x < q; x += workers)
                        for (i64 y = 0; y < q; ++y) {
                            if ((x == 0 && y == 0) || (x == 0 && y == 1)) continue;
                            fill_class(x, y);
                        }
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    } else {
        for (i64 x = 0; x < q; ++x)
            for (i64 y = 0; y < q; ++y) {
                if (x == 0 && y == 0) continue;
                fill_class(x, y);
            }
    }
    {
        std::lock_guard<std::mutex> lock(mtx);
        cache.emplace(std::make_pair(kind, q), tbl);
    }
    return tbl;
}

}  // namespace frey
