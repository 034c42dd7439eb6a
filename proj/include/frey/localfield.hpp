// Prime ideal slots, residue fields, reduction maps and normalized valuations
// for the registered number fields. Unramified slots get their valuations via
// Hensel-lifted factors; the handful of ramified slots the pipeline needs are
// registered with explicit uniformizers and verified at startup.
#pragma once

#include <climits>
#include <map>
#include <mutex>
#include <optional>

#include "fq.hpp"
#include "numfield.hpp"

namespace frey {

struct UnsupportedPrime : std::runtime_error {
    explicit UnsupportedPrime(const std::string& w) : std::runtime_error(w) {}
};
struct NegativeValuation : std::runtime_error {
    NegativeValuation() : std::runtime_error("element is not integral at this slot") {}
};
struct NotSimpleRoot : std::runtime_error {
    NotSimpleRoot() : std::runtime_error("hensel_lift: root is not simple mod q") {}
};
struct PrecisionExhausted : std::runtime_error {
    PrecisionExhausted() : std::runtime_error("p-adic precision limit reached; unexpectedly deep valuation") {}
};
struct ZeroElement : std::runtime_error {
    ZeroElement() : std::runtime_error("valuation of zero") {}
};

struct PrimeSlot {
    FieldId fid = FieldId::Q;
    i64 q = 2;
    int index = 0;  // position in the deterministic factor ordering
    int e = 1;      // ramification index
    int f = 1;      // residue degree
    FqPoly factor;  // irreducible factor of the defining polynomial mod q

    bool operator<(const PrimeSlot& o) const {
        return std::tie(fid, q, index) < std::tie(o.fid, o.q, o.index);
    }
    bool operator==(const PrimeSlot& o) const {
        return fid == o.fid && q == o.q && index == o.index;
    }
    Int norm() const { return int_pow(Int(q), f); }
};

namespace localdetail {

struct SlotExtra {
    std::optional<NFElem> uniformizer;                  // for e > 1
    std::optional<FqPoly> residue_modulus;              // override (hand-registered)
    std::optional<ResidueField::Elem> gen_image;        // image of the field generator
    std::optional<std::vector<std::vector<Rat>>> local_basis;  // power -> q-maximal basis
};

// (fid, q) pairs whose slot data is hand-registered rather than derived from
// factoring the defining polynomial (q divides the index [O_K : Z[theta]],
// or we need an explicit uniformizer).
inline const std::map<std::pair<FieldId, i64>, SlotExtra>& extras() {
    static const auto table = [] {
        std::map<std::pair<FieldId, i64>, SlotExtra> m;
        // sqrt5 = 2*omega - 1 uniformizes the ramified prime over 5
        m[{FieldId::Qsqrt5, 5}].uniformizer = NFElem(FieldId::Qsqrt5, {Rat(-1), Rat(2)});
        // w uniformizes 13 in Q(sqrt13)
        m[{FieldId::Qsqrt13, 13}].uniformizer = NFElem::gen(FieldId::Qsqrt13);
        // z - 4 uniformizes the totally ramified 13 in K
        m[{FieldId::CubicK, 13}].uniformizer =
            NFElem(FieldId::CubicK, {Rat(-4), Rat(1), Rat(0)});
        // 1 - zeta uniformizes 13 in Q(zeta13)
        {
            std::vector<Rat> c(12, Rat(0));
            c[0] = 1;
            c[1] = -1;
            m[{FieldId::Zeta13, 13}].uniformizer = NFElem(FieldId::Zeta13, std::move(c));
        }
        // 2 is inert in Q(sqrt13) but divides [O : Z[w]]: register the slot by
        // hand with residue field F_4 = F_2[t]/(t^2+t+1), w -> 1, and the
        // 2-maximal basis (1, (1+w)/2).
        {
            SlotExtra ex;
            ex.residue_modulus = FqPoly(2, {1, 1, 1});
            ex.gen_image = ResidueField::Elem{1, 0};
            ex.local_basis = std::vector<std::vector<Rat>>{
                {Rat(1), Rat(-1)},  // coords of x in (1, theta): u = c0 - c1
                {Rat(0), Rat(2)},   //                            v = 2*c1
            };
            m[{FieldId::Qsqrt13, 2}] = std::move(ex);
        }
        return m;
    }();
    return table;
}

inline const std::map<FieldId, std::vector<i64>>& excluded_primes() {
    // primes dividing the index obstruction of the registered power basis
    static const std::map<FieldId, std::vector<i64>> m = {
        {FieldId::Q, {}},       {FieldId::Qsqrt5, {}}, {FieldId::Qsqrt13, {2}},
        {FieldId::CubicK, {}},  {FieldId::Zeta13, {}},
    };
    return m;
}

inline FqPoly defining_mod_q(FieldId fid, i64 q) {
    const QPoly& f = field_spec(fid).defining;
    std::vector<i64> c(f.degree() + 1);
    for (int i = 0; i <= f.degree(); ++i) {
        Rat r = f.coeff(i);
        if (r.get_den() != 1) throw std::logic_error("defining polynomial not integral");
        c[i] = mod_pos(mpz_fdiv_ui(r.get_num().get_mpz_t(), (unsigned long)q), q);
    }
    return FqPoly(q, std::move(c));
}

}  // namespace localdetail

// Factors the defining polynomial mod q; one slot per distinct irreducible
// factor, in the (degree, coefficient tuple) order. Hand-registered slots are
// returned for the index-obstructed primes.
inline std::vector<PrimeSlot> prime_split(FieldId fid, i64 q) {
    if (q < 2 || !is_prime(Int(q))) throw UnsupportedPrime("q is not prime");
    static std::map<std::pair<FieldId, i64>, std::vector<PrimeSlot>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(fid, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<PrimeSlot> slots;
    const auto& excl = localdetail::excluded_primes().at(fid);
    bool excluded = std::find(excl.begin(), excl.end(), q) != excl.end();
    auto exit = localdetail::extras().find(key);
    if (excluded) {
        if (exit == localdetail::extras().end() || !exit->second.residue_modulus)
            throw UnsupportedPrime("prime divides the power basis index and has no registered data");
        // single hand-registered slot (inert 2 in Q(sqrt13))
        PrimeSlot s;
        s.fid = fid;
        s.q = q;
        s.index = 0;
        s.e = 1;
        s.f = exit->second.residue_modulus->deg();
        s.factor = *exit->second.residue_modulus;
        slots.push_back(std::move(s));
    } else {
        FqPoly f = localdetail::defining_mod_q(fid, q);
        auto factors = fq_factor(f);
        int idx = 0, efsum = 0;
        for (auto& [fac, mult] : factors) {
            PrimeSlot s;
            s.fid = fid;
            s.q = q;
            s.index = idx++;
            s.e = mult;
            s.f = fac.deg();
            s.factor = fac;
            efsum += s.e * s.f;
            slots.push_back(std::move(s));
        }
        if (efsum != field_spec(fid).degree)
            throw std::logic_error("prime_split: sum e*f != degree");
        for (auto& s : slots)
            if (s.e > 1) {
                auto ex = localdetail::extras().find(key);
                if (ex == localdetail::extras().end() || !ex->second.uniformizer)
                    throw UnsupportedPrime("ramified prime without a registered uniformizer");
            }
    }
    cache.emplace(key, slots);
    return slots;
}

inline ResidueField residue_field(const PrimeSlot& slot) {
    ResidueField rf;
    rf.q = slot.q;
    rf.f = slot.f;
    rf.modulus = slot.factor;
    return rf;
}

// Image of x under the residue map (generator -> root of the slot factor).
// Requires denominators coprime to q.
inline ResidueField::Elem reduce_element(const NFElem& x, const PrimeSlot& slot) {
    ResidueField rf = residue_field(slot);
    ResidueField::Elem gen;
    auto ex = localdetail::extras().find({slot.fid, slot.q});
    if (ex != localdetail::extras().end() && ex->second.gen_image)
        gen = *ex->second.gen_image;
    else
        gen = rf.gen();

    ResidueField::Elem acc = rf.zero();
    for (int i = (int)x.c.size() - 1; i >= 0; --i) {
        acc = rf.mul(acc, gen);
        const Rat& r = x.c[i];
        i64 den = (i64)mpz_fdiv_ui(r.get_den().get_mpz_t(), (unsigned long)slot.q);
        if (den == 0) throw NegativeValuation();
        i64 num = (i64)mpz_fdiv_ui(r.get_num().get_mpz_t(), (unsigned long)slot.q);
        i64 v = mul_mod(num, inv_mod_i(den, slot.q), slot.q);
        acc = rf.add(acc, rf.from_int(v));
    }
    return acc;
}

// Lift of a simple root of poly mod q to a root mod q^N (Newton iteration).
inline Int hensel_lift(const QPoly& poly, const Int& root_mod_q, i64 q, int N) {
    Int M(q);
    Int r = mod_floor(root_mod_q, M);
    auto evalmod = [&](const QPoly& p, const Int& x, const Int& mod) {
        Int acc = 0;
        for (int i = p.degree(); i >= 0; --i) {
            if (p.coeff(i).get_den() != 1) throw std::logic_error("hensel_lift: non-integral polynomial");
            acc = mod_floor(acc * x + p.coeff(i).get_num(), mod);
        }
        return acc;
    };
    QPoly dp = derivative(poly);
    if (evalmod(poly, r, M) != 0) throw NotSimpleRoot();
    if (evalmod(dp, r, M) == 0) throw NotSimpleRoot();
    int prec = 1;
    while (prec < N) {
        int next = std::min(2 * prec, N);
        Int M2 = int_pow(Int(q), (unsigned long)next);
        Int fr = evalmod(poly, r, M2);
        Int dr = evalmod(dp, r, M2);
        r = mod_floor(r - fr * inv_mod(dr, M2), M2);
        prec = next;
        M = M2;
    }
    if (evalmod(poly, r, M) != 0) throw std::logic_error("hensel_lift: lift failed");
    return r;
}

namespace localdetail {

// integer polynomials mod q^N, low-to-high
struct LiftCtx {
    Int M;                 // q^N
    int N;
    std::vector<Int> h;    // lifted slot factor, monic
};

inline std::vector<Int> zpoly_of(const QPoly& p, const Int& M, const Int& den_clear) {
    std::vector<Int> c(p.degree() + 1);
    for (int i = 0; i <= p.degree(); ++i) {
        Rat r = p.coeff(i) * Rat(den_clear);
        if (r.get_den() != 1) throw std::logic_error("zpoly_of: denominators survived");
        c[i] = mod_floor(r.get_num(), M);
    }
    return c;
}

inline std::vector<Int> zp_mul(const std::vector<Int>& a, const std::vector<Int>& b, const Int& M) {
    if (a.empty() || b.empty()) return {};
    std::vector<Int> r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = mod_floor(r[i + j] + a[i] * b[j], M);
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// remainder of a by monic b, coefficients mod M
inline std::vector<Int> zp_mod(std::vector<Int> a, const std::vector<Int>& b, const Int& M) {
    int db = (int)b.size() - 1;
    while ((int)a.size() - 1 >= db) {
        Int f = a.back();
        int k = (int)a.size() - 1 - db;
        for (int i = 0; i <= db; ++i) a[i + k] = mod_floor(a[i + k] - f * b[i], M);
        while (!a.empty() && a.back() == 0) a.pop_back();
    }
    return a;
}

// Hensel-lift the coprime factorization defining = h * c from mod q to mod q^N.
inline LiftCtx lift_factor(FieldId fid, i64 q, const FqPoly& fac, int N) {
    LiftCtx ctx;
    ctx.N = N;
    ctx.M = int_pow(Int(q), (unsigned long)N);
    const QPoly& defining = field_spec(fid).defining;
    // whole polynomial is the factor: nothing to lift
    FqPoly fbar = defining_mod_q(fid, q);
    FqPoly cbar = fq_divmod(fbar, fac).first;
    if (!(fq_mod(fbar, fac).is_zero())) throw std::logic_error("lift_factor: not a factor");
    if (fq_gcd(fac, cbar).deg() != 0) throw std::logic_error("lift_factor: factor not coprime to cofactor");

    // Bezout a*h + b*c = 1 over F_q
    FqPoly r0 = fac, r1 = cbar;
    FqPoly s0(q, {1}), s1(q, {});
    FqPoly t0(q, {}), t1(q, {1});
    while (!r1.is_zero()) {
        auto [qq, rr] = fq_divmod(r0, r1);
        FqPoly s = s0 - qq * s1, t = t0 - qq * t1;
        r0 = r1; r1 = rr;
        s0 = s1; s1 = s;
        t0 = t1; t1 = t;
    }
    i64 li = inv_mod_i(r0.c[0], q);
    auto scale = [&](FqPoly p) {
        for (auto& x : p.c) x = mul_mod(x, li, q);
        return p;
    };
    FqPoly bez_a = scale(s0), bez_b = scale(t0);  // a*h + b*c = 1

    auto to_z = [&](const FqPoly& p) {
        std::vector<Int> v(p.c.size());
        for (size_t i = 0; i < p.c.size(); ++i) v[i] = Int(p.c[i]);
        return v;
    };
    std::vector<Int> h = to_z(fac), c = to_z(cbar);
    std::vector<Int> F(defining.degree() + 1);
    for (int i = 0; i <= defining.degree(); ++i) F[i] = defining.coeff(i).get_num();

    Int qk(q);
    for (int k = 1; k < N; ++k) {
        Int Mk1 = qk * q;
        // d = (F - h*c) / q^k  mod q
        std::vector<Int> hc = zp_mul(h, c, Mk1 * qk);  // enough headroom
        std::vector<Int> diff(F.size(), Int(0));
        for (size_t i = 0; i < diff.size(); ++i) {
            Int x = F[i] - (i < hc.size() ? hc[i] : Int(0));
            Int rem = mod_floor(x, Mk1);
            if (!mpz_divisible_p(rem.get_mpz_t(), qk.get_mpz_t()))
                throw std::logic_error("lift_factor: congruence failure");
            diff[i] = rem / qk;
        }
        FqPoly d(q, [&] {
            std::vector<i64> v(diff.size());
            for (size_t i = 0; i < diff.size(); ++i)
                v[i] = (i64)mpz_fdiv_ui(diff[i].get_mpz_t(), (unsigned long)q);
            return v;
        }());
        FqPoly u = fq_mod(bez_b * d, fac);
        // v = (d - u*cbar) / fac over F_q, exact
        FqPoly num = d - u * cbar;
        auto [vq, vr] = fq_divmod(num, fac);
        if (!vr.is_zero()) throw std::logic_error("lift_factor: correction not divisible");
        auto add_scaled = [&](std::vector<Int>& dst, const FqPoly& src) {
            if (dst.size() < src.c.size()) dst.resize(src.c.size(), Int(0));
            for (size_t i = 0; i < src.c.size(); ++i)
                dst[i] = mod_floor(dst[i] + qk * src.c[i], Mk1);
            for (auto& x : dst) x = mod_floor(x, Mk1);
        };
        add_scaled(h, u);
        add_scaled(c, vq);
        qk = Mk1;
    }
    ctx.h = h;
    for (auto& x : ctx.h) x = mod_floor(x, ctx.M);
    return ctx;
}

}  // namespace localdetail

// Normalized valuation v(x) at the slot, with v(uniformizer) = 1.
inline long padic_valuation(const NFElem& x, const PrimeSlot& slot) {
    if (x.fid != slot.fid) throw FieldMismatch();
    if (x.is_zero()) throw ZeroElement();
    const i64 q = slot.q;
    const Int Q(q);

    // clear q from denominators: v(x) = v(q^k x) - k*e
    long k = 0;
    for (const Rat& r : x.c)
        if (r != 0) k = std::max(k, val_q(Int(r.get_den()), Q));
    NFElem y = Rat(int_pow(Q, (unsigned long)k)) * x;

    auto ex = localdetail::extras().find({slot.fid, slot.q});

    long v;
    if (slot.e > 1) {
        // ramified registered slot: repeated exact division by the uniformizer,
        // unit detected through the residue map
        const NFElem& pi = *ex->second.uniformizer;
        long vmax = slot.e * (long)field_spec(slot.fid).degree * 64 + 64;
        v = 0;
        ResidueField rf = residue_field(slot);
        while (true) {
            ResidueField::Elem red = reduce_element(y, slot);
            if (!rf.is_zero(red)) break;
            y = y / pi;
            ++v;
            if (v > vmax) throw PrecisionExhausted();
        }
    } else if (ex != localdetail::extras().end() && ex->second.local_basis) {
        // hand-registered unramified slot: minimum valuation of the coordinates
        // in the registered q-maximal basis
        const auto& B = *ex->second.local_basis;
        v = LONG_MAX;
        for (size_t i = 0; i < B.size(); ++i) {
            Rat coord(0);
            for (size_t j = 0; j < y.c.size(); ++j) coord += B[i][j] * y.c[j];
            if (coord != 0) v = std::min(v, val_q(coord, Q));
        }
        if (v == LONG_MAX) throw ZeroElement();
    } else if (field_spec(slot.fid).degree == 1) {
        v = val_q(y.c[0], Q);
    } else {
        // unramified slot: image in the lifted unramified completion,
        // valuation = min q-adic valuation of the coefficients mod h_N
        static std::map<std::pair<PrimeSlot, int>, localdetail::LiftCtx> cache;
        static std::mutex mtx;
        int N = 24;
        const int Nmax = 1024 * slot.e;
        while (true) {
            localdetail::LiftCtx ctx;
            {
                std::lock_guard<std::mutex> lock(mtx);
                auto key = std::make_pair(slot, N);
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache.emplace(key, localdetail::lift_factor(slot.fid, q, slot.factor, N)).first;
                ctx = it->second;
            }
            // numerator coefficients with denominators inverted mod q^N
            std::vector<Int> g(y.c.size());
            for (size_t i = 0; i < y.c.size(); ++i) {
                Int den = y.c[i].get_den();
                Int num = y.c[i].get_num();
                g[i] = mod_floor(num * inv_mod(den, ctx.M), ctx.M);
            }
            std::vector<Int> r = localdetail::zp_mod(std::move(g), ctx.h, ctx.M);
            long minv = LONG_MAX;
            for (const Int& coef : r)
                if (coef != 0) minv = std::min(minv, val_q(coef, Q));
            if (minv < ctx.N) {
                v = minv;
                break;
            }
            if (N >= Nmax) throw PrecisionExhausted();
            N = std::min(2 * N, Nmax);
        }
    }
    return v - k * slot.e;
}

inline long padic_valuation(const Rat& x, const PrimeSlot& slot) {
    if (x == 0) throw ZeroElement();
    return val_q(x, Int(slot.q)) * slot.e;
}

// Startup verification of the ramified registered slots: v(q) = e, v(pi) = 1.
inline void verify_registered_slots() {
    struct Probe {
        FieldId fid;
        i64 q;
        int e_expect;
    };
    const Probe probes[] = {
        {FieldId::Qsqrt5, 5, 2},
        {FieldId::Qsqrt13, 13, 2},
        {FieldId::CubicK, 13, 3},
        {FieldId::Zeta13, 13, 12},
    };
    for (const auto& pr : probes) {
        auto slots = prime_split(pr.fid, pr.q);
        if (slots.size() != 1 || slots[0].e != pr.e_expect)
            throw std::logic_error("registered ramified slot has unexpected shape");
        const auto& pi = *localdetail::extras().at({pr.fid, pr.q}).uniformizer;
        if (padic_valuation(pi, slots[0]) != 1)
            throw std::logic_error("registered uniformizer is not one");
        if (padic_valuation(NFElem::from_rat(pr.fid, Rat(pr.q)), slots[0]) != pr.e_expect)
            throw std::logic_error("v(q) != e at registered slot");
    }
    // hand slot over 2 in Q(sqrt13): inert, theta = (1+w)/2 is a unit there
    auto s2 = prime_split(FieldId::Qsqrt13, 2);
    if (s2.size() != 1 || s2[0].f != 2 || s2[0].e != 1)
        throw std::logic_error("hand-registered slot (Qsqrt13, 2) has unexpected shape");
    NFElem theta(FieldId::Qsqrt13, {Rat(1, 2), Rat(1, 2)});
    if (padic_valuation(theta, s2[0]) != 0)
        throw std::logic_error("(1+w)/2 should be a unit at 2");
    if (padic_valuation(NFElem::from_rat(FieldId::Qsqrt13, 2), s2[0]) != 1)
        throw std::logic_error("v(2) != 1 at the inert slot over 2");
}

}  // namespace frey
