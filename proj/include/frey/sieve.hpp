// The elimination engine: trace-difference bounds over residue classes,
// refined elimination with auxiliary primes, level-raising and parity
// criteria, and the characteristic-polynomial irreducibility test.
#pragma once

#include "newformdb.hpp"
#include "trace.hpp"

namespace frey {

// gcd over the slots above q of |Norm(a_q(E) - a_q(f))|; zero when every
// normed difference vanishes.
inline Int bq(const std::vector<TraceRecord>& curve_traces, const NewformRecord& form, i64 q) {
    Int g(0);
    bool saw = false;
    for (const TraceRecord& t : curve_traces) {
        if (t.slot.q != q) continue;
        saw = true;
        std::vector<Rat> diff = eigenvalue_at(form, t.slot);
        for (auto& x : diff) x = -x;
        diff[0] += Rat(t.a);
        Rat nm = coeff_norm(form.coeff_poly, diff);
        if (nm.get_den() != 1)
            throw std::logic_error("bq: eigenvalue norm is not a rational integer");
        Int n = nm.get_num();
        if (n < 0) n = -n;
        g = gcd(g, n);
    }
    if (!saw) throw MissingEigenvalue("no traces above q supplied");
    return g;
}

// q times the product over all residue classes (x,y) != (0,0) of
// B_q(E_{x,y}, form); any p realizing a congruence divides the result.
inline Int exponent_bound(FreyKind kind, const NewformRecord& form, i64 q) {
    if (kind == FreyKind::F13)
        throw InadmissibleAuxPrime("the cubic curve has bad classes; use refined elimination");
    const TraceTable tbl = trace_table(kind, q);
    // the form side is constant across classes: hoist its eigenvalues and
    // memoize the per-trace norms
    std::vector<std::vector<Rat>> evs;
    for (const auto& s : tbl.slots) evs.push_back(eigenvalue_at(form, s));
    std::vector<std::map<long, Int>> norm_cache(tbl.slots.size());
    auto normed_diff = [&](size_t i, long a) -> const Int& {
        auto it = norm_cache[i].find(a);
        if (it == norm_cache[i].end()) {
            std::vector<Rat> diff = evs[i];
            for (auto& x : diff) x = -x;
            diff[0] += Rat(a);
            Rat nm = coeff_norm(form.coeff_poly, diff);
            if (nm.get_den() != 1)
                throw std::logic_error("exponent_bound: eigenvalue norm is not a rational integer");
            Int n = nm.get_num();
            if (n < 0) n = -n;
            it = norm_cache[i].emplace(a, std::move(n)).first;
        }
        return it->second;
    };
    Int prod(q);
    for (i64 x = 0; x < q && prod != 0; ++x)
        for (i64 y = 0; y < q; ++y) {
            if (x == 0 && y == 0) continue;
            const auto& ent = tbl.at(x, y);
            if (ent.multiplicative) throw std::logic_error("unexpected bad class");
            Int g(0);
            for (size_t i = 0; i < tbl.slots.size() && g != 1; ++i)
                g = gcd(g, normed_diff(i, ent.traces[i].a));
            prod *= g;
            if (prod == 0) break;
        }
    return prod;
}

struct SieveEvidence {
    i64 q;
    Int bound;  // q * product of class bounds
};

struct SieveResult {
    std::string label;
    Int bstar;                       // gcd of the per-q bounds
    bool all_p = false;              // bstar == 0: no information
    std::vector<long> survivors;     // primes >= p_floor dividing bstar
    std::vector<Int> large_factors;  // unfactored survivors beyond the trial bound
    std::vector<SieveEvidence> evidence;
};

inline SieveResult sieve_form(FreyKind kind, const NewformRecord& form,
                              const std::vector<i64>& aux_primes, i64 p_floor) {
    SieveResult res;
    res.label = form.label;
    Int g(0);
    for (i64 q : aux_primes) {
        Int b = exponent_bound(kind, form, q);
        res.evidence.push_back({q, b});
        g = gcd(g, b);
    }
    res.bstar = g;
    if (g == 0) {
        res.all_p = true;
        return res;
    }
    Int rest = g;
    for (i64 p = 2; p <= 100000 && rest > 1; ++p) {
        if (!is_prime(Int(p))) continue;
        bool divides = false;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), (unsigned long)p)) {
            rest /= (unsigned long)p;
            divides = true;
        }
        if (divides && p >= p_floor) res.survivors.push_back(p);
    }
    if (rest > 1) res.large_factors.push_back(rest);
    return res;
}

// --- refined elimination for the cubic-field curve -------------------------------

enum class SignMode { permissive, strict };

// true = the (form, p) pair is eliminated by the auxiliary prime q
inline bool refined_eliminate(const NewformRecord& form, i64 q, i64 p,
                              SignMode mode = SignMode::permissive) {
    if (q == 2 || q == 3 || q == 13 || q % 13 == 1 || !is_prime(Int(q)))
        throw UnsupportedPrime("auxiliary prime must avoid 2,3,13 and be != 1 mod 13");
    const TraceTable tbl = trace_table(FreyKind::F13, q);
    auto maps = coeff_field_primes(form, p);

    // eigenvalues at the slots above q, fixed order
    std::vector<std::vector<Rat>> evs;
    for (const auto& s : tbl.slots) evs.push_back(eigenvalue_at(form, s));

    for (const auto& rho : maps) {
        std::vector<ResidueField::Elem> fimg;
        for (const auto& ev : evs) fimg.push_back(rho.apply(ev));

        // (i): some class with q not dividing x+y matches all slot traces mod p
        bool cond_i = false;
        for (i64 x = 0; x < q && !cond_i; ++x)
            for (i64 y = 0; y < q && !cond_i; ++y) {
                if (x == 0 && y == 0) continue;
                if ((x + y) % q == 0) continue;
                const auto& ent = tbl.at(x, y);
                bool all = true;
                for (size_t i = 0; i < tbl.slots.size() && all; ++i)
                    all = fimg[i] == rho.rf.from_int(ent.traces[i].a);
                cond_i = all;
            }
        if (cond_i) return false;

        // (ii): a_q(f) = +-(Nq + 1) mod p at every slot; in strict mode one
        // global sign, by default a per-slot sign (weaker, hence sound)
        auto matches_sign = [&](int sgn) {
            for (size_t i = 0; i < tbl.slots.size(); ++i) {
                Int nq1 = tbl.slots[i].norm() + 1;
                i64 v = (i64)mpz_fdiv_ui(nq1.get_mpz_t(), (unsigned long)p) * sgn;
                if (!(fimg[i] == rho.rf.from_int(v))) return false;
            }
            return true;
        };
        bool cond_ii;
        if (mode == SignMode::strict) {
            cond_ii = matches_sign(1) || matches_sign(-1);
        } else {
            cond_ii = true;
            for (size_t i = 0; i < tbl.slots.size() && cond_ii; ++i) {
                Int nq1 = tbl.slots[i].norm() + 1;
                i64 v = (i64)mpz_fdiv_ui(nq1.get_mpz_t(), (unsigned long)p);
                cond_ii = fimg[i] == rho.rf.from_int(v) || fimg[i] == rho.rf.from_int(-v);
            }
        }
        if (cond_ii) return false;
    }
    return true;  // no residue map admits either condition
}

// --- level raising, parity, multiplicative congruence ----------------------------

// necessary condition for level raising at p mod p: a_p = +-1 (mod some p | p)
inline bool levelraising_check(const QPoly& coeff_poly, const std::vector<Rat>& a_p, i64 p) {
    NewformRecord tmp;
    tmp.coeff_poly = coeff_poly;
    for (const auto& rho : coeff_field_primes(tmp, p)) {
        auto img = rho.apply(a_p);
        if (img == rho.rf.from_int(1) || img == rho.rf.from_int(-1)) return true;
    }
    return false;
}

inline bool levelraising_check(long a_p, i64 p) {
    return levelraising_check(QPoly({Rat(0), Rat(1)}), {Rat(a_p)}, p);
}

// compatibility of level lowering at a multiplicative prime ell:
// p | (ell+1)^2 - a_ell^2
inline bool mult_congruence_check(long a_ell_form, i64 ell, i64 p) {
    Int v = Int(ell + 1) * Int(ell + 1) - Int(a_ell_form) * Int(a_ell_form);
    return mpz_divisible_ui_p(v.get_mpz_t(), (unsigned long)p);
}

// at least one of x^2 - t x + nrm is irreducible over F_p
inline bool charpoly_pair_irreducible(long t1, long t2, long nrm, i64 p) {
    auto irred = [&](long t) {
        Int disc = Int(t) * Int(t) - 4 * Int(nrm);
        Int d = mod_floor(disc, Int(p));
        if (d == 0) return false;
        return legendre(d, Int(p)) == -1;
    };
    return irred(t1) || irred(t2);
}

// --- the level 50/200/400 second-case argument ------------------------------------

inline std::vector<EliminationStep> second_case_report(const Int& d,
                                                       const std::vector<RationalCurveEntry>& db) {
    if (d != 1 && d != 2) throw HypothesisViolated("d must be 1 or 2");
    std::vector<Int> levels = (d == 1) ? std::vector<Int>{50, 200, 400} : std::vector<Int>{50, 400};
    for (const Int& N : levels) {
        bool found = false;
        for (const auto& e : db) found |= (e.conductor == N);
        if (!found) throw IncompleteDatabase("no curves of conductor " + to_str(N) + " supplied");
    }

    std::vector<EliminationStep> steps;
    for (const auto& e : db) {
        bool relevant = false;
        for (const Int& N : levels) relevant |= (e.conductor == N);
        if (!relevant) continue;
        if (!e.two_torsion) {
            long a3 = e.traces.at(3);
            if (a3 != 1 && a3 != -1 && a3 != 3 && a3 != -3)
                throw VerificationFailure("curve without 2-torsion has unexpected a_3");
            // the Frey side has a rational 2-torsion point: a_3 lies in
            // {0, +-2} for good and {+-4} (as Nq+1 values) for multiplicative
            // reduction at 3, so |difference| <= 7: only p = 7 survives, and
            // only when a_3 = +-3
            if (a3 == 3 || a3 == -3) {
                bool lr7 = levelraising_check(e.traces.at(7), 7);
                if (lr7)
                    throw VerificationFailure("a curve with a_3 = +-3 passes the p = 7 screen");
                steps.push_back({e.label, "p >= 7", Criterion::mult_congruence,
                                 "a_3 = " + std::to_string(a3) +
                                     " vs {0,+-2,+-4}: only p = 7 possible; a_7 = " +
                                     std::to_string(e.traces.at(7)) + " != +-1 (mod 7)",
                                 "level raising necessary condition at p = 7", true});
            } else {
                steps.push_back({e.label, "p >= 7", Criterion::mult_congruence,
                                 "a_3 = " + std::to_string(a3) +
                                     " vs Frey-side {0,+-2,+-4}: difference has no prime factor >= 7",
                                 "", true});
            }
        } else {
            // rational 2-torsion: all good-reduction traces are even, so
            // a_p = +-1 (mod p) cannot hold for any p >= 7
            std::string parity_check = "a_q even for good q <= 100: ";
            bool all_even = true;
            for (const auto& [q, a] : e.traces) {
                Int N = e.conductor;
                if (mpz_divisible_ui_p(N.get_mpz_t(), (unsigned long)q)) continue;
                all_even &= (a % 2 == 0);
            }
            if (!all_even) throw VerificationFailure("curve with 2-torsion has an odd trace");
            steps.push_back({e.label, "all p >= 7", Criterion::parity,
                             "rational 2-torsion point; every good a_q checked even (q <= 100), "
                             "so a_p = +-1 (mod p) fails for all p >= 7",
                             "torsion injects into the reduction at good primes", true});
        }
    }
    return steps;
}

}  // namespace frey
