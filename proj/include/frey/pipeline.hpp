// Theorem pipelines: orchestration of the elimination steps for the three
// resolved equations, producing deterministic proof traces. Eigenvalue data
// is consumed when supplied; otherwise the surviving-form lists are
// instantiated from their curve realizations and marked as cited.
#pragma once

#include <filesystem>
#include <fstream>

#include "sieve.hpp"

namespace frey {

struct DataEnv {
    std::optional<std::string> data_dir;
    bool strict_no_cited = false;
    SignMode sign_mode = SignMode::permissive;

    std::optional<std::string> read(const std::string& name) const {
        if (!data_dir) return std::nullopt;
        std::filesystem::path p = std::filesystem::path(*data_dir) / name;
        if (!std::filesystem::exists(p)) return std::nullopt;
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
};

// Expected file names inside --data:
//   hilbert_qsqrt5_2e6.txt      level 2^6 over Q(sqrt5)
//   hilbert_qsqrt13_2e3w2.txt   level 2^3 w^2 over Q(sqrt13)
//   hilbert_qsqrt13_2e4w2.txt   level 2^4 w^2 over Q(sqrt13)
//   hilbert_cubic_2_3_q13.txt   level 2*3*q13 over the cubic field

namespace pipedetail {

inline std::string int_list(const std::vector<long>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

// the six twists surviving the level-2^6 sieve on the branch with good
// reduction over 5
inline std::vector<NewformRecord> e5_survivor_curves() {
    std::vector<NewformRecord> out;
    auto lvl = parse_level(FieldId::Qsqrt5, "2^6", 0);
    auto add = [&](const std::string& label, const Model& m) {
        out.push_back(curve_backed_form(label, m, lvl));
    };
    Model e10 = build_frey(FreyKind::E5, 1, 0).model;
    Model e11 = build_frey(FreyKind::E5, 1, 1).model;
    add("E5(1,0)", e10);
    add("E5(1,0)tw-1", quadratic_twist(e10, -1));
    add("E5(1,0)tw2", quadratic_twist(e10, 2));
    add("E5(1,0)tw-2", quadratic_twist(e10, -2));
    add("E5(1,1)", e11);
    add("E5(1,1)tw2", quadratic_twist(e11, 2));
    return out;
}

inline std::vector<NewformRecord> f5_survivor_curves() {
    std::vector<NewformRecord> out;
    auto lvl = parse_level(FieldId::Qsqrt5, "2^6", 0);
    Model f = build_frey(FreyKind::F5, 1, -1).model;
    out.push_back(curve_backed_form("F5(1,-1)", f, lvl));
    out.push_back(curve_backed_form("F5(1,-1)tw2", quadratic_twist(f, 2), lvl));
    return out;
}

inline std::vector<NewformRecord> e13_survivor_curves() {
    std::vector<NewformRecord> out;
    auto l3 = parse_level(FieldId::Qsqrt13, "2^3,13.0^2", 0);
    auto l4 = parse_level(FieldId::Qsqrt13, "2^4,13.0^2", 0);
    out.push_back(curve_backed_form("E13(1,-1)", build_frey(FreyKind::E13, 1, -1).model, l3));
    out.push_back(curve_backed_form("E13(1,0)", build_frey(FreyKind::E13, 1, 0).model, l3));
    out.push_back(curve_backed_form("E13(1,1)", build_frey(FreyKind::E13, 1, 1).model, l4));
    return out;
}

// the residue class of a pair mod q never changes the trace: pick up the
// trace of a Frey curve at every class with m | x+y
inline std::set<long> traces_on_divisible_classes(FreyKind kind, i64 q, int slot_index) {
    TraceTable t = trace_table(kind, q);
    std::set<long> vals;
    for (i64 x = 0; x < q; ++x)
        for (i64 y = 0; y < q; ++y) {
            if ((x == 0 && y == 0) || (x + y) % q != 0) continue;
            vals.insert(t.at(x, y).traces[slot_index].a);
        }
    return vals;
}

// a_3 of the W-curve twisted by -1, over every residue class compatible with
// a primitive solution (classes mod 3 arising from coprime pairs)
inline std::set<long> w_twisted_a3_set() {
    std::set<long> vals;
    for (long a = -12; a <= 12; ++a)
        for (long b = -12; b <= 12; ++b) {
            if (gcd(Int(a), Int(b)) != 1 || a + b == 0) continue;
            if (mod_floor(Int(a) * Int(b), Int(4)) != 2) continue;  // v2(ab) = 1
            Model w = build_frey(FreyKind::W, a, b).model;
            vals.insert(frobenius_trace_Q(quadratic_twist(w, -1), 3));
        }
    return vals;
}

// 3 | phi_r(x, y) forces 3 | x + y: enumerated over all classes mod 3
inline bool three_forces_apb(int r, std::string& evidence) {
    const auto& F = FreyFormulas::instance();
    const HForm& phi = (r == 5) ? F.phi5_Q : F.phi13_Q;
    evidence = "phi_" + std::to_string(r) + "(x,y) mod 3 on classes with 3 not | x+y:";
    for (long x = 0; x < 3; ++x)
        for (long y = 0; y < 3; ++y) {
            if ((x == 0 && y == 0) || (x + y) % 3 == 0) continue;
            Rat v = phi.eval(x, y).rational_value();
            Int residue = mod_floor(Int(v.get_num()), Int(3));
            evidence += " (" + std::to_string(x) + "," + std::to_string(y) + ")->" + to_str(residue);
            if (residue == 0) return false;
        }
    return true;
}

}  // namespace pipedetail

// ---------------------------------------------------------------------------
// x^5 + y^5 = 3 z^p

inline ProofTrace prove_r5(const DataEnv& env) {
    using namespace pipedetail;
    ProofTrace tr;
    tr.equation = "x^5 + y^5 = 3 z^p";
    tr.r = 5;
    tr.d = 3;

    tr.cite("small exponents", "p = 2", "no nontrivial primitive solutions",
            "Bennett-Skinner 2004, Thm. 1.1");
    tr.cite("small exponents", "p = 3", "no nontrivial primitive solutions",
            "Bennett-Vatsal-Yazdani 2004, Thm. 1.5");
    tr.cite("small exponents", "p = 5", "no nontrivial primitive solutions",
            "Dirichlet 1828, Thm. IX");

    // 3 | d forces 3 | a+b
    std::string ev;
    if (!three_forces_apb(5, ev)) throw VerificationFailure("phi5 enumeration failed");
    tr.add({"3 | a+b", "p >= 7", Criterion::trace_gcd, ev,
            "3 | a^5+b^5 and 3 never divides phi5 off the diagonal", true});

    // trace of the Frey curve over sqrt5 at the inert prime 3
    auto a3E = traces_on_divisible_classes(FreyKind::E5, 3, 0);
    if (a3E != std::set<long>{6})
        throw VerificationFailure("a_3 of the sqrt5 Frey curve should be 6 on 3 | a+b classes");
    tr.add({"a_3(E_{a,b}) = 6", "p >= 7", Criterion::trace_gcd,
            "point count over F_9 on every class with 3 | x+y", "", true});

    // branch 5 not | a+b: the six survivors at level 2^6 all have a_3 = 4
    bool fallback_used = false;
    std::vector<NewformRecord> esurv;
    auto slot3 = prime_split(FieldId::Qsqrt5, 3)[0];
    if (auto text = env.read("hilbert_qsqrt5_2e6.txt")) {
        auto forms = parse_hilbert_db(*text);
        std::vector<i64> aux = {3, 7, 13, 17, 19, 23, 29};
        std::vector<std::string> surv_labels;
        for (const auto& f : forms) {
            SieveResult sr = sieve_form(FreyKind::E5, f, aux, 7);
            if (sr.all_p || !sr.survivors.empty() || !sr.large_factors.empty()) {
                esurv.push_back(f);
                surv_labels.push_back(f.label);
            }
        }
        if (esurv.size() != 6)
            throw VerificationFailure("level 2^6 sieve: expected 6 surviving forms for p >= 7, got " +
                                      std::to_string(esurv.size()));
        std::string lbls;
        for (const auto& s : surv_labels) lbls += s + " ";
        tr.add({"level 2^6 sieve (5 not | a+b branch)", "p >= 7", Criterion::trace_gcd,
                "aux q in {3,7,13,17,19,23,29}: survivors " + lbls, "supplied eigenvalue data", true});
    } else {
        fallback_used = true;
        esurv = e5_survivor_curves();
        tr.cite("level 2^6 survivor list (5 not | a+b branch)", "p >= 7",
                "six forms, realized by twists of the Frey curve at (1,0) and (1,1)",
                "level 2^6 newform computation over Q(sqrt5), not rerun here");
    }
    for (const auto& f : esurv) {
        std::vector<Rat> a3 = eigenvalue_at(f, slot3);
        if (!f.is_rational() || a3[0] != 4)
            throw VerificationFailure("survivor " + f.label + " should have a_3 = 4");
    }
    tr.add({"eliminate the 5 not | a+b branch", "p >= 7", Criterion::trace_gcd,
            "a_3(f) = 4 for all six survivors vs a_3(E_{a,b}) = 6: p | 2; hence 5 | a+b", "", true});

    // the W chain under 5 | a+b
    tr.cite("W-curve level lowering", "p >= 7",
            "v_2(ab) = 1 and the mod-p representation matches a conductor-1200 class",
            "Billerey 2007, Sec. 2-3; Billerey-Dieulefait 2010, Lemma 4.4");
    tr.cite("exponent floor", "p >= 7", "p > 10^7 for any surviving exponent",
            "Billerey-Dieulefait 2010, Remark 4.6");

    Model w0 = Model::from_rat(FieldId::Q, 0, 1, 0, 592, -16812);
    if (conductor_Q(w0) != 1200) throw VerificationFailure("W0 should have conductor 1200");

    // version-1 inertia comparison at 2, for the record: the potentially good
    // side only bounds the order inside {2,3,4,6,8,24}, which meets the Tate
    // curve's {2, 2p}, so it certifies nothing on its own
    {
        // v_2(ab) = 1 forces v_2(j(W)) >= 0: potentially good at 2
        ReductionClass pg;
        pg.kind = RedKind::additive;
        pg.potential = Potential::potentially_good;
        InertiaProfile frey_side = inertia_order_set(pg, 8, 2, 11);
        // the 1200-level curve is additive at 2 with negative j-valuation
        long vj_w0 = val_q(invariants(w0).j.rational_value(), Int(2));
        if (vj_w0 >= 0) throw VerificationFailure("W0 should have v_2(j) < 0");
        ReductionClass pm;
        pm.kind = RedKind::additive;
        pm.potential = Potential::potentially_multiplicative;
        InertiaProfile w0_side = inertia_order_set(pm, tate_conductor_Q(w0, 2).vdelta_min, 2, 11);
        bool disjoint = inertia_v1_disjoint(frey_side, w0_side);
        if (disjoint)
            throw VerificationFailure("the order-2 overlap at 2 should prevent a version-1 certificate");
        tr.add({"inertia orders at 2 (advisory)", "p >= 7", Criterion::inertia_v1,
                "W side in {2,3,4,6,8,24} vs {2,2p} for the 1200-level curve with v_2(j) = " +
                    std::to_string(vj_w0) + " < 0: not disjoint, so no certificate from order "
                    "counts alone",
                "advisory only; the twist-trace comparison below decides", true});
    }

    long a3tw = frobenius_trace_Q(quadratic_twist(w0, -1), 3);
    if (a3tw != -1) throw VerificationFailure("a_3(W0 twisted by -1) should be -1");
    auto fset = w_twisted_a3_set();
    if (fset != std::set<long>{-2, 1, 2})
        throw VerificationFailure("twisted Frey-side a_3 set should be {1, +-2}");
    tr.add({"eliminate the 5 | a+b branch", "p >= 7", Criterion::trace_gcd,
            "a_3(W0 x chi_{-1}) = -1 vs Frey-side twisted a_3 in {1,+-2}: p | 2 or p | 3",
            "conductor of W0 recomputed = 1200", true});

    tr.add({"contradiction", "p >= 7", Criterion::trace_gcd,
            "5 | a+b and 5 not | a+b cannot both hold", "", true});

    if (env.strict_no_cited && fallback_used)
        tr.verdict = Verdict::data_missing;
    else
        tr.verdict = Verdict::resolved;
    return tr;
}

// ---------------------------------------------------------------------------
// x^13 + y^13 = 3 z^p

namespace pipedetail {

// exponent bound for the cubic-field curve: multiplicative classes contribute
// the level-raising style factor Norm(a_q(f)^2 - (Nq+1)^2)
inline Int f13_exponent_bound(const NewformRecord& form, i64 q) {
    TraceTable tbl = trace_table(FreyKind::F13, q);
    std::vector<std::vector<Rat>> evs;
    for (const auto& s : tbl.slots) evs.push_back(eigenvalue_at(form, s));
    auto normed_shift = [&](size_t i, const Rat& c) {
        std::vector<Rat> e = evs[i];
        e[0] += c;
        Rat nm = coeff_norm(form.coeff_poly, e);
        if (nm.get_den() != 1) throw std::logic_error("non-integral norm");
        Int n = nm.get_num();
        return n < 0 ? Int(-n) : n;
    };
    std::vector<std::map<long, Int>> cache(tbl.slots.size());
    Int mult_factor(0);
    {
        // the multiplicative-class factor does not depend on the class
        Int g(0);
        for (size_t i = 0; i < tbl.slots.size(); ++i) {
            Rat nq1 = Rat(Int(tbl.slots[i].norm() + 1));
            g = gcd(g, Int(normed_shift(i, -nq1) * normed_shift(i, nq1)));
        }
        mult_factor = g;
    }
    Int prod(q);
    for (i64 x = 0; x < q && prod != 0; ++x)
        for (i64 y = 0; y < q; ++y) {
            if (x == 0 && y == 0) continue;
            const auto& ent = tbl.at(x, y);
            if (ent.multiplicative) {
                prod *= mult_factor;
                if (prod == 0) break;
                continue;
            }
            Int g(0);
            for (size_t i = 0; i < tbl.slots.size() && g != 1; ++i) {
                auto it = cache[i].find(ent.traces[i].a);
                if (it == cache[i].end())
                    it = cache[i].emplace(ent.traces[i].a, normed_shift(i, Rat(-ent.traces[i].a))).first;
                g = gcd(g, it->second);
            }
            prod *= g;
            if (prod == 0) break;
        }
    return prod;
}

}  // namespace pipedetail

inline ProofTrace prove_r13(const DataEnv& env) {
    using namespace pipedetail;
    ProofTrace tr;
    tr.equation = "x^13 + y^13 = 3 z^p";
    tr.r = 13;
    tr.d = 3;

    tr.cite("small exponents", "p = 2", "no nontrivial primitive solutions",
            "Bennett-Skinner 2004, Thm. 1.1");
    tr.cite("small exponents", "p = 3", "no nontrivial primitive solutions",
            "Bennett-Vatsal-Yazdani 2004, Thm. 1.5");
    tr.cite("small exponents", "p = 13", "no nontrivial primitive solutions",
            "Serre 1987, Sec. 4.3 Thm. 2");

    std::string ev;
    if (!three_forces_apb(13, ev)) throw VerificationFailure("phi13 enumeration failed");
    tr.add({"3 | a+b", "p >= 5", Criterion::trace_gcd, ev,
            "3 | a^13+b^13 and 3 never divides phi13 off the diagonal", true});

    auto slots3 = prime_split(FieldId::Qsqrt13, 3);
    auto aq1 = traces_on_divisible_classes(FreyKind::E13, 3, 0);
    if (aq1 != std::set<long>{-3})
        throw VerificationFailure("a_q1 of the sqrt13 curve should be -3 on 3 | a+b classes");
    tr.add({"a_q1(E_{a,b}) = -3", "p >= 5", Criterion::trace_gcd,
            "point count at the slot above 3 containing w+1, every class with 3 | x+y", "", true});

    bool fallback_used = false;
    std::vector<NewformRecord> survivors;  // at both sqrt13 levels
    std::vector<std::string> p7_only;      // labels of forms alive only at p = 7
    auto sieve_level = [&](const std::string& file, const std::vector<i64>& aux,
                           const char* what) -> bool {
        auto text = env.read(file);
        if (!text) return false;
        auto forms = parse_hilbert_db(*text);
        std::string lbls;
        for (const auto& f : forms) {
            SieveResult sr = sieve_form(FreyKind::E13, f, aux, 7);
            if (sr.all_p) {
                survivors.push_back(f);
                lbls += f.label + " ";
            } else if (!sr.survivors.empty() || !sr.large_factors.empty()) {
                bool only7 = sr.large_factors.empty() && sr.survivors == std::vector<long>{7};
                if (!only7)
                    throw VerificationFailure("unexpected survivor spectrum for " + f.label);
                p7_only.push_back(f.label);
                lbls += f.label + "(p=7) ";
            }
        }
        tr.add({what, "p >= 7", Criterion::trace_gcd, "survivors: " + lbls,
                "supplied eigenvalue data", true});
        return true;
    };
    bool have3 = sieve_level("hilbert_qsqrt13_2e3w2.txt", {3, 17, 23, 29}, "level 2^3 w^2 sieve");
    bool have4 =
        sieve_level("hilbert_qsqrt13_2e4w2.txt", {3, 17, 23, 29, 43, 61}, "level 2^4 w^2 sieve");
    if (!have3 || !have4) {
        fallback_used = true;
        survivors = e13_survivor_curves();
        p7_only = {"g"};
        tr.cite("level 2^s w^2 survivor lists", "p >= 7",
                "survivors: the Frey curve at (1,-1), (1,0) at level 2^3 w^2, at (1,1) at level "
                "2^4 w^2, plus one non-rational form g (coefficients in Q(sqrt2)) alive only at p=7",
                "level 2^s w^2 newform computation over Q(sqrt13), not rerun here");
    }

    // a_q1 comparison: -3 vs -1 kills the (1,0) and (1,1) classes
    for (const auto& f : survivors) {
        std::vector<Rat> a = eigenvalue_at(f, slots3[0]);
        if (!f.is_rational()) throw VerificationFailure("rational survivor expected");
        if (a[0] != -1 && a[0] != -3)
            throw VerificationFailure("survivor " + f.label + " has unexpected a_q1");
    }
    tr.add({"reduce to the (1,-1) class", "p >= 5", Criterion::trace_gcd,
            "a_q1(E_{a,b}) = -3 while a_q1 = -1 for the forms of the (1,0) and (1,1) classes: p | 2",
            "", true});

    tr.cite("13 | a+b", "p >= 5, p != 7",
            "inertial field comparison over the real subfield of Q(zeta13) at the prime above 13",
            "Dieulefait-Freitas 2013, Prop. 3.1 with the version-2 inertia argument");
    tr.cite("4 | a+b", "p >= 5, p != 7",
            "conductor comparison over the degree-8 subfield of the 3-division field at 2",
            "version-3 inertia argument; division-field computation not rerun here");

    // level of the cubic-field curve under the accumulated constraints
    {
        //使用 representative pair satisfying 13 | a+b, 3 | a+b, v2(a+b) >= 3:
        // a+b = 312 = 8 * 3 * 13
        Int aa(313), bb(-1);
        auto lvl = serre_level(FreyKind::F13, aa, bb, 3, 11);
        if (lvl.candidates.size() != 1 || lvl.candidates[0].size() != 3)
            throw VerificationFailure("cubic level should be 2 * 3 * q13");
        for (const auto& [slot, e] : lvl.candidates[0])
            if (e != 1) throw VerificationFailure("cubic level should be squarefree");
        tr.add({"cubic-field level", "p >= 5", Criterion::trace_gcd,
                "conductor table at 13 | a+b, 3 | a+b, v_2(a+b) >= 3 gives level 2 * 3 * q13",
                "", true});
    }

    if (auto text = env.read("hilbert_cubic_2_3_q13.txt")) {
        auto forms = parse_hilbert_db(*text);
        std::vector<i64> aux = {5, 7, 11, 17, 31};
        std::map<long, std::vector<const NewformRecord*>> leftovers;  // p -> forms
        std::string lbls;
        for (const auto& f : forms) {
            Int g(0);
            for (i64 q : aux) g = gcd(g, f13_exponent_bound(f, q));
            if (g == 0)
                throw VerificationFailure("form " + f.label + " escapes the trace bound entirely");
            for (long p : {5L, 11L}) {
                Int pp(p);
                if (mpz_divisible_p(g.get_mpz_t(), pp.get_mpz_t())) {
                    leftovers[p].push_back(&f);
                    lbls += f.label + "(p=" + std::to_string(p) + ") ";
                }
            }
            // no exponent p >= 17 may survive the bound (7 and 13 are handled
            // by their own steps)
            Int rest = g;
            for (i64 p : {2, 3, 5, 7, 11, 13})
                while (mpz_divisible_ui_p(rest.get_mpz_t(), (unsigned long)p))
                    rest /= (unsigned long)p;
            if (rest != 1)
                throw VerificationFailure("form " + f.label + " survives at a prime >= 17");
        }
        tr.add({"cubic level trace sieve", "p >= 5, p not in {7, 13}", Criterion::trace_gcd,
                "aux q in {5,7,11,17,31}; leftover (form, p) pairs: " + lbls,
                "supplied eigenvalue data", true});
        // refined elimination
        for (const auto* f : leftovers[11]) {
            if (!refined_eliminate(*f, 5, 11, env.sign_mode))
                throw VerificationFailure("refined elimination at q = 5 failed for " + f->label);
        }
        if (!leftovers[11].empty())
            tr.add({"refined elimination, p = 11", "p = 11", Criterion::refined_i_ii,
                    "auxiliary prime q = 5 eliminates all leftover forms", "", true});
        for (const auto* f : leftovers[5]) {
            bool killed = false;
            std::string used;
            for (i64 q : {31, 47, 53}) {
                if (refined_eliminate(*f, q, 5, env.sign_mode)) {
                    killed = true;
                    used = std::to_string(q);
                    break;
                }
            }
            if (!killed)
                throw VerificationFailure("refined elimination failed for " + f->label + " at p = 5");
            tr.add({"refined elimination, p = 5: " + f->label, "p = 5", Criterion::refined_i_ii,
                    "eliminated with auxiliary prime q = " + used, "", true});
        }
    } else {
        fallback_used = true;
        tr.cite("cubic level elimination", "p >= 5, p not in {7, 13}",
                "trace sieve with q in {5,7,11,17,31} leaves forms only at p in {5, 11}; refined "
                "elimination with q = 5 (p = 11) and q in {31,47,53} (p = 5) removes them",
                "level 2*3*q13 newform computation over the cubic field, not rerun here");
    }

    tr.cite("p = 7 exclusion", "p = 7",
            "one level 2^3 w^2 form with coefficients in Q(sqrt2) cannot be separated from the "
            "Frey curve by trace comparisons",
            "excluded exponent; see the statement of the theorem");

    tr.excluded_p = {7};
    if (env.strict_no_cited && fallback_used)
        tr.verdict = Verdict::data_missing;
    else
        tr.verdict = Verdict::resolved_except_listed_p;
    return tr;
}

// ---------------------------------------------------------------------------
// x^5 + y^5 = d z^p with p | z, d in {1, 2}

inline ProofTrace prove_second_case(const Int& d, const std::vector<RationalCurveEntry>& db,
                                    const DataEnv&) {
    ProofTrace tr;
    tr.equation = "x^5 + y^5 = " + to_str(d) + " z^p with p | z";
    tr.r = 5;
    tr.d = d;

    tr.cite("small exponents", "p = 2", "no nontrivial solutions", "Bennett-Skinner 2004, Thm. 1.1");
    tr.cite("small exponents", "p = 3", "no nontrivial solutions",
            "Bennett-Vatsal-Yazdani 2004, Thm. 1.5");
    tr.cite("small exponents", "p = 5", "no nontrivial solutions with p | z",
            "Fermat's Last Theorem plus Darmon-Merel 1997");
    tr.cite("irreducibility and level lowering", "p >= 7",
            "the W-curve representation is irreducible and lands at level 50, 200 or 400",
            "Billerey 2007, Prop. 3.1, 3.3, 3.4");
    tr.cite("level raising at p", "p >= 7",
            "p | z forces a_p = +-1 (mod p) for the lowered form",
            "weight-2 semistable non-crystalline reduction; Breuil-Mezard Thm. 1.2 route");

    auto steps = second_case_report(d, db);
    for (auto& s : steps) tr.add(std::move(s));
    tr.verdict = Verdict::resolved;
    return tr;
}

}  // namespace frey
