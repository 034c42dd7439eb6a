#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "frey/sieve.hpp"

using namespace frey;

namespace {

NewformRecord synthetic_form(FieldId fid, const std::string& label,
                             std::map<std::pair<i64, int>, long> values) {
    NewformRecord rec;
    rec.label = label;
    rec.field = fid;
    rec.coeff_poly = QPoly({Rat(0), Rat(1)});
    for (auto& [key, a] : values) {
        auto slots = prime_split(fid, key.first);
        rec.eigenvalues[slots[key.second]] = {Rat(a)};
    }
    return rec;
}

}  // namespace

TEST_CASE("bq arithmetic") {
    auto slot3 = prime_split(FieldId::Qsqrt5, 3)[0];
    NewformRecord f = synthetic_form(FieldId::Qsqrt5, "f", {{{3, 0}, 4}});
    TraceRecord t;
    t.slot = slot3;
    t.a = 6;
    t.norm = 9;
    CHECK(bq({t}, f, 3) == 2);  // |N(6 - 4)| = 2

    // self-match gives zero
    t.a = 4;
    CHECK(bq({t}, f, 3) == 0);

    // split prime: gcd over the two slots
    auto slots = prime_split(FieldId::Qsqrt13, 3);
    NewformRecord g = synthetic_form(FieldId::Qsqrt13, "g", {{{3, 0}, 1}, {{3, 1}, -1}});
    TraceRecord t0, t1;
    t0.slot = slots[0];
    t0.a = -3;  // diff 4
    t1.slot = slots[1];
    t1.a = -1 - 6;  // not a real trace; diff 6 exercises the gcd
    CHECK(bq({t0, t1}, g, 3) == 2);

    // quadratic coefficient field: norm of the difference
    NewformRecord h;
    h.field = FieldId::Qsqrt5;
    h.coeff_poly = QPoly({Rat(-2), Rat(0), Rat(1)});  // x^2 - 2
    h.eigenvalues[slot3] = {Rat(1), Rat(1)};          // 1 + sqrt2
    t.a = 4;
    t.slot = slot3;
    CHECK(bq({t}, h, 3) == 7);  // N(3 - sqrt2) = 7
}

TEST_CASE("exponent bounds") {
    // a curve-backed form matching its own curve at some class gives zero
    auto e11 = curve_backed_form("E5(1,1)", frey_model_at(FreyKind::E5, 1, 1));
    CHECK(exponent_bound(FreyKind::E5, e11, 3) == 0);

    // zero eigenvalues at both slots over 3 for the sqrt13 curve: every class
    // contributes |(-3)(-1)| or |(-1)(-3)| or |(-1)(1)|, so the prime support
    // of the bound is {3}
    NewformRecord z = synthetic_form(FieldId::Qsqrt13, "z", {{{3, 0}, 0}, {{3, 1}, 0}});
    Int bound = exponent_bound(FreyKind::E13, z, 3);
    CHECK(bound != 0);
    Int b = bound;
    while (mpz_divisible_ui_p(b.get_mpz_t(), 3)) b /= 3;
    CHECK(b == 1);

    CHECK_THROWS_AS(exponent_bound(FreyKind::F13, z, 5), InadmissibleAuxPrime);
}

TEST_CASE("sieve soundness: a curve-backed form survives against its own curve") {
    auto f10 = curve_backed_form("E13(1,0)", frey_model_at(FreyKind::E13, 1, 0));
    std::vector<i64> aux;
    for (i64 q = 3; q <= 61; ++q) {
        try {
            check_aux_admissible(FreyKind::E13, q);
            aux.push_back(q);
        } catch (...) {
        }
    }
    for (i64 q : aux) CHECK(exponent_bound(FreyKind::E13, f10, q) == 0);
    SieveResult sr = sieve_form(FreyKind::E13, f10, aux, 7);
    CHECK(sr.all_p);
}

TEST_CASE("survivor monotonicity and determinism on synthetic data") {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<long> tr(-3, 3);
    std::vector<i64> aux_all = {3, 7, 17, 23};
    for (int trial = 0; trial < 20; ++trial) {
        std::map<std::pair<i64, int>, long> vals;
        for (i64 q : aux_all) {
            auto slots = prime_split(FieldId::Qsqrt5, q);
            for (int i = 0; i < (int)slots.size(); ++i) {
                long bound = (long)isqrt(Int(2) * slots[i].norm()).get_si();
                long a = tr(rng) % (2 * bound + 1);
                vals[{q, i}] = std::clamp(a, -bound, bound);
            }
        }
        NewformRecord f = synthetic_form(FieldId::Qsqrt5, "syn", vals);
        std::set<long> prev;
        bool prev_all = true;
        std::vector<i64> sofar;
        for (i64 q : aux_all) {
            sofar.push_back(q);
            SieveResult sr = sieve_form(FreyKind::E5, f, sofar, 7);
            std::set<long> cur(sr.survivors.begin(), sr.survivors.end());
            if (!prev_all && !sr.all_p) {
                // survivors shrink monotonically
                for (long p : cur) CHECK((prev.count(p) || !sr.large_factors.empty()));
            }
            if (!sr.all_p) {
                prev = cur;
                prev_all = false;
            }
        }
        // determinism: recomputation gives identical bounds
        SieveResult a = sieve_form(FreyKind::E5, f, aux_all, 7);
        SieveResult b = sieve_form(FreyKind::E5, f, {aux_all[2], aux_all[0], aux_all[3], aux_all[1]}, 7);
        CHECK(a.bstar == b.bstar);
    }
}

TEST_CASE("refined elimination") {
    // a form backed by the curve at (1,0): condition (i) holds at the witness
    // class, so it is never eliminated
    auto f10 = curve_backed_form("F13(1,0)", frey_model_at(FreyKind::F13, 1, 0));
    CHECK_FALSE(refined_eliminate(f10, 5, 11));
    CHECK_FALSE(refined_eliminate(f10, 7, 5));

    // synthetic form matching +-(Nq+1) at all slots: condition (ii) holds
    {
        auto slots = prime_split(FieldId::CubicK, 5);  // one slot, f = 3... 5 mod 13 = 5: splits
        NewformRecord f;
        f.field = FieldId::CubicK;
        f.coeff_poly = QPoly({Rat(0), Rat(1)});
        for (const auto& s : slots) {
            Int v = mod_floor(Int(s.norm() + 1), Int(11));
            f.eigenvalues[s] = {Rat(v)};
        }
        f.label = "nq1";
        CHECK_FALSE(refined_eliminate(f, 5, 11));
    }

    // a generic synthetic form is eliminated
    {
        auto slots = prime_split(FieldId::CubicK, 5);
        NewformRecord f;
        f.field = FieldId::CubicK;
        f.coeff_poly = QPoly({Rat(-2), Rat(0), Rat(1)});
        // sqrt2-valued eigenvalues that match no residue class
        for (const auto& s : slots) f.eigenvalues[s] = {Rat(0), Rat(1)};
        f.label = "gen";
        // may or may not be eliminated depending on residues; at least it runs
        // both sign modes consistently: strict elimination implies permissive
        bool strict = refined_eliminate(f, 5, 11, SignMode::strict);
        bool perm = refined_eliminate(f, 5, 11, SignMode::permissive);
        CHECK((!perm || strict));  // permissive eliminates less or equal
    }

    CHECK_THROWS_AS(refined_eliminate(f10, 13, 5), UnsupportedPrime);
    CHECK_THROWS_AS(refined_eliminate(f10, 53, 5), UnsupportedPrime);  // 53 = 1 mod 13
}

TEST_CASE("level raising and parity criteria") {
    CHECK_FALSE(levelraising_check(2L, 11));
    CHECK(levelraising_check(1L, 11));
    CHECK(levelraising_check(-1L, 7));
    // even a_p can never satisfy a_p = +-1 for any p > |a_p| + 1
    for (long a : {0L, 2L, -2L, 4L}) CHECK_FALSE(levelraising_check(a, 11));
    // in the quadratic field: a_7 = sqrt2 + 4 maps to +-1 under one prime of 7
    QPoly h({Rat(-2), Rat(0), Rat(1)});
    CHECK(levelraising_check(h, {Rat(4), Rat(1)}, 7));  // image 4+3=0? no: 4+4=8=1 mod 7
}

TEST_CASE("multiplicative congruence") {
    CHECK(mult_congruence_check(3, 3, 7));
    CHECK(mult_congruence_check(-3, 3, 7));
    CHECK_FALSE(mult_congruence_check(1, 3, 11));
    CHECK_FALSE(mult_congruence_check(-1, 3, 13));
    // a_ell = ell + 1 gives zero: every p passes
    for (i64 p : {5, 7, 11, 97}) CHECK(mult_congruence_check(4, 3, p));
}

TEST_CASE("characteristic polynomial pairs reproduce the case analysis") {
    const std::vector<std::pair<long, long>> pairs = {{-3, -1}, {-1, -3}, {-1, 1}};
    for (i64 p : {5, 7, 13}) {
        for (auto [t1, t2] : pairs) {
            bool ok = charpoly_pair_irreducible(t1, t2, 3, p);
            bool exception = (p == 5 && t1 == -1 && t2 == 1);
            CHECK(ok == !exception);
        }
    }
    // the arithmetic behind the p = 7 entry: disc(-1) = -11 = 3 mod 7 is a
    // non-residue
    CHECK(legendre(Int(3), Int(7)) == -1);
}

TEST_CASE("second-case report requires complete level data") {
    CHECK_THROWS_AS(second_case_report(1, {}), IncompleteDatabase);
    auto db50 = parse_rational_db("c1 50 1 1 1 -3 1\n");
    CHECK_THROWS_AS(second_case_report(1, db50), IncompleteDatabase);
    CHECK_THROWS_AS(second_case_report(3, db50), HypothesisViolated);
}
