// Acceptance suite: one line per criterion, exact arithmetic throughout.
// Criterion 8 consumes externally supplied eigenvalue files and is skipped
// (data_missing) when they are absent.
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include "frey/pipeline.hpp"

using namespace frey;

namespace {

std::string g_root = ".";
int g_failures = 0;

void run(const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::cout << "PASS " << name << "\n";
    } catch (const std::exception& e) {
        std::cout << "FAIL " << name << ": " << e.what() << "\n";
        ++g_failures;
    }
}

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

std::optional<std::string> read_file(const std::string& rel) {
    std::ifstream in(g_root + "/" + rel);
    if (!in.good()) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::pair<long, long>> coprime_pairs(int count, std::mt19937_64& rng, int spread,
                                                 bool nonzero_sum) {
    std::uniform_int_distribution<long> co(-spread, spread);
    std::vector<std::pair<long, long>> out;
    while ((int)out.size() < count) {
        long a = co(rng), b = co(rng);
        if ((a == 0 && b == 0) || gcd(Int(a), Int(b)) != 1) continue;
        if (nonzero_sum && a + b == 0) continue;
        out.push_back({a, b});
    }
    return out;
}

// ----- criterion 1 ------------------------------------------------------------

void criterion1() {
    const auto& F = FreyFormulas::instance();
    // polynomial identities
    require((F.tE.A + F.tE.B + F.tE.C).is_zero(), "A+B+C != 0 for the sqrt13 triple");
    require((F.tF.A + F.tF.B + F.tF.C).is_zero(), "A+B+C != 0 for the cubic triple");
    {
        using namespace freydetail;
        HForm lhs5 = power_sum_form(FieldId::Qsqrt5, 5);
        require((xy_sum(FieldId::Qsqrt5) * F.psi5 * F.psib5 - lhs5).is_zero(),
                "x^5+y^5 != (x+y) psi5 psib5");
        HForm lhs13 = power_sum_form(FieldId::Qsqrt13, 13);
        require((xy_sum(FieldId::Qsqrt13) * F.psi13 * F.psib13 - lhs13).is_zero(),
                "x^13+y^13 != (x+y) psi13 psib13");
    }
    // closed-form c4/c6/disc identities, symbolically
    for (auto k : {FreyKind::W, FreyKind::E5, FreyKind::F5, FreyKind::E13, FreyKind::F13})
        require(invariant_identity_check(k), std::string("identity check failed for ") + kind_name(k));
    // and c4^3 - c6^2 = 1728 disc numerically on 100 random coprime pairs per kind
    std::mt19937_64 rng(11);
    auto pairs = coprime_pairs(100, rng, 40, true);
    for (auto k : {FreyKind::W, FreyKind::E5, FreyKind::F5, FreyKind::E13, FreyKind::F13}) {
        for (auto [a, b] : pairs) {
            Model m = frey_model_at(k, a, b);
            InvariantSet s = invariants(m);  // asserts the identity internally
            (void)s;
        }
    }
}

// ----- criterion 2 ------------------------------------------------------------

void criterion2() {
    Model w0 = Model::from_rat(FieldId::Q, 0, 1, 0, 592, -16812);
    require(conductor_Q(w0) == 1200, "W0 conductor != 1200");

    for (long a = -20; a <= 20; ++a)
        for (long b = -20; b <= 20; ++b) {
            if ((a == 0 && b == 0) || a + b == 0 || gcd(Int(a), Int(b)) != 1) continue;
            Model m = frey_model_at(FreyKind::W, a, b);
            Int ab = Int(a) * Int(b), apb = Int(a + b);
            long v2 = mpz_divisible_ui_p(apb.get_mpz_t(), 2) ? val_q(apb, 2) : 0;
            int alpha;
            if (mod_floor(ab, Int(4)) == 0) alpha = 3;  // includes ab = 0
            else if (mod_floor(ab, Int(4)) == 2 || v2 == 1) alpha = 4;
            else if (v2 == 2) alpha = 0;
            else alpha = 1;
            Int expect = int_pow(Int(2), alpha) * 25;
            Int a5b5 = int_pow(Int(a), 5) + int_pow(Int(b), 5);
            for (auto& [p, e] : factor(a5b5))
                if (p != 2 && p != 5) expect *= p;
            Int got = conductor_Q(m);
            require(got == expect, "conductor table mismatch at (" + std::to_string(a) + "," +
                                       std::to_string(b) + "): got " + to_str(got) + " expected " +
                                       to_str(expect));
        }
}

// ----- criterion 3 ------------------------------------------------------------

void criterion3() {
    // a_3 = 6 on every class with 3 | a+b
    auto t5 = trace_table(FreyKind::E5, 3);
    for (i64 x = 0; x < 3; ++x)
        for (i64 y = 0; y < 3; ++y) {
            if (x == 0 && y == 0) continue;
            if ((x + y) % 3 == 0)
                require(t5.at(x, y).traces[0].a == 6, "a_3 != 6 on a 3 | a+b class");
        }
    // the six survivors all have a_3 = 4
    auto slot3 = prime_split(FieldId::Qsqrt5, 3)[0];
    Model e10 = frey_model_at(FreyKind::E5, 1, 0), e11 = frey_model_at(FreyKind::E5, 1, 1);
    std::vector<Model> six = {e10,
                              quadratic_twist(e10, -1),
                              quadratic_twist(e10, 2),
                              quadratic_twist(e10, -2),
                              e11,
                              quadratic_twist(e11, 2)};
    for (const auto& m : six)
        require(point_count(minimalize_at_odd_q(m, 3), slot3).a == 4, "survivor a_3 != 4");

    // the twisted comparison at 3
    Model w0 = Model::from_rat(FieldId::Q, 0, 1, 0, 592, -16812);
    require(frobenius_trace_Q(quadratic_twist(w0, -1), 3) == -1, "a_3(W0 x chi_{-1}) != -1");
    require(pipedetail::w_twisted_a3_set() == std::set<long>{-2, 1, 2},
            "twisted Frey-side a_3 set != {1, +-2}");

    // the sqrt13 pair spectrum
    auto t13 = trace_table(FreyKind::E13, 3);
    std::set<std::pair<long, long>> seen;
    for (i64 x = 0; x < 3; ++x)
        for (i64 y = 0; y < 3; ++y) {
            if (x == 0 && y == 0) continue;
            auto pr = std::pair{t13.at(x, y).traces[0].a, t13.at(x, y).traces[1].a};
            seen.insert(pr);
            require((pr == std::pair{-3L, -1L}) == ((x + y) % 3 == 0),
                    "(-3,-1) should occur exactly on the 3 | a+b classes");
        }
    require(seen == std::set<std::pair<long, long>>{{-3, -1}, {-1, -3}, {-1, 1}},
            "trace pair spectrum mismatch");
    require(t13.at(1, 0).traces[0].a == -1 && t13.at(1, 1).traces[0].a == -1,
            "a_q1 of the (1,0) and (1,1) curves should be -1");
}

// ----- criterion 4 ------------------------------------------------------------

void criterion4() {
    const auto& F = FreyFormulas::instance();
    for (const auto* t : {&F.tE, &F.tF}) {
        require(nf_norm(t->alpha) == 169, "alpha norm != 13^2");
        require(nf_norm(t->beta) == 169, "beta norm != 13^2");
        require(nf_norm(t->gamma) == 169, "gamma norm != 13^2");
    }
    // valuation cross-checks at the ramified 13-slot for 20 admissible pairs with
    // 13 | a+b, including one with v13(a+b) = 2
    std::vector<std::pair<long, long>> pairs;
    for (long k = 1; k <= 6; ++k) pairs.push_back({k, 13 - k});
    for (long k : {1, 3, 5, 7, 9, 11}) pairs.push_back({k, 26 - k});
    for (long k : {1, 2, 4, 5, 7, 8}) pairs.push_back({k, 39 - k});
    pairs.push_back({1, 168});  // a+b = 169
    pairs.push_back({3, 166});
    require(pairs.size() >= 20, "not enough admissible pairs");
    auto s13 = prime_split(FieldId::CubicK, 13)[0];
    for (auto [a, b] : pairs) {
        require(gcd(Int(a), Int(b)) == 1, "pair not coprime");
        auto prof = conductor_profile(FreyKind::F13, a, b, 3);  // runs every cross-check
        Model m = frey_model_at(FreyKind::F13, a, b);
        InvariantSet inv = invariants(m);
        long v13 = val_q(Int(a + b), 13);
        require(padic_valuation(inv.c4, s13) == 8, "v(c4) at q13 != 8");
        require(padic_valuation(inv.disc, s13) == 23 + 12 * v13, "v(disc) at q13 != 23 + 12 v13");
        (void)prof;
    }
    require(conductor_profile(FreyKind::F13, 1, 1, 3).at(2)->exponents[0] == 4,
            "conductor exponent of the (1,1) cubic curve at 2 != 4");
}

// ----- criterion 5 ------------------------------------------------------------

void criterion5() {
    const std::vector<std::pair<long, long>> pairs = {{-3, -1}, {-1, -3}, {-1, 1}};
    for (i64 p : {5, 7, 13})
        for (auto [t1, t2] : pairs) {
            bool expect = !(p == 5 && t1 == -1 && t2 == 1);
            require(charpoly_pair_irreducible(t1, t2, 3, p) == expect,
                    "characteristic polynomial case analysis mismatch");
        }
}

// ----- criterion 6 ------------------------------------------------------------

void criterion6() {
    auto text = read_file("data/curves_50_200_400.txt");
    require(text.has_value(), "curve table missing");
    auto db = parse_rational_db(*text);
    std::map<std::string, int> counts;
    for (const auto& e : db) counts[to_str(e.conductor)]++;
    require(counts["50"] == 2 && counts["200"] == 5 && counts["400"] == 8,
            "class counts should be 2 / 5 / 8");
    for (const auto& e : db) {
        if (!e.two_torsion) {
            long a3 = e.traces.at(3);
            require(a3 == 1 || a3 == -1 || a3 == 3 || a3 == -3,
                    "no-2-torsion curve with a_3 outside {+-1, +-3}");
            if (a3 == 3 || a3 == -3)
                require(!levelraising_check(e.traces.at(7), 7),
                        "curve satisfies both a_3 = +-3 and a_7 = +-1 (mod 7)");
        } else {
            for (const auto& [q, a] : e.traces) {
                if (q > 50) continue;
                if (mpz_divisible_ui_p(e.conductor.get_mpz_t(), (unsigned long)q)) continue;
                require(a % 2 == 0, "2-torsion curve with an odd good trace");
            }
        }
    }
    DataEnv env;
    for (long d : {1L, 2L}) {
        ProofTrace tr = prove_second_case(d, db, env);
        require(tr.verdict == Verdict::resolved, "second-case verdict should be resolved");
    }
}

// ----- criterion 7 ------------------------------------------------------------

void criterion7() {
    // soundness: curve-backed forms survive against their own curve
    for (auto [kind, a, b] : {std::tuple{FreyKind::E5, 1L, 0L}, std::tuple{FreyKind::E13, 1L, 0L}}) {
        auto f = curve_backed_form("self", frey_model_at(kind, a, b));
        for (i64 q = 3; q <= 61; ++q) {
            bool ok = true;
            try {
                check_aux_admissible(kind, q);
            } catch (...) {
                ok = false;
            }
            if (!ok) continue;
            require(exponent_bound(kind, f, q) == 0, "curve-backed form was sieved out");
        }
    }
    // monotonicity on 20 synthetic databases, determinism under shuffles
    std::mt19937_64 rng(4096);
    std::uniform_int_distribution<long> tr(-3, 3);
    std::vector<i64> aux = {3, 7, 13, 17, 23};
    for (int trial = 0; trial < 20; ++trial) {
        NewformRecord f;
        f.field = FieldId::Qsqrt5;
        f.label = "syn" + std::to_string(trial);
        f.coeff_poly = QPoly({Rat(0), Rat(1)});
        for (i64 q : aux)
            for (const auto& s : prime_split(FieldId::Qsqrt5, q))
                f.eigenvalues[s] = {Rat(tr(rng))};
        std::set<long> prev;
        bool first = true;
        std::vector<i64> sofar;
        for (i64 q : aux) {
            sofar.push_back(q);
            SieveResult sr = sieve_form(FreyKind::E5, f, sofar, 7);
            if (sr.all_p) continue;
            std::set<long> cur(sr.survivors.begin(), sr.survivors.end());
            if (!first)
                for (long p : cur)
                    require(prev.count(p) > 0 || !sr.large_factors.empty(),
                            "survivors did not shrink monotonically");
            prev = cur;
            first = false;
        }
        SieveResult fwd = sieve_form(FreyKind::E5, f, aux, 7);
        SieveResult rev = sieve_form(FreyKind::E5, f, {23, 13, 3, 17, 7}, 7);
        require(fwd.bstar == rev.bstar, "bound depends on auxiliary prime order");
    }
}

// ----- criterion 8 (data-gated) -------------------------------------------------

bool criterion8(std::string& why_skipped) {
    auto t5 = read_file("data/hilbert/hilbert_qsqrt5_2e6.txt");
    auto tc = read_file("data/hilbert/hilbert_cubic_2_3_q13.txt");
    if (!t5 && !tc) {
        why_skipped = "no Hilbert eigenvalue files under data/hilbert/ (verdict data_missing)";
        return false;
    }
    if (t5) {
        auto forms = parse_hilbert_db(*t5);
        std::vector<i64> aux = {3, 7, 13, 17, 19, 23, 29};
        int surv7_E = 0, surv11_F = 0, extra7_F = 0;
        auto slot3 = prime_split(FieldId::Qsqrt5, 3)[0];
        for (const auto& f : forms) {
            SieveResult e = sieve_form(FreyKind::E5, f, aux, 7);
            if (e.all_p || !e.survivors.empty() || !e.large_factors.empty()) ++surv7_E;
            SieveResult f11 = sieve_form(FreyKind::F5, f, aux, 11);
            bool alive11 = f11.all_p || !f11.survivors.empty() || !f11.large_factors.empty();
            if (alive11) ++surv11_F;
            SieveResult f7 = sieve_form(FreyKind::F5, f, aux, 7);
            bool alive7 = f7.all_p || !f7.survivors.empty() || !f7.large_factors.empty();
            if (alive7 && !alive11) ++extra7_F;
            if (alive7) {
                // all five F-branch survivors carry a_3 = 4
                auto a3 = eigenvalue_at(f, slot3);
                require(a3 == std::vector<Rat>{Rat(4)}, "F-branch survivor should have a_3 = 4");
            }
        }
        require(surv7_E == 6, "expected exactly 6 survivors on the E branch");
        require(surv11_F == 2, "expected exactly 2 survivors on the F branch at p >= 11");
        require(extra7_F == 3, "expected 3 extra p = 7 forms on the F branch");
    }
    if (tc) {
        auto forms = parse_hilbert_db(*tc);
        std::vector<i64> aux = {5, 7, 11, 17, 31};
        for (const auto& f : forms) {
            Int g(0);
            for (i64 q : aux) g = gcd(g, pipedetail::f13_exponent_bound(f, q));
            require(g != 0, "a cubic-level form escapes the trace bound");
            if (mpz_divisible_ui_p(g.get_mpz_t(), 11))
                require(refined_eliminate(f, 5, 11), "q = 5 fails to kill a p = 11 leftover");
            if (mpz_divisible_ui_p(g.get_mpz_t(), 5)) {
                bool killed = false;
                for (i64 q : {31, 47, 53}) killed = killed || refined_eliminate(f, q, 5);
                require(killed, "q in {31,47,53} fails to kill a p = 5 leftover");
            }
        }
    }
    // pipeline verdicts with the data directory wired in
    DataEnv env;
    env.data_dir = g_root + "/data/hilbert";
    require(prove_r5(env).verdict == Verdict::resolved, "signature-5 verdict");
    ProofTrace t13 = prove_r13(env);
    require(t13.verdict == Verdict::resolved_except_listed_p && t13.excluded_p == std::vector<long>{7},
            "signature-13 verdict");
    return true;
}

// ----- criterion 9 ------------------------------------------------------------

void criterion9() {
    DataEnv env;
    ProofTrace t5 = prove_r5(env);
    bool bound_cited = false;
    for (const auto& s : t5.steps) {
        if (s.evidence.find("10^7") != std::string::npos) {
            require(!s.verified, "the 10^7 bound must never be a computed claim");
            bound_cited = true;
        }
    }
    require(bound_cited, "the exponent floor should appear as a cited step");
    ProofTrace t13 = prove_r13(env);
    for (const auto& s : t13.steps) {
        require(s.evidence.find("244609") == std::string::npos &&
                    s.evidence.find("148101") == std::string::npos,
                "newform space dimensions must not appear as computed evidence");
        if (!s.verified) continue;
        require(s.evidence.find("newform computation") == std::string::npos,
                "newform space computations cannot be claimed as computed");
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_root = argv[1];
    run("criterion 1: invariant identities (5 kinds x 100 pairs, polynomial identities)", criterion1);
    run("criterion 2: conductor of the rational Frey curve, exhaustive |a|,|b| <= 20", criterion2);
    run("criterion 3: trace facts at 3 (6 vs 4, twisted set {1,+-2}, sqrt13 pairs)", criterion3);
    run("criterion 4: triple norms 13^2 and the 13-adic valuation cross-checks", criterion4);
    run("criterion 5: characteristic polynomial case analysis at p in {5,7,13}", criterion5);
    run("criterion 6: second case at levels 50/200/400, verdict resolved", criterion6);
    run("criterion 7: sieve soundness, monotonicity, determinism", criterion7);
    {
        std::string why;
        try {
            if (criterion8(why))
                std::cout << "PASS criterion 8: data-gated reproductions\n";
            else
                std::cout << "SKIP criterion 8: " << why << "\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL criterion 8: " << e.what() << "\n";
            ++g_failures;
        }
    }
    run("criterion 9: desk-scale limits stay cited, never computed", criterion9);
    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
