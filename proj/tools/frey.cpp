// Command-line surface: curve invariants, trace tables, sieving, the theorem
// pipelines, the second-case argument, and inertia comparisons.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "frey/pipeline.hpp"

using namespace frey;

namespace {

std::string nf_str(const NFElem& x) {
    const char* sym = "?";
    switch (x.fid) {
        case FieldId::Q: sym = ""; break;
        case FieldId::Qsqrt5: sym = "g"; break;   // g^2 = g + 1
        case FieldId::Qsqrt13: sym = "w"; break;  // w^2 = 13
        case FieldId::CubicK: sym = "z"; break;   // z^3 + z^2 - 4z + 1 = 0
        case FieldId::Zeta13: sym = "t"; break;   // t = zeta_13
    }
    std::string out;
    bool wrote = false;
    for (int i = (int)x.c.size() - 1; i >= 0; --i) {
        if (x.c[i] == 0) continue;
        std::string term = to_str(x.c[i]);
        if (i > 0) {
            term += std::string("*") + sym;
            if (i > 1) term += "^" + std::to_string(i);
        }
        if (wrote && x.c[i] > 0) out += "+";
        out += term;
        wrote = true;
    }
    return wrote ? out : "0";
}

FreyKind parse_kind(const std::string& s) {
    if (s == "W") return FreyKind::W;
    if (s == "E5") return FreyKind::E5;
    if (s == "F5") return FreyKind::F5;
    if (s == "E13") return FreyKind::E13;
    if (s == "F13") return FreyKind::F13;
    throw CLI::ValidationError("--kind", "expected one of W, E5, F5, E13, F13");
}

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IncompleteDatabase("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const ProofTrace& tr, const std::string& out_path, const std::string& json_path) {
    std::string text = tr.render_text();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        out << text;
    }
    if (!json_path.empty()) {
        std::ofstream js(json_path);
        js << tr.to_json().dump(2) << "\n";
    }
}

std::string slot_str(const PrimeSlot& s) {
    return std::to_string(s.q) + "." + std::to_string(s.index) + " (e=" + std::to_string(s.e) +
           ", f=" + std::to_string(s.f) + ")";
}

int run_invariants(FreyKind kind, long a, long b, long d) {
    FreyModel fm = build_frey(kind, a, b);
    InvariantSet inv = invariants(fm.model);
    std::cout << "curve " << kind_name(kind) << " at (" << a << ", " << b << ") over "
              << field_spec(fm.model.fid).name << "\n";
    std::cout << "  a2 = " << nf_str(fm.model.a2) << "\n";
    std::cout << "  a4 = " << nf_str(fm.model.a4) << "\n";
    std::cout << "  a6 = " << nf_str(fm.model.a6) << "\n";
    std::cout << "  c4 = " << nf_str(inv.c4) << "\n";
    std::cout << "  c6 = " << nf_str(inv.c6) << "\n";
    std::cout << "  disc = " << nf_str(inv.disc) << "\n";
    std::cout << "  j = " << nf_str(inv.j) << "\n";
    if (kind == FreyKind::W) {
        std::cout << "  conductor = " << to_str(conductor_Q(fm.model)) << "\n";
    }
    auto prof = conductor_profile(kind, a, b, d);
    std::cout << "conductor profile (d = " << d << "):\n";
    for (const auto& e : prof.entries) {
        std::cout << "  slot " << slot_str(e.slot) << ": exponent";
        for (int x : e.exponents) std::cout << " " << x;
        std::cout << (e.kind == RedKind::good ? " (good)"
                      : e.kind == RedKind::multiplicative ? " (multiplicative)" : " (additive)");
        if (e.vdelta_min) std::cout << ", v(disc_min) = " << *e.vdelta_min;
        std::cout << "\n";
    }
    if (kind != FreyKind::W) {
        try {
            auto lvl = serre_level(kind, a, b, d, 11);
            std::cout << "predicted level(s) after lowering [" << lvl.condition << "]:\n";
            for (const auto& cand : lvl.candidates) {
                std::cout << "  ";
                for (size_t i = 0; i < cand.size(); ++i) {
                    if (i) std::cout << " * ";
                    std::cout << cand[i].first.q << "." << cand[i].first.index << "^"
                              << cand[i].second;
                }
                std::cout << "\n";
            }
        } catch (const HypothesisViolated& e) {
            std::cout << "level prediction inapplicable: " << e.what() << "\n";
        }
    }
    return 0;
}

int run_trace(FreyKind kind, long q) {
    TraceTable tbl = trace_table(kind, q);
    std::cout << "traces of " << kind_name(kind) << " at q = " << q << "; slots:";
    for (const auto& s : tbl.slots) std::cout << " " << slot_str(s);
    std::cout << "\n";
    for (i64 x = 0; x < q; ++x)
        for (i64 y = 0; y < q; ++y) {
            if (x == 0 && y == 0) continue;
            std::cout << "  (" << x << "," << y << "): ";
            const auto& e = tbl.at(x, y);
            if (e.multiplicative) {
                std::cout << "multiplicative\n";
                continue;
            }
            for (const auto& t : e.traces) std::cout << t.a << " ";
            std::cout << "\n";
        }
    return 0;
}

int run_sieve(FreyKind kind, const std::string& forms_path, std::vector<long> aux, long p_floor,
              const std::vector<std::string>& expect) {
    auto forms = parse_hilbert_db(read_file_or_throw(forms_path));
    if (aux.empty()) {
        for (i64 q = 3; q <= 30; ++q) {
            try {
                check_aux_admissible(kind, q);
                aux.push_back(q);
            } catch (...) {
            }
        }
    }
    std::vector<std::string> survivors;
    for (const auto& f : forms) {
        SieveResult sr = sieve_form(kind, f, aux, p_floor);
        std::cout << "form " << f.label << ": ";
        if (sr.all_p) {
            std::cout << "survives all p (bound 0)\n";
            survivors.push_back(f.label);
            continue;
        }
        if (sr.survivors.empty() && sr.large_factors.empty()) {
            std::cout << "eliminated for p >= " << p_floor << "\n";
        } else {
            std::cout << "survives at p in {";
            for (size_t i = 0; i < sr.survivors.size(); ++i)
                std::cout << (i ? "," : "") << sr.survivors[i];
            for (const auto& lf : sr.large_factors) std::cout << ",[" << to_str(lf) << "]";
            std::cout << "}\n";
            survivors.push_back(f.label);
        }
        for (const auto& ev : sr.evidence)
            std::cout << "    q=" << ev.q << ": bound has " << mpz_sizeinbase(ev.bound.get_mpz_t(), 2)
                      << " bits\n";
    }
    if (!expect.empty()) {
        auto got = survivors;
        auto want = expect;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got != want) {
            std::cerr << "survivor set differs from the expected list\n";
            return 4;
        }
    }
    return 0;
}

int run_inertia(long ell, long p, const std::string& kind_s, long a, long b,
                const std::string& curve_csv) {
    // side A: a Frey curve; side B: a rational curve given by a-invariants
    FreyKind kind = parse_kind(kind_s);
    ConductorProfile prof = conductor_profile(kind, a, b, 3);
    const ProfileEntry* pe = nullptr;
    for (const auto& e : prof.entries)
        if ((long)e.slot.q == ell) pe = &e;
    ReductionClass rcA;
    if (!pe) {
        rcA.kind = RedKind::good;
        rcA.cond_exp = 0;
    } else {
        rcA.kind = pe->kind;
        rcA.vdelta_min = pe->vdelta_min.value_or(0);
        // potentially multiplicative iff v(j) < 0 at the slot
        Model m = frey_model_at(kind, a, b);
        InvariantSet inv = invariants(m);
        long vj = padic_valuation(inv.j, pe->slot);
        rcA.potential = (rcA.kind == RedKind::good)
                            ? Potential::not_applicable
                            : (vj < 0 ? Potential::potentially_multiplicative
                                      : Potential::potentially_good);
    }
    InertiaProfile A = inertia_order_set(rcA, rcA.vdelta_min, ell, p);

    std::vector<std::string> parts;
    {
        std::stringstream ss(curve_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) parts.push_back(tok);
    }
    if (parts.size() != 5) throw CLI::ValidationError("--curve", "expected a1,a2,a3,a4,a6");
    Model B = Model::from_rat(FieldId::Q, Rat(Int(parts[0])), Rat(Int(parts[1])),
                              Rat(Int(parts[2])), Rat(Int(parts[3])), Rat(Int(parts[4])));
    LocalReduction lr = tate_conductor_Q(B, Int(ell));
    ReductionClass rcB;
    rcB.kind = lr.kind;
    rcB.vdelta_min = lr.vdelta_min;
    InvariantSet invB = invariants(B);
    long vjB = val_q(invB.j.rational_value(), Int(ell));
    rcB.potential = (lr.kind == RedKind::good)
                        ? Potential::not_applicable
                        : (vjB < 0 ? Potential::potentially_multiplicative
                                   : Potential::potentially_good);
    InertiaProfile Bp = inertia_order_set(rcB, lr.vdelta_min, ell, p);

    auto show = [](const char* name, const InertiaProfile& pr) {
        std::cout << name << " inertia orders at the prime: {";
        bool first = true;
        for (long o : pr.orders) {
            std::cout << (first ? "" : ",") << o;
            first = false;
        }
        std::cout << "}\n";
    };
    show("Frey side", A);
    show("curve side", Bp);
    bool disjoint = inertia_v1_disjoint(A, Bp);
    std::cout << "disjoint: " << (disjoint ? "yes (representations differ at this prime)" : "no")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-Frey elimination toolkit for x^r + y^r = d z^p (r = 5, 13)"};
    app.require_subcommand(1);

    std::string kind_s = "W", forms_path, data_dir, curves_path = "data/curves_50_200_400.txt";
    std::string out_path, json_path, expect_csv, curve_csv;
    long a = 1, b = 2, d = 3, q = 3, p_floor = 7, r = 5, ell = 5, p = 7;
    bool strict_no_cited = false, strict_signs = false;

    auto* inv = app.add_subcommand("invariants", "model, invariants and conductor data of a Frey curve");
    inv->add_option("--kind", kind_s, "W | E5 | F5 | E13 | F13")->required();
    inv->add_option("--a", a)->required();
    inv->add_option("--b", b)->required();
    inv->add_option("--d", d, "coefficient d of the equation (default 3)");

    auto* trc = app.add_subcommand("trace", "residue-class trace table at an auxiliary prime");
    trc->add_option("--kind", kind_s)->required();
    trc->add_option("--q", q, "auxiliary prime")->required();

    auto* sv = app.add_subcommand("sieve", "trace-difference sieve of a newform file");
    sv->add_option("--kind", kind_s)->required();
    sv->add_option("--forms", forms_path, "eigenvalue file")->required();
    std::vector<long> aux;
    sv->add_option("--aux-primes", aux, "auxiliary primes (default: admissible q <= 30)");
    sv->add_option("--p-floor", p_floor, "report survivors at p >= this (default 7)");
    sv->add_option("--expect", expect_csv, "comma-separated expected survivor labels");

    auto* pv = app.add_subcommand("prove", "run a theorem pipeline and emit its proof trace");
    pv->add_option("--r", r, "signature: 5 or 13")->required();
    pv->add_option("--d", d, "right-hand coefficient (3 supported)");
    pv->add_option("--data", data_dir, "directory with Hilbert eigenvalue files");
    pv->add_option("--out", out_path, "write the text trace here instead of stdout");
    pv->add_option("--json", json_path, "also write a JSON sidecar");
    bool permissive_signs = true;
    pv->add_flag("--strict-no-cited", strict_no_cited,
                 "demand data for every survivor list; verdict data_missing otherwise");
    pv->add_flag("--strict-signs", strict_signs,
                 "one global sign in refined elimination condition (ii)");
    pv->add_flag("--permissive-signs", permissive_signs,
                 "independent per-slot signs in condition (ii); the default");

    auto* sc = app.add_subcommand("second-case", "the p | z argument at levels 50/200/400");
    sc->add_option("--d", d, "1 or 2")->required();
    sc->add_option("--curves", curves_path, "Cremona-format curve table");
    sc->add_option("--out", out_path);
    sc->add_option("--json", json_path);

    auto* in = app.add_subcommand("inertia", "version-1 inertia-order comparison at a prime");
    in->add_option("--ell", ell, "residue characteristic")->required();
    in->add_option("--p", p, "mod-p representation")->required();
    in->add_option("--kind", kind_s, "Frey side")->required();
    in->add_option("--a", a)->required();
    in->add_option("--b", b)->required();
    in->add_option("--curve", curve_csv, "comparison curve a1,a2,a3,a4,a6 over Q")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*inv) return run_invariants(parse_kind(kind_s), a, b, d);
        if (*trc) return run_trace(parse_kind(kind_s), q);
        if (*sv) {
            std::vector<std::string> expect;
            if (!expect_csv.empty()) {
                std::stringstream ss(expect_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) expect.push_back(tok);
            }
            return run_sieve(parse_kind(kind_s), forms_path, aux, p_floor, expect);
        }
        if (*pv) {
            DataEnv env;
            if (!data_dir.empty()) env.data_dir = data_dir;
            env.strict_no_cited = strict_no_cited;
            env.sign_mode = strict_signs ? SignMode::strict : SignMode::permissive;
            if (d != 3) throw HypothesisViolated("only d = 3 pipelines are wired");
            ProofTrace tr = (r == 5) ? prove_r5(env) : (r == 13) ? prove_r13(env)
                                                                 : throw HypothesisViolated("r must be 5 or 13");
            emit(tr, out_path, json_path);
            return tr.verdict == Verdict::data_missing && strict_no_cited ? 3 : 0;
        }
        if (*sc) {
            auto db = parse_rational_db(read_file_or_throw(curves_path));
            DataEnv env;
            ProofTrace tr = prove_second_case(Int(d), db, env);
            emit(tr, out_path, json_path);
            return 0;
        }
        if (*in) return run_inertia(ell, p, kind_s, a, b, curve_csv);
    } catch (const DegeneratePair& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolated& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const CrossCheckFailed& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const std::logic_error& e) {
        std::cerr << "internal check failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
