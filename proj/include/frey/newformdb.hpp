// Ingestion of newform eigenvalue data: Hilbert newforms from the line-based
// dump format, rational newforms from Cremona-style curve tables. Input is
// treated as untrusted: parse-time Hasse screens, slot checks, and conductor
// reverification.
#pragma once

#include <sstream>

#include "freycurves.hpp"

namespace frey {

struct ParseError : std::runtime_error {
    explicit ParseError(int line, const std::string& w)
        : std::runtime_error("line " + std::to_string(line) + ": " + w) {}
};
struct UnknownField : std::runtime_error {
    explicit UnknownField(const std::string& w) : std::runtime_error("unknown field: " + w) {}
};
struct SlotMismatch : std::runtime_error {
    explicit SlotMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct MissingEigenvalue : std::runtime_error {
    explicit MissingEigenvalue(const std::string& w) : std::runtime_error(w) {}
};
struct ConductorMismatch : std::runtime_error {
    explicit ConductorMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct IncompleteDatabase : std::runtime_error {
    explicit IncompleteDatabase(const std::string& w) : std::runtime_error(w) {}
};

struct NewformRecord {
    std::string label;
    FieldId field = FieldId::Q;
    std::vector<std::pair<PrimeSlot, int>> level;  // slot-exponent list
    QPoly coeff_poly;                              // monic integer polynomial
    std::map<PrimeSlot, std::vector<Rat>> eigenvalues;
    std::optional<Model> backing_curve;  // rational form realized by a curve over `field`

    int coeff_degree() const { return coeff_poly.degree(); }
    bool is_rational() const { return coeff_degree() == 1; }
};

struct RationalCurveEntry {
    std::string label;
    Int conductor;
    Model model;
    std::map<i64, long> traces;  // q <= 100, all reduction types
    bool two_torsion = false;
};

// --- coefficient-field helpers --------------------------------------------------

// Norm from Q[x]/(h) to Q, normalized so that N(r) = r^deg for rational r.
inline Rat coeff_norm(const QPoly& h, const std::vector<Rat>& elem) {
    if (h.degree() == 1) {
        // rational field: value is elem evaluated at the root of the monic h
        Rat root = -h.coeff(0);
        Rat acc(0);
        for (int i = (int)elem.size() - 1; i >= 0; --i) acc = acc * root + elem[i];
        return acc;
    }
    QPoly g(std::vector<Rat>(elem.begin(), elem.end()));
    return resultant(h, g);
}

// Residue maps of the coefficient field at p: one per irreducible factor of
// the coefficient polynomial mod p, in the deterministic factor order.
struct CoeffResidueMap {
    ResidueField rf;  // F_p[t]/(factor)
    // image of an element given by power-basis coordinates
    ResidueField::Elem apply(const std::vector<Rat>& elem) const {
        ResidueField::Elem acc = rf.zero();
        ResidueField::Elem gen = rf.gen();
        for (int i = (int)elem.size() - 1; i >= 0; --i) {
            acc = rf.mul(acc, gen);
            i64 den = (i64)mpz_fdiv_ui(elem[i].get_den().get_mpz_t(), (unsigned long)rf.q);
            if (den == 0) throw UnsupportedPrime("eigenvalue has p in a denominator");
            i64 num = (i64)mpz_fdiv_ui(elem[i].get_num().get_mpz_t(), (unsigned long)rf.q);
            acc = rf.add(acc, rf.from_int(mul_mod(num, inv_mod_i(den, rf.q), rf.q)));
        }
        return acc;
    }
};

inline std::vector<CoeffResidueMap> coeff_field_primes(const NewformRecord& form, i64 p) {
    const QPoly& h = form.coeff_poly;
    std::vector<i64> c(h.degree() + 1);
    for (int i = 0; i <= h.degree(); ++i) {
        if (h.coeff(i).get_den() != 1) throw UnsupportedPrime("coefficient polynomial not integral");
        c[i] = (i64)mpz_fdiv_ui(h.coeff(i).get_num().get_mpz_t(), (unsigned long)p);
    }
    auto factors = fq_factor(FqPoly(p, std::move(c)));
    int degsum = 0;
    std::vector<CoeffResidueMap> maps;
    for (auto& [fac, mult] : factors) {
        if (mult > 1) throw UnsupportedPrime("p divides the index obstruction of the coefficient field");
        CoeffResidueMap m;
        m.rf.q = p;
        m.rf.f = fac.deg();
        m.rf.modulus = fac;
        degsum += fac.deg();
        maps.push_back(std::move(m));
    }
    if (degsum != h.degree()) throw std::logic_error("coeff_field_primes: degree bookkeeping failed");
    return maps;
}

// --- eigenvalue access -----------------------------------------------------------

inline std::vector<Rat> eigenvalue_at(const NewformRecord& form, const PrimeSlot& slot) {
    auto it = form.eigenvalues.find(slot);
    if (it != form.eigenvalues.end()) return it->second;
    if (form.backing_curve) {
        // throws BadReduction when the curve is genuinely bad at the slot
        TraceRecord t = point_count(minimalize_at_odd_q(*form.backing_curve, slot.q), slot);
        return {Rat(t.a)};
    }
    throw MissingEigenvalue("form " + form.label + " has no eigenvalue at " +
                            std::to_string(slot.q) + "." + std::to_string(slot.index));
}

// --- Hasse screen ----------------------------------------------------------------

namespace nfdbdetail {

// every real embedding of the eigenvalue must satisfy |a| <= 2 sqrt(Nq);
// checked exactly for coefficient degrees 1 and 2
inline bool hasse_screen(const QPoly& h, const std::vector<Rat>& elem, const Int& Nq) {
    Rat B2 = Rat(4 * Nq);  // (2 sqrt(Nq))^2
    if (h.degree() == 1) {
        Rat root = -h.coeff(0);
        Rat a(0);
        for (int i = (int)elem.size() - 1; i >= 0; --i) a = a * root + elem[i];
        return a * a <= B2;
    }
    if (h.degree() == 2) {
        // a = u + v*theta, theta^2 + p1 theta + p0 = 0
        Rat p1 = h.coeff(1), p0 = h.coeff(0);
        Rat u = elem.size() > 0 ? elem[0] : Rat(0);
        Rat v = elem.size() > 1 ? elem[1] : Rat(0);
        Rat tr = 2 * u - p1 * v;           // a + conj(a)
        Rat nm = u * u - p1 * u * v + p0 * v * v;  // a * conj(a)
        Rat discr = tr * tr - 4 * nm;
        if (discr < 0) return nm <= B2;  // complex pair: |a|^2 = nm
        // both real roots of X^2 - tr X + nm within [-B, B]
        if (tr * tr > 4 * B2) return false;
        Rat fB = B2 + nm;  // B^2 + nm >= |tr| * B  <=>  (B^2+nm)^2 >= tr^2 B2
        if (fB < 0) return false;
        return fB * fB >= tr * tr * B2;
    }
    return true;  // screened only for small degrees
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else
            cur.push_back(ch);
    }
    out.push_back(cur);
    return out;
}

inline FieldId parse_field(const std::string& name) {
    if (name == "Q") return FieldId::Q;
    if (name == "Qsqrt5") return FieldId::Qsqrt5;
    if (name == "Qsqrt13") return FieldId::Qsqrt13;
    if (name == "CubicK") return FieldId::CubicK;
    throw UnknownField(name);
}

}  // namespace nfdbdetail

// Level token: comma-separated `q^e` or `q.i^e` entries. A bare `q^e` requires
// a unique slot above q.
inline std::vector<std::pair<PrimeSlot, int>> parse_level(FieldId fid, const std::string& tok,
                                                          int lineno) {
    std::vector<std::pair<PrimeSlot, int>> out;
    for (const std::string& part : nfdbdetail::split_on(tok, ',')) {
        if (part.empty()) throw ParseError(lineno, "empty level component");
        std::string base = part;
        int exp = 1;
        if (auto pos = part.find('^'); pos != std::string::npos) {
            base = part.substr(0, pos);
            try {
                exp = std::stoi(part.substr(pos + 1));
            } catch (...) {
                throw ParseError(lineno, "bad level exponent in '" + part + "'");
            }
        }
        i64 q;
        int idx = -1;
        try {
            if (auto dot = base.find('.'); dot != std::string::npos) {
                q = std::stol(base.substr(0, dot));
                idx = std::stoi(base.substr(dot + 1));
            } else {
                q = std::stol(base);
            }
        } catch (...) {
            throw ParseError(lineno, "bad level token '" + part + "'");
        }
        if (exp <= 0) throw ParseError(lineno, "level exponents must be positive");
        std::vector<PrimeSlot> slots;
        try {
            slots = prime_split(fid, q);
        } catch (const std::exception& e) {
            throw ParseError(lineno, std::string("level prime rejected: ") + e.what());
        }
        if (idx < 0) {
            if (slots.size() != 1)
                throw SlotMismatch("level token '" + part + "' is ambiguous: " +
                                   std::to_string(slots.size()) + " slots above " + std::to_string(q));
            idx = 0;
        }
        if (idx >= (int)slots.size())
            throw SlotMismatch("no slot " + std::to_string(idx) + " above " + std::to_string(q));
        out.emplace_back(slots[idx], exp);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

inline std::vector<NewformRecord> parse_hilbert_db(const std::string& text) {
    std::vector<NewformRecord> records;
    std::map<std::string, size_t> by_label;
    std::optional<FieldId> fid;
    std::map<std::pair<i64, int>, int> remap;  // (q, external index) -> internal index
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        auto toks = nfdbdetail::split_ws(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "FIELD") {
            if (toks.size() != 2) throw ParseError(lineno, "FIELD takes one argument");
            fid = nfdbdetail::parse_field(toks[1]);
        } else if (kw == "REMAP") {
            if (toks.size() != 3) throw ParseError(lineno, "REMAP <q> <ext>-><int>");
            i64 q = std::stol(toks[1]);
            auto arrow = toks[2].find("->");
            if (arrow == std::string::npos) throw ParseError(lineno, "REMAP needs ext->int");
            int ext = std::stoi(toks[2].substr(0, arrow));
            int inn = std::stoi(toks[2].substr(arrow + 2));
            remap[{q, ext}] = inn;
        } else if (kw == "FORM") {
            if (!fid) throw ParseError(lineno, "FORM before FIELD");
            if (toks.size() != 6 || toks[2] != "LEVEL" || toks[4] != "COEFF")
                throw ParseError(lineno, "FORM <label> LEVEL <level> COEFF <poly>");
            NewformRecord rec;
            rec.label = toks[1];
            rec.field = *fid;
            rec.level = parse_level(*fid, toks[3], lineno);
            std::vector<Rat> cc;
            for (const std::string& s : nfdbdetail::split_on(toks[5], ',')) {
                try {
                    cc.emplace_back(Int(s));
                } catch (...) {
                    throw ParseError(lineno, "bad coefficient '" + s + "'");
                }
            }
            rec.coeff_poly = QPoly(std::move(cc));
            if (rec.coeff_poly.degree() < 1 || rec.coeff_poly.lead() != 1)
                throw ParseError(lineno, "coefficient polynomial must be monic of degree >= 1");
            if (by_label.count(rec.label)) throw ParseError(lineno, "duplicate label " + rec.label);
            by_label[rec.label] = records.size();
            records.push_back(std::move(rec));
        } else if (kw == "EV") {
            if (toks.size() != 6 || toks[2] != "P" || toks[4] != "VAL")
                throw ParseError(lineno, "EV <label> P <q>,<slot> VAL <coeffs>");
            auto it = by_label.find(toks[1]);
            if (it == by_label.end()) throw ParseError(lineno, "EV for unknown form " + toks[1]);
            NewformRecord& rec = records[it->second];
            auto qi = nfdbdetail::split_on(toks[3], ',');
            if (qi.size() != 2) throw ParseError(lineno, "P takes q,<slot-index>");
            i64 q = std::stol(qi[0]);
            int idx = std::stoi(qi[1]);
            if (auto rm = remap.find({q, idx}); rm != remap.end()) idx = rm->second;
            std::vector<PrimeSlot> slots;
            try {
                slots = prime_split(rec.field, q);
            } catch (const std::exception& e) {
                throw ParseError(lineno, std::string("EV prime rejected: ") + e.what());
            }
            if (idx < 0 || idx >= (int)slots.size())
                throw SlotMismatch("no slot " + std::to_string(idx) + " above " + std::to_string(q));
            std::vector<Rat> val;
            for (const std::string& s : nfdbdetail::split_on(toks[5], ',')) {
                try {
                    val.emplace_back(Rat(s));
                } catch (...) {
                    throw ParseError(lineno, "bad eigenvalue coefficient '" + s + "'");
                }
                val.back().canonicalize();
            }
            if ((int)val.size() > rec.coeff_degree())
                throw ParseError(lineno, "eigenvalue has more coordinates than the coefficient degree");
            val.resize(rec.coeff_degree(), Rat(0));
            if (rec.coeff_degree() <= 2 &&
                !nfdbdetail::hasse_screen(rec.coeff_poly, val, slots[idx].norm()))
                throw ParseError(lineno, "eigenvalue fails the Hasse screen at " + toks[3]);
            rec.eigenvalues[slots[idx]] = std::move(val);
        } else {
            throw ParseError(lineno, "unknown keyword '" + kw + "'");
        }
    }
    return records;
}

inline std::string field_name(FieldId f) { return field_spec(f).name; }

inline std::string serialize_level(const std::vector<std::pair<PrimeSlot, int>>& level) {
    std::string out;
    for (size_t i = 0; i < level.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(level[i].first.q) + "." + std::to_string(level[i].first.index) + "^" +
               std::to_string(level[i].second);
    }
    return out;
}

inline std::string serialize_hilbert_db(const std::vector<NewformRecord>& records) {
    std::ostringstream out;
    std::optional<FieldId> cur;
    for (const auto& rec : records) {
        if (!cur || *cur != rec.field) {
            out << "FIELD " << field_name(rec.field) << "\n";
            cur = rec.field;
        }
        out << "FORM " << rec.label << " LEVEL " << serialize_level(rec.level) << " COEFF ";
        for (int i = 0; i <= rec.coeff_poly.degree(); ++i) {
            if (i) out << ",";
            out << to_str(rec.coeff_poly.coeff(i));
        }
        out << "\n";
        for (const auto& [slot, val] : rec.eigenvalues) {
            out << "EV " << rec.label << " P " << slot.q << "," << slot.index << " VAL ";
            bool first = true;
            for (const auto& v : val) {
                if (!first) out << ",";
                out << to_str(v);
                first = false;
            }
            out << "\n";
        }
    }
    return out.str();
}

// --- rational curve tables --------------------------------------------------------

inline std::vector<RationalCurveEntry> parse_rational_db(const std::string& text) {
    std::vector<RationalCurveEntry> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        auto toks = nfdbdetail::split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 7) throw ParseError(lineno, "expected: label N a1 a2 a3 a4 a6");
        RationalCurveEntry e;
        e.label = toks[0];
        try {
            e.conductor = Int(toks[1]);
            e.model = Model::from_rat(FieldId::Q, Rat(Int(toks[2])), Rat(Int(toks[3])),
                                      Rat(Int(toks[4])), Rat(Int(toks[5])), Rat(Int(toks[6])));
        } catch (...) {
            throw ParseError(lineno, "bad integer token");
        }
        invariants(e.model);  // nonsingular
        Int N = conductor_Q(e.model);
        if (N != e.conductor)
            throw ConductorMismatch("curve " + e.label + ": recomputed conductor " + to_str(N) +
                                    " != declared " + to_str(e.conductor));
        e.two_torsion = has_rational_two_torsion(e.model);
        for (i64 q = 2; q <= 100; ++q) {
            if (!is_prime(Int(q))) continue;
            e.traces[q] = frobenius_trace_Q(e.model, q);
        }
        out.push_back(std::move(e));
    }
    return out;
}

// A rational-curve-backed record over a number field: eigenvalues computed on
// demand by counting points on the backing curve.
inline NewformRecord curve_backed_form(const std::string& label, const Model& curve,
                                       std::vector<std::pair<PrimeSlot, int>> level = {}) {
    NewformRecord rec;
    rec.label = label;
    rec.field = curve.fid;
    rec.level = std::move(level);
    rec.coeff_poly = QPoly({Rat(0), Rat(1)});  // x: the rational coefficient field
    rec.backing_curve = curve;
    return rec;
}

}  // namespace frey
