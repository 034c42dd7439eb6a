// Proof traces: ordered, replayable records of elimination steps with numeric
// evidence and provenance (computed here vs cited from the literature).
#pragma once

#include <json.hpp>

#include "intutil.hpp"

namespace frey {

// A required computed step failed on the supplied data. Never downgraded to a
// citation; callers map this to a verification-failure exit.
struct VerificationFailure : std::runtime_error {
    explicit VerificationFailure(const std::string& w) : std::runtime_error(w) {}
};

enum class Criterion {
    trace_gcd,
    refined_i_ii,
    level_raising,
    parity,
    mult_congruence,
    inertia_v1,
    cited,
};

inline const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::trace_gcd: return "trace_gcd";
        case Criterion::refined_i_ii: return "refined_i_ii";
        case Criterion::level_raising: return "level_raising";
        case Criterion::parity: return "parity";
        case Criterion::mult_congruence: return "mult_congruence";
        case Criterion::inertia_v1: return "inertia_v1";
        case Criterion::cited: return "cited";
    }
    return "?";
}

struct EliminationStep {
    std::string target;   // form label, curve label, or branch description
    std::string p_scope;  // which exponents this step handles
    Criterion criterion = Criterion::cited;
    std::string evidence;  // numeric evidence, deterministic rendering
    std::string ref;       // literature citation or data provenance
    bool verified = false; // true when recomputed here

    nlohmann::ordered_json to_json(int idx) const {
        nlohmann::ordered_json j;
        j["step"] = idx;
        j["target"] = target;
        j["p_scope"] = p_scope;
        j["criterion"] = criterion_name(criterion);
        j["evidence"] = evidence;
        j["ref"] = ref;
        j["verified"] = verified;
        return j;
    }
};

enum class Verdict { resolved, resolved_except_listed_p, data_missing };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::resolved: return "resolved";
        case Verdict::resolved_except_listed_p: return "resolved_except_listed_p";
        case Verdict::data_missing: return "data_missing";
    }
    return "?";
}

struct ProofTrace {
    std::string equation;  // e.g. "x^5 + y^5 = 3 z^p"
    int r = 5;
    Int d = 3;
    std::vector<EliminationStep> steps;
    Verdict verdict = Verdict::data_missing;
    std::vector<long> excluded_p;

    void add(EliminationStep s) { steps.push_back(std::move(s)); }
    void cite(const std::string& target, const std::string& scope, const std::string& what,
              const std::string& ref) {
        steps.push_back({target, scope, Criterion::cited, what, ref, false});
    }

    bool fully_computed() const {
        for (const auto& s : steps)
            if (!s.verified) return false;
        return true;
    }

    std::string render_text() const {
        std::string out;
        out += "equation: " + equation + "\n";
        int i = 0;
        for (const auto& s : steps) {
            out += "  [" + std::to_string(++i) + "] (" + s.p_scope + ") " + s.target + "\n";
            out += "      criterion: " + std::string(criterion_name(s.criterion)) +
                   (s.verified ? "  [computed]" : "  [cited]") + "\n";
            if (!s.evidence.empty()) out += "      evidence: " + s.evidence + "\n";
            if (!s.ref.empty()) out += "      ref: " + s.ref + "\n";
        }
        out += "verdict: " + std::string(verdict_name(verdict));
        if (!excluded_p.empty()) {
            out += "  excluded p: {";
            for (size_t k = 0; k < excluded_p.size(); ++k)
                out += (k ? "," : "") + std::to_string(excluded_p[k]);
            out += "}";
        }
        out += "\n";
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["equation"] = equation;
        j["r"] = r;
        j["d"] = d.get_str();
        j["steps"] = nlohmann::ordered_json::array();
        int i = 0;
        for (const auto& s : steps) j["steps"].push_back(s.to_json(++i));
        j["verdict"] = verdict_name(verdict);
        j["excluded_p"] = excluded_p;
        return j;
    }
};

}  // namespace frey
