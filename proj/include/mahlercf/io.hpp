#pragma once

// JSON and CSV forms of the library's values.

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "approx.hpp"
#include "contfrac.hpp"
#include "laurent.hpp"
#include "padic.hpp"
#include "poly.hpp"
#include "structure.hpp"

namespace mahlercf::io {

using json = nlohmann::ordered_json;

/// Integers that fit in 64 bits become JSON numbers, larger ones strings.
inline json integer(const Integer& z) {
    if (z.fits_slong_p()) return z.get_si();
    return to_string(z);
}

inline Integer parse_integer_field(const json& j) {
    if (j.is_number_integer()) return Integer(j.get<long>());
    if (j.is_string()) return mahlercf::parse_integer(j.get<std::string>());
    throw InvalidParameter("expected an integer");
}

inline json poly(const RatPoly& p) {
    json coeffs = json::object();
    for (const auto& [k, c] : p.terms()) coeffs[std::to_string(k)] = to_string(c);
    return {{"coeffs", coeffs}};
}

inline RatPoly parse_poly_json(const json& j) {
    RatPoly::Terms t;
    for (const auto& [k, v] : j.at("coeffs").items()) {
        const Rational c = parse_rational(v.get<std::string>());
        if (c != 0) t.emplace(std::stoll(k), c);
    }
    return RatPoly(std::move(t));
}

inline json series(const LaurentSeries& s) {
    json coeffs = json::object();
    for (auto it = s.terms().rbegin(); it != s.terms().rend(); ++it) coeffs[std::to_string(it->first)] = to_string(it->second);
    json out;
    if (s.is_exact()) out["floor"] = nullptr;
    else out["floor"] = s.floor();
    out["coeffs"] = coeffs;
    return out;
}

inline json cf(const CFExpansion& e, const std::vector<Rational>* betas = nullptr) {
    json a = json::array(), conv = json::array();
    for (const auto& q : e.partial_quotients) a.push_back(poly(q));
    for (const auto& c : e.convergents) {
        json r = c.rate ? json(*c.rate) : json(nullptr);
        conv.push_back({{"n", c.index}, {"p", poly(c.p)}, {"q", poly(c.q)}, {"rate", r}});
    }
    json out{{"a", a}, {"convergents", conv}};
    json b = json::array();
    if (betas)
        for (const auto& x : *betas) b.push_back(to_string(x));
    out["betas"] = b;
    return out;
}

inline json report(const IdentityReport& r) {
    json out{{"identity", to_string(r.identity)},
             {"d", r.d},
             {"range", {r.lo, r.hi}},
             {"status", r.passed() ? "pass" : "fail"},
             {"failures", r.failures}};
    if (!r.notes.empty()) out["notes"] = r.notes;
    return out;
}

inline json witness(const BadApproxWitness& w) {
    return {{"a", integer(w.a)},
            {"d", w.d},
            {"p", w.p},
            {"n0", w.n0},
            {"t", w.t},
            {"residue", integer(w.residue)},
            {"conditions", {{"c1", w.conditions.c1}, {"c2", w.conditions.c2}, {"c3", w.conditions.c3}, {"c4", w.conditions.c4}}},
            {"qt", w.qt.to_csv()}};
}

/// Rebuilds a witness from its JSON; conditions are not trusted and must be revalidated.
inline BadApproxWitness parse_witness(const json& j) {
    BadApproxWitness w;
    w.a = parse_integer_field(j.at("a"));
    w.d = j.at("d").get<int>();
    w.p = j.at("p").get<u64>();
    w.n0 = j.at("n0").get<std::uint64_t>();
    w.t = j.at("t").get<std::size_t>();
    w.residue = parse_integer_field(j.at("residue"));
    w.qt = parse_int_poly(j.at("qt").get<std::string>());
    return w;
}

inline json certified(const CertifiedValue& v, unsigned digits = 40) {
    return {{"value", to_string(v.value)},
            {"error_bound", to_string(v.error_bound)},
            {"decimal", to_decimal(v.value, digits)},
            {"target", v.target}};
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string table_csv(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    os << "p,t,residue,class_count,a_mod_p2\n";
    for (const auto& r : rows) {
        std::string classes;
        for (std::size_t i = 0; i < r.classes.size(); ++i) classes += (i ? " " : "") + std::to_string(r.classes[i]);
        os << r.p << ',' << r.t << ',' << r.residue << ',' << r.classes.size() << ',' << csv_escape(classes) << '\n';
    }
    return os.str();
}

}  // namespace mahlercf::io
