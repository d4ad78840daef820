#pragma once

#include "mouldcalc/mould.hpp"
#include "mouldcalc/vfield.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace mouldcalc {

using json = nlohmann::json;

/// Canonical JSON form of a Scalar: a ["re", "im"] pair of rational strings.
/// Readers also accept a bare rational string for real values.
inline json scalar_to_json(const Scalar& s) {
    return json::array({s.re().str(), s.im().str()});
}

inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw parse_error("rational must be a string or an integer: " + j.dump());
}

inline Scalar scalar_from_json(const json& j) {
    if (j.is_array() && j.size() == 2)
        return {rational_from_json(j.at(0)), rational_from_json(j.at(1))};
    if (j.is_array())
        throw parse_error("scalar pair needs exactly two components: " + j.dump());
    return Scalar(rational_from_json(j));
}

/// Vector-field document:
///   {"dim": d, "lambda": [scalar...], "terms": [{"component": i (1-based),
///    "exponents": [int...], "coeff": scalar}, ...]}
/// The linear diagonal part appears only in "lambda".
inline json field_to_json(const PreparedVectorField& x) {
    json j;
    j["dim"] = x.dim();
    json lam = json::array();
    for (const Scalar& s : x.lam.lambda) lam.push_back(scalar_to_json(s));
    j["lambda"] = std::move(lam);
    json terms  = json::array();
    for (const auto& [n, b] : x.ops)
        for (std::size_t i = 0; i < b.coeff.size(); ++i) {
            if (b.coeff[i].is_zero()) continue;
            json t;
            t["component"] = i + 1;
            Monomial m(n.comp.size());
            for (std::size_t k = 0; k < m.size(); ++k) m[k] = n.comp[k] + (k == i ? 1 : 0);
            t["exponents"] = m;
            t["coeff"]     = scalar_to_json(b.coeff[i]);
            terms.push_back(std::move(t));
        }
    j["terms"] = std::move(terms);
    return j;
}

inline PreparedVectorField field_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("lambda") || !j.contains("terms"))
        throw parse_error("field document needs dim, lambda and terms");
    const auto d = j.at("dim").get<std::size_t>();
    Spectrum lam;
    for (const json& s : j.at("lambda")) lam.lambda.push_back(scalar_from_json(s));
    if (lam.lambda.size() != d)
        throw parse_error("lambda has " + std::to_string(lam.lambda.size()) +
                          " entries for dim " + std::to_string(d));
    std::vector<FieldTerm> terms;
    for (const json& t : j.at("terms")) {
        FieldTerm ft;
        ft.component = t.at("component").get<std::size_t>();
        ft.exponents = t.at("exponents").get<Monomial>();
        ft.coeff     = scalar_from_json(t.at("coeff"));
        terms.push_back(std::move(ft));
    }
    return parse_field(terms, std::move(lam));
}

inline PreparedVectorField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open field file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("field file " + path + ": " + e.what());
    }
    try {
        return field_from_json(j);
    } catch (const json::exception& e) {
        throw parse_error("field file " + path + ": " + e.what());
    }
}

inline void save_field(const PreparedVectorField& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    out << field_to_json(x).dump(2) << "\n";
}

/// Tabulated-mould document: {"max_len": L, "alphabet": [[int...],...],
/// "values": [{"word": [[int...],...], "value": scalar}, ...]}; absent words
/// are zero.
inline json tabulated_to_json(const TabulatedData& t) {
    json j;
    j["max_len"]  = t.max_len;
    json alphabet = json::array();
    for (const Letter& n : t.alphabet) alphabet.push_back(n.comp);
    j["alphabet"] = std::move(alphabet);
    json values   = json::array();
    for (const auto& [w, v] : t.table) {
        if (v.is_zero()) continue;
        json e;
        json letters = json::array();
        for (const Letter& n : w.letters()) letters.push_back(n.comp);
        e["word"]  = std::move(letters);
        e["value"] = scalar_to_json(v);
        values.push_back(std::move(e));
    }
    j["values"] = std::move(values);
    return j;
}

inline TabulatedData tabulated_from_json(const json& j) {
    TabulatedData t;
    t.max_len = j.at("max_len").get<std::size_t>();
    for (const json& n : j.at("alphabet")) t.alphabet.insert(Letter{n.get<std::vector<int>>()});
    for (const json& e : j.at("values")) {
        std::vector<Letter> letters;
        for (const json& n : e.at("word")) letters.push_back(Letter{n.get<std::vector<int>>()});
        t.table.emplace(Word(std::move(letters)), scalar_from_json(e.at("value")));
    }
    return t;
}

} // namespace mouldcalc
