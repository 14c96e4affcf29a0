#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace hecke::cli {

using nlohmann::json;

namespace {

cplx parse_entry(const json& e) {
    if (e.is_number()) return {e.get<double>(), 0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw DomainError("matrix entries must be [re, im] pairs");
}

// Accepts a flat row-major list of dim^2 entries or a list of dim rows.
CMat parse_matrix(const json& m, int dim, const char* name) {
    if (!m.is_array()) throw DomainError(std::string(name) + " must be an array");
    CMat r(dim, dim);
    if (static_cast<int>(m.size()) == dim * dim) {
        bool flat = true;
        for (auto& e : m) flat &= e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number());
        if (flat) {
            for (int i = 0; i < dim * dim; ++i) r(i / dim, i % dim) = parse_entry(m[i]);
            return r;
        }
    }
    if (static_cast<int>(m.size()) != dim)
        throw DomainError(std::string(name) + " has the wrong number of entries for dim " + std::to_string(dim));
    for (int i = 0; i < dim; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != dim)
            throw DomainError(std::string(name) + " row " + std::to_string(i) + " has the wrong length");
        for (int j = 0; j < dim; ++j) r(i, j) = parse_entry(m[i][j]);
    }
    return r;
}

json matrix_json(const CMat& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) a.push_back({m(i, j).real(), m(i, j).imag()});
    return a;
}

}  // namespace

UnitaryRep parse_rep(const HeckeGroup& G, const json& doc) {
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("S") || !doc.contains("T"))
        throw DomainError("rep file needs dim, S and T");
    int dim = doc["dim"].get<int>();
    if (dim < 1) throw DomainError("dim must be positive");
    CMat S = parse_matrix(doc["S"], dim, "S"), T = parse_matrix(doc["T"], dim, "T");
    std::optional<CMat> Q;
    if (doc.contains("Q") && !doc["Q"].is_null()) Q = parse_matrix(doc["Q"], dim, "Q");
    return rep_from_generators(G, S, T, Q);
}

UnitaryRep load_rep(const HeckeGroup& G, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open rep file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("rep file " + path + " is not valid JSON: " + e.what());
    }
    try {
        return parse_rep(G, doc);
    } catch (const json::exception& e) {
        throw DomainError("rep file " + path + ": " + e.what());
    }
}

json rep_to_json(const UnitaryRep& chi) {
    json j{{"dim", chi.dim}, {"S", matrix_json(chi.S)}, {"T", matrix_json(chi.T)}};
    if (chi.Q) j["Q"] = matrix_json(*chi.Q);
    return j;
}

HeckeGroup GroupArgs::group() const {
    if (q && lambda) throw DomainError("give either --q or --lambda, not both");
    if (q) return hecke_group_q(*q);
    if (lambda) return hecke_group_lambda(*lambda);
    throw DomainError("one of --q or --lambda is required");
}

UnitaryRep GroupArgs::rep(const HeckeGroup& G, size_t i) const {
    if (i < reps.size()) return load_rep(G, reps[i]);
    return trivial_rep(G);
}

}  // namespace hecke::cli
