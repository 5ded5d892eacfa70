#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "extgrp.hpp"

namespace cforge {

using Json = nlohmann::json;

// JSON artifact layer.  Plain nlohmann objects keep their keys sorted, and
// every writer below emits fully determined content, so identical inputs
// serialize to identical bytes.

// ---------------------------------------------------------------------------
// Primitives.

inline Json mat_to_json(const MatGFp& M) {
    Json rows = Json::array();
    for (uint32_t r = 0; r < M.rows; ++r) {
        Json row = Json::array();
        for (uint32_t c = 0; c < M.cols; ++c) row.push_back(M.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline MatGFp mat_from_json(uint8_t p, const Json& j) {
    require(j.is_array() && !j.empty(), "matrix json: nonempty array of rows expected");
    uint32_t rows = static_cast<uint32_t>(j.size());
    uint32_t cols = static_cast<uint32_t>(j[0].size());
    MatGFp M(p, rows, cols);
    for (uint32_t r = 0; r < rows; ++r) {
        require(j[r].is_array() && j[r].size() == cols, "matrix json: ragged rows");
        for (uint32_t c = 0; c < cols; ++c) {
            int64_t v = j[r][c].get<int64_t>();
            require(v >= 0 && v < p, "matrix json: entry out of range");
            M.at(r, c) = static_cast<uint8_t>(v);
        }
    }
    return M;
}

/// Nonzero rows of a value table as [[g, [coeffs]], ...], sorted by g.
inline Json cochain_to_entries(const Cochain1& c) {
    Json entries = Json::array();
    for (uint32_t g = 0; g < c.n; ++g) {
        const uint8_t* row = c.at(g);
        bool nonzero = false;
        for (uint32_t k = 0; k < c.dim; ++k) nonzero = nonzero || row[k] != 0;
        if (!nonzero) continue;
        Json coeffs = Json::array();
        for (uint32_t k = 0; k < c.dim; ++k) coeffs.push_back(row[k]);
        entries.push_back(Json::array({g, std::move(coeffs)}));
    }
    return entries;
}

inline Cochain1 cochain_from_entries(uint8_t p, uint32_t n, uint32_t dim, const Json& j) {
    Cochain1 c(p, n, dim);
    int64_t prev = -1;
    for (const auto& e : j) {
        require(e.is_array() && e.size() == 2, "cochain json: [g, coeffs] entries expected");
        int64_t g = e[0].get<int64_t>();
        require(g > prev && g < n, "cochain json: rows must be sorted and in range");
        prev = g;
        const Json& coeffs = e[1];
        require(coeffs.size() == dim, "cochain json: coefficient length mismatch");
        bool nonzero = false;
        for (uint32_t k = 0; k < dim; ++k) {
            int64_t v = coeffs[k].get<int64_t>();
            require(v >= 0 && v < p, "cochain json: entry out of range");
            c.at(static_cast<uint32_t>(g))[k] = static_cast<uint8_t>(v);
            nonzero = nonzero || v != 0;
        }
        require(nonzero, "cochain json: zero rows must be omitted");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Field.

inline Json field_to_json(const Field& f) {
    Json j;
    j["l"] = f->characteristic();
    j["m"] = f->degree();
    j["modulus"] = f->modulus();
    return j;
}

inline Field field_from_json(const Json& j) {
    Field f = make_field(j.at("l").get<uint32_t>(), j.at("m").get<uint32_t>());
    require(j.at("modulus").get<std::vector<uint32_t>>() == f->modulus(),
            "field json: modulus is not the canonical one");
    return f;
}

// ---------------------------------------------------------------------------
// Group table.  Elements are permutation images in the canonical breadth-
// first enumeration order; the loader rebuilds the closure and insists the
// stored order matches, so a loaded table is bit-for-bit the canonical one.

inline Json group_to_json(const GroupTable& G, uint64_t q, uint8_t p) {
    Json j;
    j["q"] = q;
    j["p"] = p;
    j["degree"] = G.degree();
    Json elems = Json::array();
    for (uint32_t i = 0; i < G.size(); ++i) elems.push_back(G.perm(i).img);
    j["elements"] = std::move(elems);
    j["generators"] = G.generator_indices();
    return j;
}

inline GroupTable group_from_json(const Json& j) {
    auto elems = j.at("elements").get<std::vector<std::vector<uint32_t>>>();
    auto gen_idx = j.at("generators").get<std::vector<uint32_t>>();
    uint32_t degree = j.at("degree").get<uint32_t>();
    require(!elems.empty(), "group json: empty element list");
    std::vector<Permutation> gens;
    for (uint32_t s : gen_idx) {
        require(s < elems.size(), "group json: generator index out of range");
        require(elems[s].size() == degree, "group json: degree mismatch");
        gens.push_back(Permutation{elems[s]});
    }
    GroupTable G = GroupTable::closure(std::move(gens));
    require(G.size() == elems.size(), "group json: element list is not the closure");
    for (uint32_t i = 0; i < G.size(); ++i)
        require(G.perm(i).img == elems[i], "group json: element order is not canonical");
    require(G.generator_indices() == gen_idx, "group json: generator indices mismatch");
    return G;
}

// ---------------------------------------------------------------------------
// Module.

inline Json module_to_json(const ModuleRep& M) {
    Json j;
    j["p"] = M.p();
    j["dim"] = M.dim();
    Json mats = Json::array();
    for (uint32_t s = 0; s < M.group().num_generators(); ++s)
        mats.push_back(mat_to_json(M.generator_action(s)));
    j["generator_matrices"] = std::move(mats);
    return j;
}

inline ModuleRep module_from_json(const GroupTable& G, const Json& j) {
    uint8_t p = j.at("p").get<uint8_t>();
    uint32_t dim = j.at("dim").get<uint32_t>();
    std::vector<MatGFp> gens;
    for (const auto& m : j.at("generator_matrices")) gens.push_back(mat_from_json(p, m));
    ModuleRep M(&G, std::move(gens));
    require(M.dim() == dim, "module json: dimension mismatch");
    return M;
}

// ---------------------------------------------------------------------------
// Degree-2 cocycle: only nonzero values, sorted lexicographically by (g, h).

inline Json cocycle_to_json(const Cocycle2& tau, uint64_t q) {
    Json j;
    j["q"] = q;
    j["p"] = tau.p;
    j["module_dim"] = tau.dim;
    Json entries = Json::array();
    for (uint32_t g = 0; g < tau.n; ++g)
        for (uint32_t h = 0; h < tau.n; ++h) {
            const uint8_t* v = tau.at(g, h);
            bool nonzero = false;
            for (uint32_t k = 0; k < tau.dim; ++k) nonzero = nonzero || v[k] != 0;
            if (!nonzero) continue;
            Json coeffs = Json::array();
            for (uint32_t k = 0; k < tau.dim; ++k) coeffs.push_back(v[k]);
            entries.push_back(Json::array({g, h, std::move(coeffs)}));
        }
    j["entries"] = std::move(entries);
    return j;
}

inline Cocycle2 cocycle_from_json(const Json& j, uint32_t n) {
    uint8_t p = j.at("p").get<uint8_t>();
    uint32_t dim = j.at("module_dim").get<uint32_t>();
    Cocycle2 tau(p, n, dim);
    int64_t prev = -1;
    for (const auto& e : j.at("entries")) {
        require(e.is_array() && e.size() == 3, "cocycle json: [g, h, coeffs] entries expected");
        int64_t g = e[0].get<int64_t>(), h = e[1].get<int64_t>();
        require(g >= 0 && g < n && h >= 0 && h < n, "cocycle json: index out of range");
        int64_t key = g * static_cast<int64_t>(n) + h;
        require(key > prev, "cocycle json: entries must be sorted by (g, h)");
        prev = key;
        const Json& coeffs = e[2];
        require(coeffs.size() == dim, "cocycle json: coefficient length mismatch");
        bool nonzero = false;
        for (uint32_t k = 0; k < dim; ++k) {
            int64_t v = coeffs[k].get<int64_t>();
            require(v >= 0 && v < p, "cocycle json: entry out of range");
            tau.at(static_cast<uint32_t>(g), static_cast<uint32_t>(h))[k] =
                static_cast<uint8_t>(v);
            nonzero = nonzero || v != 0;
        }
        require(nonzero, "cocycle json: zero entries must be omitted");
    }
    return tau;
}

// ---------------------------------------------------------------------------
// Automorphism records.

inline Json aut_record_to_json(const AutRecord& A) {
    Json j;
    switch (A.kind) {
        case AutRecord::Kind::shift:
            j["kind"] = "shift";
            j["delta"] = cochain_to_entries(A.delta);
            break;
        case AutRecord::Kind::pair:
            j["kind"] = "pair";
            j["nu"] = A.nu;
            j["mu"] = mat_to_json(A.mu);
            j["phi"] = cochain_to_entries(A.phi);
            break;
        case AutRecord::Kind::scalar:
            j["kind"] = "scalar";
            j["scalar"] = A.scalar;
            break;
        case AutRecord::Kind::composite: {
            j["kind"] = "composite";
            Json parts = Json::array();
            for (const auto& part : A.parts) parts.push_back(aut_record_to_json(part));
            j["parts"] = std::move(parts);
            break;
        }
    }
    return j;
}

inline AutRecord aut_record_from_json(const Json& j, uint8_t p, uint32_t n, uint32_t dim) {
    AutRecord A;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "shift") {
        A.kind = AutRecord::Kind::shift;
        A.delta = cochain_from_entries(p, n, dim, j.at("delta"));
    } else if (kind == "pair") {
        A.kind = AutRecord::Kind::pair;
        A.nu = j.at("nu").get<std::vector<uint32_t>>();
        require(A.nu.size() == n, "aut json: nu length mismatch");
        A.mu = mat_from_json(p, j.at("mu"));
        A.phi = cochain_from_entries(p, n, dim, j.at("phi"));
    } else if (kind == "scalar") {
        A.kind = AutRecord::Kind::scalar;
        int64_t c = j.at("scalar").get<int64_t>();
        require(c >= 1 && c < p, "aut json: scalar out of range");
        A.scalar = static_cast<uint8_t>(c);
    } else if (kind == "composite") {
        A.kind = AutRecord::Kind::composite;
        for (const auto& part : j.at("parts"))
            A.parts.push_back(aut_record_from_json(part, p, n, dim));
    } else {
        throw error("aut json: unknown kind '" + kind + "'");
    }
    return A;
}

// ---------------------------------------------------------------------------
// Files.

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    require(static_cast<bool>(out), "write failed: " + path);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open: " + path);
    Json j;
    in >> j;
    return j;
}

// ---------------------------------------------------------------------------
// Extension bundle: a head file referencing sibling group / module / cocycle
// files by basename, so the bundle is relocatable as a directory.

struct BundlePaths {
    std::string head, group, module, tau;
};

inline BundlePaths bundle_paths(const std::string& out) {
    std::string stem = out;
    const std::string suffix = ".json";
    if (stem.size() > suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
        stem.resize(stem.size() - suffix.size());
    return {stem + ".json", stem + ".group.json", stem + ".module.json", stem + ".tau.json"};
}

inline void write_extension_bundle(const std::string& out, const PipelineResult& pr) {
    BundlePaths paths = bundle_paths(out);
    write_json_file(paths.group, group_to_json(pr.psl->group, pr.q, pr.p));
    write_json_file(paths.module, module_to_json(pr.dec->V));
    write_json_file(paths.tau, cocycle_to_json(*pr.tau_v, pr.q));

    Json head;
    head["q"] = pr.q;
    head["p"] = pr.p;
    head["order"] = pr.E.size();
    head["kernel_order"] = pr.E.vcount();
    head["group"] = std::filesystem::path(paths.group).filename().string();
    head["module"] = std::filesystem::path(paths.module).filename().string();
    head["tau"] = std::filesystem::path(paths.tau).filename().string();
    Json prov = Json::array();
    for (const auto& st : pr.provenance) {
        Json stage;
        stage["stage"] = st.label;
        stage["detail"] = st.detail;
        prov.push_back(std::move(stage));
    }
    head["provenance"] = std::move(prov);
    write_json_file(paths.head, head);
}

struct LoadedExtension {
    uint64_t q = 0;
    uint8_t p = 0;
    std::unique_ptr<GroupTable> group;
    std::unique_ptr<ModuleRep> module;
    std::unique_ptr<Cocycle2> tau;
    ExtGroup E;
};

inline LoadedExtension load_extension_bundle(const std::string& head_path) {
    Json head = read_json_file(head_path);
    std::filesystem::path dir = std::filesystem::path(head_path).parent_path();
    auto sibling = [&](const std::string& key) {
        return (dir / head.at(key).get<std::string>()).string();
    };
    LoadedExtension le;
    le.q = head.at("q").get<uint64_t>();
    le.p = head.at("p").get<uint8_t>();
    le.group = std::make_unique<GroupTable>(group_from_json(read_json_file(sibling("group"))));
    le.module =
        std::make_unique<ModuleRep>(module_from_json(*le.group, read_json_file(sibling("module"))));
    le.tau = std::make_unique<Cocycle2>(
        cocycle_from_json(read_json_file(sibling("tau")), le.group->size()));
    le.E = build_extension(*le.module, *le.tau);
    require(le.E.size() == head.at("order").get<uint64_t>(),
            "extension bundle: recorded order mismatch");
    return le;
}

}  // namespace cforge
