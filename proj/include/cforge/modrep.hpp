#pragma once

#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "fplin.hpp"
#include "pgroup.hpp"

namespace cforge {

// F_p-modules for a finite group given by a GroupTable.  The group acts on
// row vectors from the right: v -> v * X(g), with X(gh) = X(g) X(h).
// Action matrices are materialized eagerly for every element along the
// breadth-first word tree, so lookups are plain array reads.

class ModuleRep {
  public:
    /// Build from one matrix per group generator.
    ModuleRep(const GroupTable* G, std::vector<MatGFp> gen_actions)
        : g_(G), gens_(std::move(gen_actions)) {
        require(!gens_.empty() && gens_.size() == G->num_generators(),
                "module: one action matrix per generator required");
        p_ = gens_[0].p;
        dim_ = gens_[0].rows;
        for (const auto& m : gens_)
            require(m.p == p_ && m.rows == dim_ && m.cols == dim_,
                    "module: generator actions must be square and share the modulus");
        act_.reserve(G->size());
        act_.push_back(MatGFp::identity(p_, dim_));
        for (uint32_t i = 1; i < G->size(); ++i) {
            auto [par, s] = G->word_parent(i);
            act_.push_back(mat_mul(act_[par], gens_[s]));
        }
    }

    /// Build from one explicit matrix per group element (table order).
    ModuleRep(const GroupTable* G, std::vector<MatGFp> all, int)
        : g_(G), act_(std::move(all)) {
        require(act_.size() == G->size(), "module: one action matrix per element required");
        p_ = act_[0].p;
        dim_ = act_[0].rows;
        gens_.reserve(G->num_generators());
        for (uint32_t s = 0; s < G->num_generators(); ++s)
            gens_.push_back(act_[G->generator_indices()[s]]);
    }

    const GroupTable& group() const { return *g_; }
    uint8_t p() const { return p_; }
    uint32_t dim() const { return dim_; }
    const MatGFp& action(uint32_t g) const { return act_[g]; }
    const MatGFp& generator_action(uint32_t s) const { return gens_[s]; }

  private:
    const GroupTable* g_;
    uint8_t p_ = 0;
    uint32_t dim_ = 0;
    std::vector<MatGFp> gens_;
    std::vector<MatGFp> act_;
};

/// Permutation module on the points the group acts on: X(g)[i, i^g] = 1.
inline ModuleRep permutation_module(const GroupTable& G, uint8_t p) {
    std::vector<MatGFp> all;
    all.reserve(G.size());
    for (uint32_t g = 0; g < G.size(); ++g) {
        MatGFp m(p, G.degree(), G.degree());
        for (uint32_t i = 0; i < G.degree(); ++i) m.at(i, G.perm(g)(i)) = 1;
        all.push_back(std::move(m));
    }
    return ModuleRep(&G, std::move(all), 0);
}

inline ModuleRep trivial_module(const GroupTable& G, uint8_t p) {
    std::vector<MatGFp> gens(G.num_generators(), MatGFp::identity(p, 1));
    return ModuleRep(&G, std::move(gens));
}

/// Splitting of the permutation module P = I + V: I is the span of the
/// all-ones vector, V the kernel of the coordinate sum, with fixed basis
/// b_i = e_i - e_{n-1} (i < n-1).  Requires the degree n invertible mod p.
struct PermutationSplitting {
    ModuleRep P, I, V;
    MatGFp embed_V;    // (n-1) x n, row i = e_i - e_{n-1}
    MatGFp project_V;  // n x (n-1), w -> coefficients of w - s*ones in basis b
    MatGFp embed_I;    // 1 x n, all ones
    MatGFp project_I;  // n x 1, w -> sum(w)/n
};

inline PermutationSplitting decompose_permutation_module(const GroupTable& G, uint8_t p) {
    uint32_t n = G.degree();
    require(n % p != 0, "splitting: point count must be invertible mod p");
    uint8_t ninv = inv_mod_p(static_cast<uint8_t>(n % p), p);

    MatGFp embed_V(p, n - 1, n), project_V(p, n, n - 1);
    for (uint32_t i = 0; i < n - 1; ++i) {
        embed_V.at(i, i) = 1;
        embed_V.at(i, n - 1) = static_cast<uint8_t>(p - 1);
        for (uint32_t j = 0; j < n; ++j)
            project_V.at(j, i) =
                static_cast<uint8_t>(((j == i ? 1 : 0) + p - ninv % p) % p);
    }
    MatGFp embed_I(p, 1, n), project_I(p, n, 1);
    for (uint32_t j = 0; j < n; ++j) {
        embed_I.at(0, j) = 1;
        project_I.at(j, 0) = ninv;
    }

    ModuleRep P = permutation_module(G, p);
    std::vector<MatGFp> vact;
    vact.reserve(G.size());
    for (uint32_t g = 0; g < G.size(); ++g)
        vact.push_back(mat_mul(embed_V, mat_mul(P.action(g), project_V)));
    ModuleRep V(&G, std::move(vact), 0);
    ModuleRep I = trivial_module(G, p);
    return {std::move(P), std::move(I), std::move(V),
            std::move(embed_V), std::move(project_V), std::move(embed_I), std::move(project_I)};
}

/// Basis of the subspace of vectors fixed by the whole group (fixed under
/// the generators suffices).
inline std::vector<VecGFp> fixed_points(const ModuleRep& M) {
    uint32_t dim = M.dim(), k = M.group().num_generators();
    MatGFp stacked(M.p(), dim, dim * k);
    for (uint32_t s = 0; s < k; ++s) {
        const MatGFp& X = M.generator_action(s);
        for (uint32_t i = 0; i < dim; ++i)
            for (uint32_t j = 0; j < dim; ++j)
                stacked.at(i, s * dim + j) =
                    static_cast<uint8_t>((X.at(i, j) + (i == j ? M.p() - 1 : 0)) % M.p());
    }
    // left kernel of [X(s) - 1 | ...] = right kernel of its transpose
    return kernel_basis(transpose(stacked));
}

/// Dimension of the submodule generated by v.
inline uint32_t spin_dimension(const ModuleRep& M, const VecGFp& v) {
    require(v.p == M.p() && v.e.size() == M.dim(), "spin: vector shape mismatch");
    SparseEliminator elim(M.p(), M.dim());
    std::vector<VecGFp> queue;
    auto offer = [&](const VecGFp& w) {
        auto row = to_sparse_row(w.e.data(), M.dim());
        if (row.empty() || elim.reduces_to_zero(row)) return;
        elim.add_row(std::move(row));
        queue.push_back(w);
    };
    offer(v);
    for (size_t head = 0; head < queue.size(); ++head) {
        VecGFp cur = queue[head];
        for (uint32_t s = 0; s < M.group().num_generators(); ++s)
            offer(vec_mat(cur, M.generator_action(s)));
    }
    return elim.rank();
}

/// Exhaustive irreducibility: every nonzero vector generates everything.
/// One vector per scalar line is spun.  Throws if p^dim exceeds the cap.
inline bool is_irreducible(const ModuleRep& M, uint64_t cap = 1ull << 20) {
    require(M.dim() >= 1, "irreducibility: positive dimension required");
    uint64_t total = 1;
    for (uint32_t i = 0; i < M.dim(); ++i) {
        total *= M.p();
        require(total <= cap, "irreducibility: search space exceeds cap");
    }
    VecGFp v{M.p(), std::vector<uint8_t>(M.dim(), 0)};
    for (uint64_t idx = 1; idx < total; ++idx) {
        // odometer step
        for (uint32_t i = 0; i < M.dim(); ++i) {
            if (++v.e[i] < M.p()) break;
            v.e[i] = 0;
        }
        uint32_t first = 0;
        while (first < M.dim() && v.e[first] == 0) ++first;
        if (v.e[first] != 1) continue;  // one representative per scalar line
        if (spin_dimension(M, v) != M.dim()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Fixed-point character probes.
//
// The permutation module's Brauer character at a p-regular element is its
// fixed-point count on the projective line, so the q-dimensional summand V
// has character fix(g) - 1 there.  Probed classes and reference values:
//   identity                 -> q
//   involution               -> 0 for q even (unipotent, one fixed point);
//                               -1 for q = 3 mod 4 (torus without fixed
//                               points); +1 for q = 1 mod 4 (the involution
//                               then lies in the split torus and fixes two
//                               points -- the classical table prints -1 for
//                               all odd q, which counts only the 3 mod 4 case)
//   order (q-1)_{p'} / d     -> +1 (degenerate when that order is 1: the
//                               class collapses to the identity and no
//                               independent check exists)
//   order (q+1) / d          -> -1
// where d = gcd(2, q-1) and (q-1)_{p'} is q-1 with all factors p removed.

struct CharProbe {
    std::string label;
    uint64_t order = 0;       // element order requested
    bool degenerate = false;  // collapsed onto the identity class
    uint32_t element = 0;     // probed element (least index of that order)
    int64_t measured = 0;     // fix(g) - 1
    int64_t expected = 0;
    bool pass = false;
};

inline std::vector<CharProbe> brauer_char_probes(const ProjectiveAction& pa, uint8_t p) {
    const GroupTable& G = pa.group;
    uint64_t q = pa.field->order();
    uint64_t d = std::gcd<uint64_t>(2, q - 1);
    uint64_t split_part = q - 1;
    while (split_part % p == 0) split_part /= p;

    auto fix_count = [&](uint32_t g) {
        int64_t c = 0;
        for (uint32_t i = 0; i < G.degree(); ++i)
            if (G.perm(g)(i) == i) ++c;
        return c;
    };
    auto probe = [&](std::string label, uint64_t ord, int64_t expected) {
        CharProbe pr;
        pr.label = std::move(label);
        pr.order = ord;
        pr.degenerate = (ord == 1 && pr.label != "identity");
        auto e = find_element_of_order(G, ord);
        require(e.has_value(), "character probe: no element of requested order");
        pr.element = *e;
        pr.measured = fix_count(*e) - 1;
        pr.expected = expected;
        pr.pass = pr.degenerate || pr.measured == pr.expected;
        return pr;
    };

    int64_t invol_expected = q % 2 == 0 ? 0 : (q % 4 == 3 ? -1 : 1);
    return {
        probe("identity", 1, static_cast<int64_t>(q)),
        probe("involution", 2, invol_expected),
        probe("split-torus element", split_part / d, 1),
        probe("nonsplit-torus element", (q + 1) / d, -1),
    };
}

}  // namespace cforge
