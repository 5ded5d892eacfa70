#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "fplin.hpp"
#include "modrep.hpp"
#include "pgroup.hpp"

namespace cforge {

// Group cohomology in degrees 1 and 2 over F_p, for a module given by a
// ModuleRep.  Conventions (fixed project-wide):
//   extension law   (v,g)(w,h) = (v*X(h) + w + tau(g,h), gh)
//   cocycle identity  tau(g,h)*X(k) + tau(gh,k) = tau(h,k) + tau(g,hk)
//   coboundary        (d phi)(g,h) = phi(g)*X(h) + phi(h) - phi(gh)
// All cochains are normalized: any value involving the identity is zero.
// Linear systems are restricted to generator pairs/triples, which suffices:
// the degree-1 identity on (g, s) for generators s propagates to all pairs
// by induction on word length, and likewise the degree-2 identity on
// (g, h, s) propagates to all triples.
//
// The solver exploits the same induction.  An identity row along a BFS-tree
// edge (parent(x), s) is triangular: it rewrites the unknown at x in terms
// of strictly shorter arguments.  Eliminating all tree rows first leaves
// only the values on (·, generator) as unknowns — the base block — and the
// remaining generator rows become dense constraints on that block.  This
// sidesteps the fill-in of general sparse elimination entirely; the reported
// column counts still refer to the full normalized cochain space.

struct Cochain1 {
    uint8_t p = 0;
    uint32_t n = 0, dim = 0;
    std::vector<uint8_t> v;  // n * dim, entry (g, k) at g*dim + k; row 0 = 0

    Cochain1() = default;
    Cochain1(uint8_t p_, uint32_t n_, uint32_t dim_)
        : p(p_), n(n_), dim(dim_), v(static_cast<size_t>(n_) * dim_, 0) {}
    uint8_t* at(uint32_t g) { return v.data() + static_cast<size_t>(g) * dim; }
    const uint8_t* at(uint32_t g) const { return v.data() + static_cast<size_t>(g) * dim; }
    friend bool operator==(const Cochain1&, const Cochain1&) = default;
};

struct Cocycle2 {
    uint8_t p = 0;
    uint32_t n = 0, dim = 0;
    std::vector<uint8_t> v;  // n * n * dim, entry (g, h, k); rows/cols 0 = 0

    Cocycle2() = default;
    Cocycle2(uint8_t p_, uint32_t n_, uint32_t dim_)
        : p(p_), n(n_), dim(dim_), v(static_cast<size_t>(n_) * n_ * dim_, 0) {}
    uint8_t* at(uint32_t g, uint32_t h) {
        return v.data() + (static_cast<size_t>(g) * n + h) * dim;
    }
    const uint8_t* at(uint32_t g, uint32_t h) const {
        return v.data() + (static_cast<size_t>(g) * n + h) * dim;
    }
    bool is_zero() const {
        for (uint8_t x : v)
            if (x) return false;
        return true;
    }
    friend bool operator==(const Cocycle2&, const Cocycle2&) = default;
};

namespace detail {

/// w = u * X for a raw row span u.
inline void span_mat(const uint8_t* u, const MatGFp& X, uint8_t* w) {
    for (uint32_t k = 0; k < X.cols; ++k) w[k] = 0;
    for (uint32_t j = 0; j < X.rows; ++j) {
        uint8_t c = u[j];
        if (!c) continue;
        const uint8_t* row = X.row(j);
        for (uint32_t k = 0; k < X.cols; ++k)
            w[k] = static_cast<uint8_t>((w[k] + c * row[k]) % X.p);
    }
}

/// Collapse (column, signed value) terms into a canonical sparse row mod p.
inline SparseRow pack_row(std::vector<std::pair<uint32_t, int32_t>>& acc, uint8_t p) {
    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseRow out;
    for (size_t i = 0; i < acc.size();) {
        uint32_t col = acc[i].first;
        int64_t sum = 0;
        while (i < acc.size() && acc[i].first == col) sum += acc[i++].second;
        uint8_t val = static_cast<uint8_t>(((sum % p) + p) % p);
        if (val) out.emplace_back(col, val);
    }
    return out;
}

/// Per-generator column supports of the action matrix: for generator s and
/// output coordinate k, the list of (j, X(s)[j,k] != 0).
inline std::vector<std::vector<std::vector<std::pair<uint32_t, uint8_t>>>> gen_col_support(
    const ModuleRep& M) {
    uint32_t ng = M.group().num_generators(), dim = M.dim();
    std::vector<std::vector<std::vector<std::pair<uint32_t, uint8_t>>>> sup(
        ng, std::vector<std::vector<std::pair<uint32_t, uint8_t>>>(dim));
    for (uint32_t s = 0; s < ng; ++s) {
        const MatGFp& X = M.generator_action(s);
        for (uint32_t j = 0; j < dim; ++j)
            for (uint32_t k = 0; k < dim; ++k)
                if (X.at(j, k)) sup[s][k].emplace_back(j, X.at(j, k));
    }
    return sup;
}

/// The distinct word-length-one elements, ascending.  Their cochain values
/// are the base unknowns of the tree-propagation solver.
struct GenBasis {
    std::vector<uint32_t> elems;  // ascending element indices
    std::vector<int32_t> slot;    // element index -> position in elems, or -1

    explicit GenBasis(const GroupTable& G) : slot(G.size(), -1) {
        for (uint32_t x = 1; x < G.size(); ++x)
            if (G.word_parent(x).first == 0) {
                slot[x] = static_cast<int32_t>(elems.size());
                elems.push_back(x);
            }
    }
    uint32_t count() const { return static_cast<uint32_t>(elems.size()); }
};

/// Coefficients of every phi(x)_k over the base unknowns phi(s)_j, built by
/// walking the BFS tree with phi(hs) = phi(h) X(s) + phi(s).
struct Degree1Expansion {
    uint32_t d, B;
    std::vector<uint8_t> e;  // n * d rows of length B

    Degree1Expansion(const ModuleRep& M, const GenBasis& gb)
        : d(M.dim()),
          B(gb.count() * M.dim()),
          e(static_cast<size_t>(M.group().size()) * M.dim() * B, 0) {
        const GroupTable& G = M.group();
        uint8_t p = M.p();
        for (uint32_t x = 1; x < G.size(); ++x) {
            if (gb.slot[x] >= 0) {
                uint32_t sl = static_cast<uint32_t>(gb.slot[x]);
                for (uint32_t k = 0; k < d; ++k) row(x, k)[sl * d + k] = 1;
                continue;
            }
            auto [h, si] = G.word_parent(x);
            uint32_t s = G.generator_indices()[si];
            uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
            const MatGFp& X = M.generator_action(si);
            for (uint32_t k = 0; k < d; ++k) {
                uint8_t* out = row(x, k);
                for (uint32_t j = 0; j < d; ++j)
                    if (uint8_t c = X.at(j, k)) axpy_rows(p, out, row(h, j), c, B);
                uint32_t b = sl * d + k;
                out[b] = static_cast<uint8_t>((out[b] + 1) % p);
            }
        }
    }
    uint8_t* row(uint32_t x, uint32_t k) {
        return e.data() + (static_cast<size_t>(x) * d + k) * B;
    }
    const uint8_t* row(uint32_t x, uint32_t k) const {
        return e.data() + (static_cast<size_t>(x) * d + k) * B;
    }
};

/// For a fixed first argument g, coefficients of every tau(g, x)_k over the
/// degree-2 base unknowns tau(y, s)_j, via the tree rows
/// tau(g, hs) = tau(g, h) X(s) + tau(gh, s) - tau(h, s).
struct PairExpansion {
    uint32_t n, d, nb, B;
    std::vector<uint8_t> e;  // n * d rows of length B

    PairExpansion(const ModuleRep& M, const GenBasis& gb)
        : n(M.group().size()),
          d(M.dim()),
          nb(gb.count()),
          B((n - 1) * nb * d),
          e(static_cast<size_t>(n) * d * B, 0) {}

    uint32_t beta(uint32_t y, uint32_t sl, uint32_t k) const {
        return ((y - 1) * nb + sl) * d + k;
    }
    uint8_t* row(uint32_t x, uint32_t k) {
        return e.data() + (static_cast<size_t>(x) * d + k) * B;
    }
    const uint8_t* row(uint32_t x, uint32_t k) const {
        return e.data() + (static_cast<size_t>(x) * d + k) * B;
    }

    void build(const ModuleRep& M, const GenBasis& gb, uint32_t g) {
        std::fill(e.begin(), e.end(), 0);
        const GroupTable& G = M.group();
        uint8_t p = M.p();
        for (uint32_t x = 1; x < n; ++x) {
            if (gb.slot[x] >= 0) {
                uint32_t sl = static_cast<uint32_t>(gb.slot[x]);
                for (uint32_t k = 0; k < d; ++k) row(x, k)[beta(g, sl, k)] = 1;
                continue;
            }
            auto [h, si] = G.word_parent(x);
            uint32_t s = G.generator_indices()[si];
            uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
            uint32_t gh = G.mul(g, h);
            const MatGFp& X = M.generator_action(si);
            for (uint32_t k = 0; k < d; ++k) {
                uint8_t* out = row(x, k);
                for (uint32_t j = 0; j < d; ++j)
                    if (uint8_t c = X.at(j, k)) axpy_rows(p, out, row(h, j), c, B);
                if (gh != 0) {
                    uint32_t b = beta(gh, sl, k);
                    out[b] = static_cast<uint8_t>((out[b] + 1) % p);
                }
                uint32_t b = beta(h, sl, k);
                out[b] = static_cast<uint8_t>((out[b] + p - 1) % p);
            }
        }
    }
};

/// Reduce so each row's trailing nonzero is a 1 at a distinct column, that
/// column vanishing in every other row, rows ordered by ascending trailing
/// column.  Applied to a kernel basis this yields the canonical form that
/// RREF of the original system produces.
inline void reverse_rref_inplace(MatGFp& K) {
    uint32_t r = 0;
    for (int64_t c = static_cast<int64_t>(K.cols) - 1; c >= 0 && r < K.rows; --c) {
        uint32_t cc = static_cast<uint32_t>(c);
        uint32_t sel = r;
        while (sel < K.rows && K.at(sel, cc) == 0) ++sel;
        if (sel == K.rows) continue;
        if (sel != r)
            for (uint32_t j = 0; j < K.cols; ++j) std::swap(K.at(sel, j), K.at(r, j));
        uint8_t piv_inv = inv_mod_p(K.at(r, cc), K.p);
        if (piv_inv != 1)
            for (uint32_t j = 0; j < K.cols; ++j)
                K.at(r, j) = static_cast<uint8_t>(K.at(r, j) * piv_inv % K.p);
        for (uint32_t i = 0; i < K.rows; ++i) {
            if (i == r) continue;
            uint8_t f = K.at(i, cc);
            if (f) axpy_rows(K.p, K.row(i), K.row(r), static_cast<uint8_t>(K.p - f), K.cols);
        }
        ++r;
    }
    for (uint32_t i = 0; 2 * i + 1 < K.rows; ++i)
        for (uint32_t j = 0; j < K.cols; ++j) std::swap(K.at(i, j), K.at(K.rows - 1 - i, j));
}

}  // namespace detail

/// (d phi)(g,h) for a normalized 1-cochain, written into out (dim entries).
inline void coboundary_value(const ModuleRep& M, const Cochain1& phi, uint32_t g, uint32_t h,
                             uint8_t* out) {
    detail::span_mat(phi.at(g), M.action(h), out);
    const uint8_t* ph = phi.at(h);
    const uint8_t* pgh = phi.at(M.group().mul(g, h));
    for (uint32_t k = 0; k < M.dim(); ++k)
        out[k] = static_cast<uint8_t>((out[k] + ph[k] + (M.p() - pgh[k])) % M.p());
}

inline Cocycle2 coboundary_of(const ModuleRep& M, const Cochain1& phi) {
    uint32_t n = M.group().size();
    Cocycle2 tau(M.p(), n, M.dim());
    for (uint32_t g = 0; g < n; ++g)
        for (uint32_t h = 0; h < n; ++h) coboundary_value(M, phi, g, h, tau.at(g, h));
    return tau;
}

/// One instance of the degree-2 identity, checked at (g, h, k).
inline bool cocycle_identity_at(const ModuleRep& M, const Cocycle2& tau, uint32_t g, uint32_t h,
                                uint32_t k) {
    const GroupTable& G = M.group();
    uint32_t dim = M.dim();
    uint8_t lhs[64], rhs[64];
    require(dim <= 64, "cocycle identity: dimension too large for stack buffer");
    detail::span_mat(tau.at(g, h), M.action(k), lhs);
    const uint8_t* t_ghk = tau.at(G.mul(g, h), k);
    const uint8_t* t_hk = tau.at(h, k);
    const uint8_t* t_ghk2 = tau.at(g, G.mul(h, k));
    for (uint32_t i = 0; i < dim; ++i) {
        lhs[i] = static_cast<uint8_t>((lhs[i] + t_ghk[i]) % M.p());
        rhs[i] = static_cast<uint8_t>((t_hk[i] + t_ghk2[i]) % M.p());
        if (lhs[i] != rhs[i]) return false;
    }
    return true;
}

/// Exhaustive check over all |G|^3 triples (parallel-sliced, deterministic).
inline bool cocycle_identity_holds(const ModuleRep& M, const Cocycle2& tau) {
    uint64_t n = M.group().size();
    return all_of_n(n * n * n, [&](uint64_t idx) {
        uint32_t k = static_cast<uint32_t>(idx % n);
        uint32_t h = static_cast<uint32_t>(idx / n % n);
        uint32_t g = static_cast<uint32_t>(idx / (n * n));
        return cocycle_identity_at(M, tau, g, h, k);
    });
}

/// Seeded random sample of the identity (for sizes where exhaustive is slow).
inline bool cocycle_identity_sampled(const ModuleRep& M, const Cocycle2& tau, uint64_t samples,
                                     uint64_t seed) {
    SplitMix64 rng{seed};
    uint64_t n = M.group().size();
    for (uint64_t t = 0; t < samples; ++t) {
        uint32_t g = static_cast<uint32_t>(rng.below(n));
        uint32_t h = static_cast<uint32_t>(rng.below(n));
        uint32_t k = static_cast<uint32_t>(rng.below(n));
        if (!cocycle_identity_at(M, tau, g, h, k)) return false;
    }
    return true;
}

inline bool is_normalized(const Cocycle2& tau) {
    for (uint32_t g = 0; g < tau.n; ++g)
        for (uint32_t k = 0; k < tau.dim; ++k)
            if (tau.at(0, g)[k] || tau.at(g, 0)[k]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Degree 1.

struct H1Report {
    uint32_t z1 = 0, b1 = 0, h1 = 0;
    std::vector<Cochain1> z1_basis;  // canonical kernel basis
    std::vector<bool> in_b1;         // which basis members are coboundaries
};

/// Columns index the unknowns phi(g)_k for g != identity.
inline uint32_t cochain1_columns(uint32_t n, uint32_t dim) { return (n - 1) * dim; }

inline H1Report h1(const ModuleRep& M) {
    const GroupTable& G = M.group();
    uint32_t n = G.size(), dim = M.dim();
    require(static_cast<uint64_t>(n) * dim <= 100000, "degree-1 solve: unknown cap exceeded");
    uint32_t cols = cochain1_columns(n, dim);
    uint8_t p = M.p();
    auto col = [&](uint32_t g, uint32_t k) { return (g - 1) * dim + k; };

    // Z1: phi(g)*X(s) + phi(s) - phi(gs) = 0 on generator pairs, with the
    // tree rows eliminated by propagation; the rest constrain the base block.
    detail::GenBasis gb(G);
    detail::Degree1Expansion ex(M, gb);
    DenseEliminator zel(p, ex.B);
    std::vector<uint8_t> crow(ex.B);
    for (uint32_t g = 1; g < n; ++g)
        for (uint32_t si = 0; si < G.num_generators(); ++si) {
            uint32_t s = G.generator_indices()[si];
            if (s == 0) continue;
            uint32_t gs = G.mul(g, s);
            if (gs != 0 && G.word_parent(gs) == std::pair<uint32_t, uint32_t>{g, si}) continue;
            uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
            const MatGFp& X = M.generator_action(si);
            for (uint32_t k = 0; k < dim; ++k) {
                std::fill(crow.begin(), crow.end(), 0);
                for (uint32_t j = 0; j < dim; ++j)
                    if (uint8_t c = X.at(j, k))
                        detail::axpy_rows(p, crow.data(), ex.row(g, j), c, ex.B);
                uint32_t b = sl * dim + k;
                crow[b] = static_cast<uint8_t>((crow[b] + 1) % p);
                if (gs != 0)
                    detail::axpy_rows(p, crow.data(), ex.row(gs, k),
                                      static_cast<uint8_t>(p - 1), ex.B);
                zel.add_row(crow.data());
            }
        }
    uint32_t z1 = zel.nullity();

    // expand the base kernel to full cochains, then re-canonicalize from the
    // right so the basis matches what RREF of the full system produces
    auto kb = zel.kernel_basis();
    MatGFp K(p, static_cast<uint32_t>(kb.size()), cols);
    for (uint32_t i = 0; i < K.rows; ++i)
        for (uint32_t x = 1; x < n; ++x)
            for (uint32_t k = 0; k < dim; ++k) {
                const uint8_t* er = ex.row(x, k);
                uint64_t acc = 0;
                for (uint32_t b = 0; b < ex.B; ++b) acc += er[b] * kb[i].e[b];
                K.at(i, col(x, k)) = static_cast<uint8_t>(acc % p);
            }
    detail::reverse_rref_inplace(K);

    // B1: spanned by g -> v*X(g) - v over a basis of the module
    SparseEliminator bel(p, cols);
    std::vector<std::pair<uint32_t, int32_t>> acc;
    for (uint32_t i = 0; i < dim; ++i) {
        acc.clear();
        for (uint32_t g = 1; g < n; ++g) {
            const MatGFp& X = M.action(g);
            for (uint32_t k = 0; k < dim; ++k) {
                int32_t val = X.at(i, k) - (k == i ? 1 : 0);
                if (val) acc.emplace_back(col(g, k), val);
            }
        }
        bel.add_row(detail::pack_row(acc, p));
    }
    uint32_t b1 = bel.rank();

    H1Report rep;
    rep.z1 = z1;
    rep.b1 = b1;
    require(z1 >= b1, "degree-1: coboundaries exceed cocycles");
    rep.h1 = z1 - b1;
    for (uint32_t i = 0; i < K.rows; ++i) {
        Cochain1 phi(p, n, dim);
        std::copy(K.row(i), K.row(i) + cols, phi.v.begin() + dim);
        rep.z1_basis.push_back(std::move(phi));
        rep.in_b1.push_back(bel.reduces_to_zero(to_sparse_row(K.row(i), cols)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Degree 2.

struct H2Report {
    uint32_t z2 = 0, b2 = 0, h2 = 0;
    std::optional<Cocycle2> representative;  // one nonzero class when h2 > 0
};

inline uint64_t cocycle2_columns(uint32_t n, uint32_t dim) {
    return static_cast<uint64_t>(n - 1) * (n - 1) * dim;
}

inline H2Report h2(const ModuleRep& M, uint64_t max_columns = 30000) {
    const GroupTable& G = M.group();
    uint32_t n = G.size(), dim = M.dim();
    require(n >= 2, "degree-2 solve: nontrivial group required");
    uint64_t cols = cocycle2_columns(n, dim);
    require(cols <= max_columns, "degree-2 solve: column count exceeds cap");
    uint8_t p = M.p();

    detail::GenBasis gb(G);
    detail::PairExpansion ex(M, gb);
    uint32_t B = ex.B;
    std::vector<uint8_t> crow(B);
    auto bump = [&](uint32_t b, uint8_t v) {
        crow[b] = static_cast<uint8_t>((crow[b] + v) % p);
    };

    // Z2: tau(g,h)*X(s) + tau(gh,s) - tau(h,s) - tau(g,hs) = 0 on generator
    // triples; per first argument the second-argument tree rows are
    // definitions, every other triple constrains the base block.
    DenseEliminator zel(p, B);
    for (uint32_t g = 1; g < n; ++g) {
        ex.build(M, gb, g);
        for (uint32_t h = 1; h < n; ++h)
            for (uint32_t si = 0; si < G.num_generators(); ++si) {
                uint32_t s = G.generator_indices()[si];
                if (s == 0) continue;
                uint32_t hs = G.mul(h, s);
                if (hs != 0 && G.word_parent(hs) == std::pair<uint32_t, uint32_t>{h, si})
                    continue;
                uint32_t gh = G.mul(g, h);
                uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
                const MatGFp& X = M.generator_action(si);
                for (uint32_t k = 0; k < dim; ++k) {
                    std::fill(crow.begin(), crow.end(), 0);
                    for (uint32_t j = 0; j < dim; ++j)
                        if (uint8_t c = X.at(j, k))
                            detail::axpy_rows(p, crow.data(), ex.row(h, j), c, B);
                    if (gh != 0) bump(ex.beta(gh, sl, k), 1);
                    bump(ex.beta(h, sl, k), static_cast<uint8_t>(p - 1));
                    if (hs != 0)
                        detail::axpy_rows(p, crow.data(), ex.row(hs, k),
                                          static_cast<uint8_t>(p - 1), B);
                    zel.add_row(crow.data());
                }
            }
    }
    uint32_t z2 = zel.nullity();

    // B2: coboundaries of the unit 1-cochains, evaluated at the base
    // coordinates only.  A cocycle is determined by its base values, so the
    // restriction is injective on Z2 and the coboundary rank is preserved.
    DenseEliminator bel(p, B);
    for (uint32_t g0 = 1; g0 < n; ++g0)
        for (uint32_t k0 = 0; k0 < dim; ++k0) {
            std::fill(crow.begin(), crow.end(), 0);
            // (d e)(y, s) with e the unit cochain at (g0, k0):
            //   y = g0 contributes X(s) row k0 at (g0, s, *)
            //   s = g0 contributes +1 at (y, g0, k0)
            //   ys = g0 contributes -1 at (g0 s^{-1}, s, k0)
            for (uint32_t sl = 0; sl < gb.count(); ++sl) {
                const MatGFp& X = M.action(gb.elems[sl]);
                for (uint32_t k = 0; k < dim; ++k)
                    if (X.at(k0, k)) bump(ex.beta(g0, sl, k), X.at(k0, k));
            }
            if (gb.slot[g0] >= 0) {
                uint32_t sl = static_cast<uint32_t>(gb.slot[g0]);
                for (uint32_t y = 1; y < n; ++y) bump(ex.beta(y, sl, k0), 1);
            }
            for (uint32_t sl = 0; sl < gb.count(); ++sl) {
                uint32_t y = G.mul(g0, G.inv(gb.elems[sl]));
                if (y != 0) bump(ex.beta(y, sl, k0), static_cast<uint8_t>(p - 1));
            }
            bel.add_row(crow.data());
        }
    uint32_t b2 = bel.rank();

    // the coboundary map on normalized 1-cochains has kernel Z1
    require(b2 == cochain1_columns(n, dim) - h1(M).z1,
            "degree-2: coboundary rank inconsistent with degree-1 kernel");
    require(z2 >= b2, "degree-2: coboundaries exceed cocycles");

    H2Report rep;
    rep.z2 = z2;
    rep.b2 = b2;
    rep.h2 = z2 - b2;
    if (rep.h2 > 0) {
        std::optional<VecGFp> chosen;
        for (const auto& kv : zel.kernel_basis())
            if (!bel.reduces_to_zero(kv.e.data())) {
                chosen = kv;
                break;
            }
        require(chosen.has_value(), "degree-2: no kernel vector escapes the coboundary space");
        Cocycle2 tau(p, n, dim);
        for (uint32_t g = 1; g < n; ++g) {
            ex.build(M, gb, g);
            for (uint32_t x = 1; x < n; ++x)
                for (uint32_t k = 0; k < dim; ++k) {
                    const uint8_t* er = ex.row(x, k);
                    uint64_t acc = 0;
                    for (uint32_t b = 0; b < B; ++b) acc += er[b] * chosen->e[b];
                    tau.at(g, x)[k] = static_cast<uint8_t>(acc % p);
                }
        }
        rep.representative = std::move(tau);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Coboundary testing with witness.

struct CoboundaryReport {
    bool is_coboundary = false;
    std::optional<Cochain1> witness;
};

/// Solve (d phi) = tau on generator pairs, then verify on every pair.
/// For a genuine cocycle the generator-pair solution is automatically a
/// global witness; the full verification guards the convention.
///
/// Solved in affine propagation form: rows are functionals on (phi_base, 1),
/// the tree rows define phi everywhere as an affine function of the base
/// values, and the leftover generator pairs become dense constraints.
inline CoboundaryReport coboundary_witness(const ModuleRep& M, const Cocycle2& tau) {
    const GroupTable& G = M.group();
    uint32_t n = G.size(), dim = M.dim();
    require(tau.n == n && tau.dim == dim && tau.p == M.p(), "coboundary: shape mismatch");
    require(static_cast<uint64_t>(n) * dim <= 100000, "coboundary solve: unknown cap exceeded");
    require(dim <= 64, "coboundary solve: dimension too large for stack buffer");
    uint8_t p = M.p();

    detail::GenBasis gb(G);
    uint32_t B = gb.count() * dim, A = B + 1;  // trailing constant column
    std::vector<uint8_t> e(static_cast<size_t>(n) * dim * A, 0);
    auto row = [&](uint32_t x, uint32_t k) {
        return e.data() + (static_cast<size_t>(x) * dim + k) * A;
    };
    // phi(hs) = phi(h) X(s) + phi(s) - tau(h, s) along the tree
    for (uint32_t x = 1; x < n; ++x) {
        if (gb.slot[x] >= 0) {
            uint32_t sl = static_cast<uint32_t>(gb.slot[x]);
            for (uint32_t k = 0; k < dim; ++k) row(x, k)[sl * dim + k] = 1;
            continue;
        }
        auto [h, si] = G.word_parent(x);
        uint32_t s = G.generator_indices()[si];
        uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
        const MatGFp& X = M.generator_action(si);
        const uint8_t* rhs = tau.at(h, s);
        for (uint32_t k = 0; k < dim; ++k) {
            uint8_t* out = row(x, k);
            for (uint32_t j = 0; j < dim; ++j)
                if (uint8_t c = X.at(j, k)) detail::axpy_rows(p, out, row(h, j), c, A);
            uint32_t b = sl * dim + k;
            out[b] = static_cast<uint8_t>((out[b] + 1) % p);
            out[B] = static_cast<uint8_t>((out[B] + p - rhs[k]) % p);
        }
    }

    // leftover pairs: phi(g) X(s) + phi(s) - phi(gs) - tau(g, s) = 0
    DenseEliminator elim(p, A);
    std::vector<uint8_t> crow(A);
    for (uint32_t g = 1; g < n; ++g)
        for (uint32_t si = 0; si < G.num_generators(); ++si) {
            uint32_t s = G.generator_indices()[si];
            if (s == 0) continue;
            uint32_t gs = G.mul(g, s);
            if (gs != 0 && G.word_parent(gs) == std::pair<uint32_t, uint32_t>{g, si}) continue;
            uint32_t sl = static_cast<uint32_t>(gb.slot[s]);
            const MatGFp& X = M.generator_action(si);
            const uint8_t* rhs = tau.at(g, s);
            for (uint32_t k = 0; k < dim; ++k) {
                std::fill(crow.begin(), crow.end(), 0);
                for (uint32_t j = 0; j < dim; ++j)
                    if (uint8_t c = X.at(j, k))
                        detail::axpy_rows(p, crow.data(), row(g, j), c, A);
                uint32_t b = sl * dim + k;
                crow[b] = static_cast<uint8_t>((crow[b] + 1) % p);
                if (gs != 0)
                    detail::axpy_rows(p, crow.data(), row(gs, k), static_cast<uint8_t>(p - 1),
                                      A);
                crow[B] = static_cast<uint8_t>((crow[B] + p - rhs[k]) % p);
                elim.add_row(crow.data());
            }
        }
    if (elim.is_pivot(B)) return {false, std::nullopt};

    // canonical base solution: free base values zero, constant coordinate 1
    std::vector<uint8_t> base(A, 0);
    base[B] = 1;
    for (uint32_t c = 0; c < B; ++c)
        if (elim.is_pivot(c)) base[c] = static_cast<uint8_t>((p - elim.pivot_row(c)[B]) % p);
    Cochain1 phi(p, n, dim);
    for (uint32_t x = 1; x < n; ++x)
        for (uint32_t k = 0; k < dim; ++k) {
            const uint8_t* er = row(x, k);
            uint64_t acc = 0;
            for (uint32_t b = 0; b < A; ++b) acc += er[b] * base[b];
            phi.at(x)[k] = static_cast<uint8_t>(acc % p);
        }

    bool ok = all_of_n(static_cast<uint64_t>(n) * n, [&](uint64_t idx) {
        uint32_t g = static_cast<uint32_t>(idx / n), h = static_cast<uint32_t>(idx % n);
        uint8_t buf[64];
        coboundary_value(M, phi, g, h, buf);
        const uint8_t* want = tau.at(g, h);
        for (uint32_t k = 0; k < dim; ++k)
            if (buf[k] != want[k]) return false;
        return true;
    });
    require(ok, "coboundary witness failed full verification (input not a cocycle?)");
    return {true, std::move(phi)};
}

// ---------------------------------------------------------------------------
// The carry cocycle on a Borel-type subgroup.

/// Pull the base-n carry cocycle back along H -> H/[H,H] (required cyclic of
/// order n with p | n).  The result is a normalized 2-cocycle over the
/// trivial 1-dimensional module whose class is nonzero; both facts verified.
inline Cocycle2 borel_central_cocycle(const GroupTable& H, uint8_t p) {
    auto dq = derived_quotient(H);
    uint32_t n = dq.size();
    require(n % p == 0, "carry cocycle: p must divide the commutator quotient order");
    require(invariant_factors(H, dq) == std::vector<uint64_t>{n},
            "carry cocycle: commutator quotient is not cyclic");

    uint32_t gen = UINT32_MAX;
    for (uint32_t a = 1; a < n && gen == UINT32_MAX; ++a)
        if (quotient_element_order(H, dq, a) == n) gen = a;
    require(gen != UINT32_MAX, "carry cocycle: no generator found");
    std::vector<uint32_t> dlog(n);
    uint32_t acc = 0;
    for (uint32_t e = 0; e < n; ++e) {
        dlog[acc] = e;
        acc = quotient_mul(H, dq, acc, gen);
    }
    auto residue = [&](uint32_t h) { return dlog[dq.rep_pos[h]]; };

    Cocycle2 sigma(p, H.size(), 1);
    for (uint32_t a = 0; a < H.size(); ++a)
        for (uint32_t b = 0; b < H.size(); ++b)
            sigma.at(a, b)[0] = residue(a) + residue(b) >= n ? 1 : 0;

    ModuleRep triv = trivial_module(H, p);
    require(is_normalized(sigma), "carry cocycle: normalization failed");
    require(cocycle_identity_holds(triv, sigma), "carry cocycle: identity check failed");
    require(!coboundary_witness(triv, sigma).is_coboundary,
            "carry cocycle: inflated class unexpectedly trivial");
    return sigma;
}

// ---------------------------------------------------------------------------
// Explicit induction from a point stabilizer (cochain-level Shapiro map).

/// Coset bookkeeping for H = Stab(base) inside L, with the point-indexed
/// transversal t_i = first element sending base to i (t_base = identity).
/// Right cosets H t_i collect the elements sending base to i, and
///   t_j x = h_j(x) t_{j.x}   with   h_j(x) = t_j x t_{j.x}^{-1} in H,
/// where j.x is the point action; h satisfies h_j(xy) = h_j(x) h_{j.x}(y).
struct CosetSplit {
    const GroupTable* L = nullptr;
    uint32_t base = 0;
    Subgroup H;
    std::vector<uint32_t> transversal;  // point -> L element index
    std::vector<uint32_t> h_index;      // (j * |L| + x) -> H element index

    uint32_t h_of(uint32_t j, uint32_t x) const {
        return h_index[static_cast<size_t>(j) * L->size() + x];
    }
    uint32_t point_after(uint32_t j, uint32_t x) const { return L->perm(x)(j); }
};

inline CosetSplit make_coset_split(const GroupTable& L, uint32_t base = 0) {
    CosetSplit cs;
    cs.L = &L;
    cs.base = base;
    cs.H = point_stabilizer(L, base);
    cs.transversal = point_transversal(L, base);
    require(cs.transversal[base] == 0, "coset split: transversal must start at the identity");

    std::vector<uint32_t> g_to_h(L.size(), UINT32_MAX);
    for (uint32_t i = 0; i < cs.H.group.size(); ++i) g_to_h[cs.H.parent_index[i]] = i;

    uint32_t npts = L.degree();
    cs.h_index.assign(static_cast<size_t>(npts) * L.size(), UINT32_MAX);
    for (uint32_t j = 0; j < npts; ++j)
        for (uint32_t x = 0; x < L.size(); ++x) {
            uint32_t jx = L.perm(x)(j);
            uint32_t h = L.mul(L.mul(cs.transversal[j], x), L.inv(cs.transversal[jx]));
            uint32_t hi = g_to_h[h];
            require(hi != UINT32_MAX, "coset split: decomposition left the stabilizer");
            cs.h_index[static_cast<size_t>(j) * L.size() + x] = hi;
        }
    return cs;
}

/// Induce a 2-cocycle over the trivial F_p module of H up to one over the
/// permutation module of L:  tau(x,y)_i = sigma(h_j(x), h_{j.x}(y)) with
/// j = i . (xy)^{-1} (coordinates indexed by the endpoint).  The output is
/// an exact cocycle; verified exhaustively when |L|^3 is small, sampled
/// otherwise.
inline Cocycle2 shapiro_induce(const CosetSplit& cs, const Cocycle2& sigma,
                               const ModuleRep& perm_module, uint64_t seed = 0x51ed0001) {
    const GroupTable& L = *cs.L;
    require(sigma.n == cs.H.group.size() && sigma.dim == 1,
            "induction: cocycle must live on the stabilizer with scalar values");
    require(perm_module.dim() == L.degree() && perm_module.p() == sigma.p,
            "induction: target must be the permutation module");
    uint32_t n = L.size(), npts = L.degree();

    Cocycle2 tau(sigma.p, n, npts);
    for (uint32_t x = 0; x < n; ++x)
        for (uint32_t y = 0; y < n; ++y) {
            uint32_t xy_inv = L.inv(L.mul(x, y));
            uint8_t* out = tau.at(x, y);
            for (uint32_t i = 0; i < npts; ++i) {
                uint32_t j = L.perm(xy_inv)(i);
                uint32_t a = cs.h_of(j, x);
                uint32_t b = cs.h_of(cs.point_after(j, x), y);
                out[i] = sigma.at(a, b)[0];
            }
        }

    require(is_normalized(tau), "induction: normalization failed");
    bool ok = static_cast<uint64_t>(n) * n * n <= 1000000
                  ? cocycle_identity_holds(perm_module, tau)
                  : cocycle_identity_sampled(perm_module, tau, 100000, seed);
    require(ok, "induction: induced cocycle fails the identity (convention bug)");
    return tau;
}

/// Transport a degree-1 witness the same way: if (d psi) = sigma on H, then
/// phi(x)_i = psi(h_j(x)) with j = i . x^{-1} satisfies (d phi) = tau.
inline Cochain1 shapiro_transport_witness(const CosetSplit& cs, const Cochain1& psi) {
    const GroupTable& L = *cs.L;
    require(psi.n == cs.H.group.size() && psi.dim == 1,
            "induction: witness must live on the stabilizer with scalar values");
    uint32_t n = L.size(), npts = L.degree();
    Cochain1 phi(psi.p, n, npts);
    for (uint32_t x = 0; x < n; ++x) {
        uint32_t x_inv = L.inv(x);
        uint8_t* out = phi.at(x);
        for (uint32_t i = 0; i < npts; ++i) {
            uint32_t j = L.perm(x_inv)(i);
            out[i] = psi.v[cs.h_of(j, x)];
        }
    }
    return phi;
}

/// Apply a module map (post-compose values with the matrix).
inline Cocycle2 project_cocycle(const Cocycle2& tau, const MatGFp& map) {
    require(map.rows == tau.dim && map.p == tau.p, "cocycle projection: shape mismatch");
    Cocycle2 out(tau.p, tau.n, map.cols);
    for (uint32_t g = 0; g < tau.n; ++g)
        for (uint32_t h = 0; h < tau.n; ++h) detail::span_mat(tau.at(g, h), map, out.at(g, h));
    return out;
}

// ---------------------------------------------------------------------------
// Independent small-group oracles.

/// H^2(Z_n, F_p) for the trivial module: fixed points modulo the image of
/// the norm element (the sum of all n group translates, acting as n mod p).
inline uint32_t cyclic_h2_oracle(uint32_t n, uint8_t p) {
    require(n >= 1 && n <= 1000, "cyclic oracle: n out of range");
    uint32_t fixed_dim = 1;  // trivial action fixes everything
    uint8_t norm = 0;
    for (uint32_t i = 0; i < n; ++i) norm = static_cast<uint8_t>((norm + 1) % p);
    uint32_t image_dim = norm == 0 ? 0 : 1;
    return fixed_dim - image_dim;
}

/// Expected dim H^2(G, F_p) for the trivial module from known invariants:
/// Hom(Sch(G), F_p) + Ext(G/[G,G], F_p), one dimension per cyclic factor
/// divisible by p.
inline uint32_t uct_oracle(const std::vector<uint64_t>& schur_factors,
                           const std::vector<uint64_t>& abelian_factors, uint8_t p) {
    uint32_t dim = 0;
    for (uint64_t s : schur_factors)
        if (s % p == 0) ++dim;
    for (uint64_t a : abelian_factors)
        if (a % p == 0) ++dim;
    return dim;
}

/// Known multiplier invariants for the projective groups handled here.
inline std::vector<uint64_t> psl2_schur_factors(uint64_t q) {
    if (q == 9) return {6};
    if (q % 2 == 1) return {2};
    return q == 4 ? std::vector<uint64_t>{2} : std::vector<uint64_t>{};
}

}  // namespace cforge
