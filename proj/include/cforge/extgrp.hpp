#pragma once

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cohom.hpp"
#include "gf.hpp"
#include "modrep.hpp"
#include "pgroup.hpp"

namespace cforge {

// Extensions of a p-group module by its acting group, built directly from a
// 2-cocycle and handled entirely through the multiplication law
//   (v,g)(w,h) = (v*X(h) + w + tau(g,h), gh),
// never as a materialized table.  Automorphisms come in three constructive
// families: shifts by degree-1 cocycles, lifts of compatible pairs (nu, mu)
// acting on the quotient and the module, and scalar maps between a cocycle
// and its multiples.  Every constructed map is verified as a bijective
// homomorphism, exhaustively when the group is small enough.

struct ExtElement {
    std::vector<uint8_t> v;
    uint32_t g = 0;
    friend bool operator==(const ExtElement&, const ExtElement&) = default;
};

inline uint64_t pow_u64(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

class ExtGroup {
  public:
    ExtGroup() = default;
    ExtGroup(const ModuleRep* M, const Cocycle2* tau) : M_(M), tau_(tau) {
        require(M && tau, "extension: module and cocycle required");
        require(tau->n == M->group().size() && tau->dim == M->dim() && tau->p == M->p(),
                "extension: cocycle shape mismatch");
        require(M->dim() <= 64, "extension: module dimension too large for stack buffers");
        vcount_ = pow_u64(M->p(), M->dim());
    }

    const ModuleRep& module() const { return *M_; }
    const GroupTable& base() const { return M_->group(); }
    const Cocycle2& tau() const { return *tau_; }
    uint8_t p() const { return M_->p(); }
    uint32_t dim() const { return M_->dim(); }
    uint64_t vcount() const { return vcount_; }
    uint64_t size() const { return vcount_ * base().size(); }

    // law on raw coordinate spans (dv may not alias av/bv)
    void mul_raw(const uint8_t* av, uint32_t ag, const uint8_t* bv, uint32_t bg, uint8_t* dv,
                 uint32_t& dg) const {
        const MatGFp& X = M_->action(bg);
        const uint8_t* t = tau_->at(ag, bg);
        uint32_t d = dim();
        for (uint32_t k = 0; k < d; ++k) {
            uint32_t acc = bv[k] + t[k];
            for (uint32_t j = 0; j < d; ++j) acc += av[j] * X.at(j, k);
            dv[k] = static_cast<uint8_t>(acc % p());
        }
        dg = base().mul(ag, bg);
    }

    void inv_raw(const uint8_t* av, uint32_t ag, uint8_t* dv, uint32_t& dg) const {
        dg = base().inv(ag);
        const MatGFp& X = M_->action(dg);
        const uint8_t* t = tau_->at(ag, dg);
        uint32_t d = dim();
        for (uint32_t k = 0; k < d; ++k) {
            uint32_t acc = 0;
            for (uint32_t j = 0; j < d; ++j) acc += av[j] * X.at(j, k);
            acc = (acc + t[k]) % p();
            dv[k] = static_cast<uint8_t>((p() - acc) % p());
        }
    }

    ExtElement identity() const { return {std::vector<uint8_t>(dim(), 0), 0}; }
    ExtElement mul(const ExtElement& a, const ExtElement& b) const {
        ExtElement r{std::vector<uint8_t>(dim()), 0};
        mul_raw(a.v.data(), a.g, b.v.data(), b.g, r.v.data(), r.g);
        return r;
    }
    ExtElement inv(const ExtElement& a) const {
        ExtElement r{std::vector<uint8_t>(dim()), 0};
        inv_raw(a.v.data(), a.g, r.v.data(), r.g);
        return r;
    }

    // enumeration: index = g * p^dim + base-p digits of v (little-endian)
    uint64_t index_of(const uint8_t* v, uint32_t g) const {
        uint64_t vi = 0;
        for (uint32_t k = dim(); k-- > 0;) vi = vi * p() + v[k];
        return static_cast<uint64_t>(g) * vcount_ + vi;
    }
    uint64_t index_of(const ExtElement& a) const { return index_of(a.v.data(), a.g); }
    void decode(uint64_t idx, uint8_t* v, uint32_t& g) const {
        g = static_cast<uint32_t>(idx / vcount_);
        uint64_t vi = idx % vcount_;
        for (uint32_t k = 0; k < dim(); ++k) {
            v[k] = static_cast<uint8_t>(vi % p());
            vi /= p();
        }
    }
    ExtElement element_at(uint64_t idx) const {
        ExtElement a{std::vector<uint8_t>(dim()), 0};
        decode(idx, a.v.data(), a.g);
        return a;
    }

    /// Module basis vectors over the identity plus lifts of the base
    /// generators; these generate E.
    std::vector<ExtElement> generating_set() const {
        std::vector<ExtElement> out;
        for (uint32_t k = 0; k < dim(); ++k) {
            ExtElement e = identity();
            e.v[k] = 1;
            out.push_back(std::move(e));
        }
        for (uint32_t s : base().generator_indices()) out.push_back({std::vector<uint8_t>(dim(), 0), s});
        return out;
    }

  private:
    const ModuleRep* M_ = nullptr;
    const Cocycle2* tau_ = nullptr;
    uint64_t vcount_ = 0;
};

struct VerifyPolicy {
    uint64_t seed = 0xC0C1C2C3;
    uint64_t samples = 1000000;               // random probes when not exhaustive
    uint64_t exhaustive_pair_cap = 30000000;  // |E|^2 at or below: sweep all pairs
    uint64_t exhaustive_element_cap = 1000000;
};

/// Assemble and verify the extension: normalization, associativity (the
/// cocycle identity, plus law-level triple probes), inverses, and that
/// conjugation by (0,g) restricted to the kernel copies the module action.
inline ExtGroup build_extension(const ModuleRep& M, const Cocycle2& tau,
                                const VerifyPolicy& pol = {}) {
    ExtGroup E(&M, &tau);
    require(is_normalized(tau), "extension: cocycle must be normalized");
    uint64_t n = M.group().size();
    bool id_ok = n * n * n <= pol.exhaustive_element_cap
                     ? cocycle_identity_holds(M, tau)
                     : cocycle_identity_sampled(M, tau, pol.samples / 10 + 1, pol.seed);
    require(id_ok, "extension: cocycle identity violated");

    SplitMix64 rng{pol.seed ^ 0x5eed};
    uint32_t d = E.dim();
    uint8_t b1[64], b2[64], b3[64], b4[64];
    uint32_t g1, g2, g3, g4;
    for (uint32_t t = 0; t < 10000; ++t) {
        ExtElement x = E.element_at(rng.below(E.size()));
        ExtElement y = E.element_at(rng.below(E.size()));
        ExtElement z = E.element_at(rng.below(E.size()));
        require(E.mul(E.mul(x, y), z) == E.mul(x, E.mul(y, z)),
                "extension: associativity probe failed");
        E.inv_raw(x.v.data(), x.g, b1, g1);
        E.mul_raw(x.v.data(), x.g, b1, g1, b2, g2);
        require(g2 == 0 && std::all_of(b2, b2 + d, [](uint8_t c) { return c == 0; }),
                "extension: inverse probe failed");
    }

    // (w,1)^{(0,g)} = (w*X(g), 1) for every kernel vector and generator
    std::vector<uint8_t> w(d, 0);
    uint64_t wsweep = E.vcount() <= 65536 ? E.vcount() : 0;
    for (uint64_t wi = 0; wi < std::max<uint64_t>(wsweep, d); ++wi) {
        if (wsweep) {
            uint64_t x = wi;
            for (uint32_t k = 0; k < d; ++k) {
                w[k] = static_cast<uint8_t>(x % E.p());
                x /= E.p();
            }
        } else {
            std::fill(w.begin(), w.end(), 0);
            w[wi] = 1;
        }
        for (uint32_t s : M.group().generator_indices()) {
            std::fill(b1, b1 + d, 0);
            E.inv_raw(b1, s, b2, g2);               // (0,s)^{-1}
            E.mul_raw(b2, g2, w.data(), 0, b3, g3);  // * (w,1)
            E.mul_raw(b3, g3, b1, s, b4, g4);        // * (0,s)
            detail::span_mat(w.data(), M.action(s), b1);
            require(g4 == 0 && std::equal(b1, b1 + d, b4),
                    "extension: kernel conjugation does not match the module action");
        }
    }
    return E;
}

// ---------------------------------------------------------------------------
// Automorphism records.

struct AutRecord {
    enum class Kind { shift, pair, scalar, composite };
    Kind kind = Kind::shift;
    Cochain1 delta;                // shift: (v,g) -> (v + delta(g), g)
    std::vector<uint32_t> nu;      // pair: index automorphism of the base
    MatGFp mu;                     // pair: module matrix
    Cochain1 phi;                  // pair: correction term
    uint8_t scalar = 1;            // scalar: (v,g) -> (c v, g), lands in E_{c tau}
    std::vector<AutRecord> parts;  // composite: applied first-to-last
};

inline void apply_aut_raw(const ExtGroup& E, const AutRecord& A, const uint8_t* v, uint32_t g,
                          uint8_t* ov, uint32_t& og) {
    uint32_t d = E.dim();
    switch (A.kind) {
        case AutRecord::Kind::shift: {
            const uint8_t* dl = A.delta.at(g);
            for (uint32_t k = 0; k < d; ++k) ov[k] = static_cast<uint8_t>((v[k] + dl[k]) % E.p());
            og = g;
            return;
        }
        case AutRecord::Kind::pair: {
            og = A.nu[g];
            const uint8_t* ph = A.phi.at(og);
            for (uint32_t k = 0; k < d; ++k) {
                uint32_t acc = ph[k];
                for (uint32_t j = 0; j < d; ++j) acc += v[j] * A.mu.at(j, k);
                ov[k] = static_cast<uint8_t>(acc % E.p());
            }
            return;
        }
        case AutRecord::Kind::scalar: {
            for (uint32_t k = 0; k < d; ++k)
                ov[k] = static_cast<uint8_t>(v[k] * A.scalar % E.p());
            og = g;
            return;
        }
        case AutRecord::Kind::composite: {
            uint8_t buf[64];
            std::copy(v, v + d, buf);
            og = g;
            for (const AutRecord& part : A.parts) {
                uint8_t nxt[64];
                uint32_t ng;
                apply_aut_raw(E, part, buf, og, nxt, ng);
                std::copy(nxt, nxt + d, buf);
                og = ng;
            }
            std::copy(buf, buf + d, ov);
            return;
        }
    }
}

inline ExtElement apply_aut(const ExtGroup& E, const AutRecord& A, const ExtElement& x) {
    ExtElement r{std::vector<uint8_t>(E.dim()), 0};
    apply_aut_raw(E, A, x.v.data(), x.g, r.v.data(), r.g);
    return r;
}

inline AutRecord compose_records(AutRecord first, AutRecord then) {
    AutRecord out;
    out.kind = AutRecord::Kind::composite;
    out.parts.push_back(std::move(first));
    out.parts.push_back(std::move(then));
    return out;
}

/// Explicit inverse of a record (bijectivity certificate).
inline AutRecord inverse_record(const ExtGroup& E, const AutRecord& A) {
    AutRecord inv;
    switch (A.kind) {
        case AutRecord::Kind::shift: {
            inv.kind = AutRecord::Kind::shift;
            inv.delta = A.delta;
            for (auto& c : inv.delta.v) c = static_cast<uint8_t>((E.p() - c) % E.p());
            return inv;
        }
        case AutRecord::Kind::pair: {
            inv.kind = AutRecord::Kind::pair;
            uint32_t n = E.base().size();
            inv.nu.resize(n);
            for (uint32_t g = 0; g < n; ++g) inv.nu[A.nu[g]] = g;
            inv.mu = mat_inverse(A.mu);
            // inverse map: (w,h) -> ((w - phi(h)) mu^{-1}, h nu^{-1})
            inv.phi = Cochain1(E.p(), n, E.dim());
            uint8_t buf[64];
            for (uint32_t h = 0; h < n; ++h) {
                const uint8_t* ph = A.phi.at(h);
                for (uint32_t k = 0; k < E.dim(); ++k)
                    buf[k] = static_cast<uint8_t>((E.p() - ph[k]) % E.p());
                detail::span_mat(buf, inv.mu, inv.phi.at(inv.nu[h]));
            }
            return inv;
        }
        case AutRecord::Kind::scalar: {
            inv.kind = AutRecord::Kind::scalar;
            inv.scalar = inv_mod_p(A.scalar, E.p());
            return inv;
        }
        case AutRecord::Kind::composite: {
            inv.kind = AutRecord::Kind::composite;
            for (auto it = A.parts.rbegin(); it != A.parts.rend(); ++it)
                inv.parts.push_back(inverse_record(E, *it));
            return inv;
        }
    }
    throw error("inverse record: unknown kind");
}

/// Verify that A is a homomorphism src -> dst (same underlying module) and
/// a bijection.  Exhaustive over all pairs when |E|^2 fits the policy cap;
/// otherwise every generating-set pair plus seeded random pairs.
inline void verify_aut_record(const ExtGroup& src, const ExtGroup& dst, const AutRecord& A,
                              const VerifyPolicy& pol, const std::string& what) {
    uint32_t d = src.dim();
    require(dst.dim() == d && dst.p() == src.p() && &dst.base() == &src.base(),
            what + ": domain/codomain mismatch");
    uint8_t xv[64], yv[64], xy[64], ax[64], ay[64], axy[64], prod[64];
    uint32_t xg, yg, xyg, axg, ayg, axyg, prodg;

    auto check_pair = [&](const uint8_t* av, uint32_t ag, const uint8_t* bv, uint32_t bg) {
        src.mul_raw(av, ag, bv, bg, xy, xyg);
        apply_aut_raw(src, A, xy, xyg, axy, axyg);
        apply_aut_raw(src, A, av, ag, ax, axg);
        apply_aut_raw(src, A, bv, bg, ay, ayg);
        dst.mul_raw(ax, axg, ay, ayg, prod, prodg);
        return prodg == axyg && std::equal(prod, prod + d, axy);
    };

    uint64_t N = src.size();
    if (N * N <= pol.exhaustive_pair_cap) {
        bool ok = all_of_n(N * N, [&](uint64_t idx) {
            uint8_t a[64], b[64];
            uint32_t agg, bgg;
            src.decode(idx / N, a, agg);
            src.decode(idx % N, b, bgg);
            uint8_t xy2[64], ax2[64], ay2[64], axy2[64], prod2[64];
            uint32_t xy2g, ax2g, ay2g, axy2g, prod2g;
            src.mul_raw(a, agg, b, bgg, xy2, xy2g);
            apply_aut_raw(src, A, xy2, xy2g, axy2, axy2g);
            apply_aut_raw(src, A, a, agg, ax2, ax2g);
            apply_aut_raw(src, A, b, bgg, ay2, ay2g);
            dst.mul_raw(ax2, ax2g, ay2, ay2g, prod2, prod2g);
            return prod2g == axy2g && std::equal(prod2, prod2 + d, axy2);
        });
        require(ok, what + ": homomorphism check failed (exhaustive)");
    } else {
        auto gens = src.generating_set();
        for (const auto& a : gens)
            for (const auto& b : gens)
                require(check_pair(a.v.data(), a.g, b.v.data(), b.g),
                        what + ": homomorphism check failed (generator pair)");
        SplitMix64 rng{pol.seed};
        for (uint64_t t = 0; t < pol.samples; ++t) {
            src.decode(rng.below(N), xv, xg);
            src.decode(rng.below(N), yv, yg);
            require(check_pair(xv, xg, yv, yg), what + ": homomorphism check failed (sampled)");
        }
    }

    // explicit inverse: A^{-1}(A(x)) = x
    AutRecord Ainv = inverse_record(src, A);
    auto roundtrip = [&](uint64_t idx) {
        uint8_t a[64], im[64], back[64];
        uint32_t agg, img, backg;
        src.decode(idx, a, agg);
        apply_aut_raw(src, A, a, agg, im, img);
        apply_aut_raw(dst, Ainv, im, img, back, backg);
        return backg == agg && std::equal(back, back + d, a);
    };
    if (N <= pol.exhaustive_element_cap) {
        require(all_of_n(N, roundtrip), what + ": inverse round-trip failed (exhaustive)");
    } else {
        SplitMix64 rng{pol.seed ^ 0x1234};
        for (uint64_t t = 0; t < pol.samples / 10 + 1; ++t)
            require(roundtrip(rng.below(N)), what + ": inverse round-trip failed (sampled)");
    }
}

/// delta(gh) = delta(g) X(h) + delta(h) on all pairs when cheap, else on
/// every (g, generator) pair, which propagates to all pairs by word
/// induction.
inline bool degree1_identity_holds(const ModuleRep& M, const Cochain1& delta) {
    const GroupTable& G = M.group();
    uint32_t n = G.size(), d = M.dim();
    uint8_t buf[64];
    auto pair_ok = [&](uint32_t g, uint32_t h) {
        detail::span_mat(delta.at(g), M.action(h), buf);
        const uint8_t* dh = delta.at(h);
        const uint8_t* dgh = delta.at(G.mul(g, h));
        for (uint32_t k = 0; k < d; ++k)
            if (dgh[k] != (buf[k] + dh[k]) % M.p()) return false;
        return true;
    };
    if (static_cast<uint64_t>(n) * n * d <= 100000000) {
        for (uint32_t g = 0; g < n; ++g)
            for (uint32_t h = 0; h < n; ++h)
                if (!pair_ok(g, h)) return false;
    } else {
        for (uint32_t g = 0; g < n; ++g)
            for (uint32_t s : G.generator_indices())
                if (!pair_ok(g, s)) return false;
    }
    return true;
}

/// The automorphism (v,g) -> (v + delta(g), g) for delta in Z^1.
inline AutRecord z1_shift(const ExtGroup& E, const Cochain1& delta,
                          const VerifyPolicy& pol = {}) {
    require(delta.n == E.base().size() && delta.dim == E.dim() && delta.p == E.p(),
            "shift: cochain shape mismatch");
    require(degree1_identity_holds(E.module(), delta), "shift: not a degree-1 cocycle");
    AutRecord A;
    A.kind = AutRecord::Kind::shift;
    A.delta = delta;
    verify_aut_record(E, E, A, pol, "shift");
    return A;
}

// ---------------------------------------------------------------------------
// Compatible pairs.

/// tau'(g,h) = tau(g nu^{-1}, h nu^{-1}) * mu.
inline Cocycle2 pull_cocycle(const Cocycle2& tau, const std::vector<uint32_t>& nu,
                             const MatGFp& mu) {
    std::vector<uint32_t> ninv(nu.size());
    for (uint32_t g = 0; g < nu.size(); ++g) ninv[nu[g]] = g;
    Cocycle2 out(tau.p, tau.n, mu.cols);
    for (uint32_t g = 0; g < tau.n; ++g)
        for (uint32_t h = 0; h < tau.n; ++h)
            detail::span_mat(tau.at(ninv[g], ninv[h]), mu, out.at(g, h));
    return out;
}

inline Cocycle2 cocycle_sub(const Cocycle2& a, const Cocycle2& b) {
    require(a.n == b.n && a.dim == b.dim && a.p == b.p, "cocycle subtraction: shape mismatch");
    Cocycle2 out = a;
    for (size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = static_cast<uint8_t>((a.v[i] + a.p - b.v[i]) % a.p);
    return out;
}

inline Cocycle2 cocycle_scale(const Cocycle2& a, uint8_t c) {
    Cocycle2 out = a;
    for (auto& x : out.v) x = static_cast<uint8_t>(x * c % a.p);
    return out;
}

struct LiftResult {
    bool class_moved = false;
    AutRecord record;      // valid when !class_moved
    Cocycle2 pulled;       // tau' for inspection
    uint8_t mu_scale = 1;  // rescaling applied to mu (scalar_adjusted_lift)
};

/// Lift (nu, mu) to an automorphism of E when the pulled-back cocycle is
/// cohomologous to tau; otherwise report that the pair moves the class.
inline LiftResult compatible_pair_lift(const ExtGroup& E, const std::vector<uint32_t>& nu,
                                       const MatGFp& mu, const VerifyPolicy& pol = {}) {
    const GroupTable& G = E.base();
    const ModuleRep& M = E.module();
    uint32_t n = G.size(), d = E.dim();
    require(nu.size() == n && nu[0] == 0, "pair lift: nu must be an identity-fixing index map");
    {
        std::vector<char> seen(n, 0);
        for (uint32_t i : nu) {
            require(i < n && !seen[i], "pair lift: nu is not a bijection");
            seen[i] = 1;
        }
    }
    // nu respects the table
    if (static_cast<uint64_t>(n) * n <= 20000000) {
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = 0; b < n; ++b)
                require(nu[G.mul(a, b)] == G.mul(nu[a], nu[b]),
                        "pair lift: nu is not an automorphism");
    } else {
        SplitMix64 rng{pol.seed ^ 0xA0A0};
        for (uint64_t t = 0; t < pol.samples; ++t) {
            uint32_t a = static_cast<uint32_t>(rng.below(n));
            uint32_t b = static_cast<uint32_t>(rng.below(n));
            require(nu[G.mul(a, b)] == G.mul(nu[a], nu[b]),
                    "pair lift: nu is not an automorphism");
        }
    }
    // compatibility X(g nu) = mu^{-1} X(g) mu on generators
    require(mu.rows == d && mu.cols == d && mu.p == E.p(), "pair lift: mu shape mismatch");
    MatGFp mu_inv = mat_inverse(mu);
    for (uint32_t s : G.generator_indices())
        require(mat_mul(mat_mul(mu_inv, M.action(s)), mu) == M.action(nu[s]),
                "pair lift: (nu, mu) incompatible with the module action");

    LiftResult out;
    out.pulled = pull_cocycle(E.tau(), nu, mu);
    CoboundaryReport cw = coboundary_witness(M, cocycle_sub(out.pulled, E.tau()));
    if (!cw.is_coboundary) {
        out.class_moved = true;
        return out;
    }
    out.record.kind = AutRecord::Kind::pair;
    out.record.nu = nu;
    out.record.mu = mu;
    out.record.phi = std::move(*cw.witness);
    verify_aut_record(E, E, out.record, pol, "pair lift");
    return out;
}

/// The compatible partners of a fixed nu form one scalar orbit {c mu}, and
/// rescaling mu by c multiplies the pulled-back class by c.  When the class
/// space is one-dimensional exactly one rescaling fixes the class, so every
/// quotient automorphism lifts after the right adjustment.
inline LiftResult scalar_adjusted_lift(const ExtGroup& E, const std::vector<uint32_t>& nu,
                                       const MatGFp& mu, const VerifyPolicy& pol = {}) {
    for (uint8_t c = 1; c < E.p(); ++c) {
        MatGFp scaled = mu;
        for (auto& x : scaled.a) x = static_cast<uint8_t>(x * c % E.p());
        LiftResult lr = compatible_pair_lift(E, nu, scaled, pol);
        if (!lr.class_moved) {
            lr.mu_scale = c;
            return lr;
        }
    }
    throw error("pair lift: no rescaling of mu fixes the class");
}

/// The map (v,g) -> (c v, g), an isomorphism onto the extension by c*tau.
struct ScalarIso {
    AutRecord record;
    Cocycle2 target;  // c * tau
};

inline ScalarIso scalar_isomorphism(const ExtGroup& E, uint8_t c, const VerifyPolicy& pol = {}) {
    require(c >= 1 && c < E.p(), "scalar map: c must be a nonzero residue");
    ScalarIso out;
    out.target = cocycle_scale(E.tau(), c);
    out.record.kind = AutRecord::Kind::scalar;
    out.record.scalar = c;
    ExtGroup dst(&E.module(), &out.target);
    verify_aut_record(E, dst, out.record, pol, "scalar map");
    return out;
}

// ---------------------------------------------------------------------------
// The construction pipeline.

struct PipelineStage {
    std::string label;
    std::string detail;
};

struct PipelineResult {
    uint64_t q = 0;
    uint8_t p = 0;
    uint64_t l = 0;  // q = l^m
    uint32_t m = 0;
    std::unique_ptr<ProjectiveAction> psl;
    std::unique_ptr<CosetSplit> split;
    std::unique_ptr<PermutationSplitting> dec;
    Cocycle2 sigma;   // carry cocycle on the stabilizer
    Cocycle2 tau_p;   // induced cocycle on the permutation module
    std::unique_ptr<Cocycle2> tau_v;  // projected class the extension is built on
    Cochain1 tau_i_witness;           // witness that the complement part is trivial
    ExtGroup E;
    std::vector<PipelineStage> provenance;
};

namespace detail {

inline std::pair<uint64_t, uint32_t> factor_prime_power(uint64_t q) {
    require(q >= 2, "prime power expected");
    uint64_t l = 2;
    while (l * l <= q && q % l != 0) ++l;
    if (l * l > q) l = q;
    uint64_t t = q;
    uint32_t m = 0;
    while (t % l == 0) {
        t /= l;
        ++m;
    }
    require(t == 1, "not a prime power");
    return {l, m};
}

inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace detail

/// Build the extension for (q, p): carry cocycle on the point stabilizer,
/// induce to the permutation module, project to the sum-zero part, verify
/// the class is nonzero, and assemble the group.  Every stage records a
/// provenance line; any failed verification throws.
inline PipelineResult full_pipeline(uint64_t q, uint8_t p, const VerifyPolicy& pol = {}) {
    PipelineResult r;
    r.q = q;
    r.p = p;
    require(q >= 4, "pipeline: q >= 4 required");
    require(p >= 3 && detail::is_prime_u64(p), "pipeline: p must be an odd prime");
    require((q - 1) % p == 0, "pipeline: p must divide q - 1");
    auto [l, m] = detail::factor_prime_power(q);
    r.l = l;
    r.m = m;

    Field f = make_field(l, m);
    r.provenance.push_back({"field", "GF(" + std::to_string(q) + ") = GF(" + std::to_string(l) +
                                         "^" + std::to_string(m) + "), p = " +
                                         std::to_string(p)});

    r.psl = std::make_unique<ProjectiveAction>(psl2(f));
    const GroupTable& L = r.psl->group;
    uint64_t d2 = std::gcd<uint64_t>(2, q - 1);
    require(L.size() == q * (q * q - 1) / d2, "pipeline: unexpected group order");
    r.provenance.push_back({"group", "projective group of order " + std::to_string(L.size()) +
                                         " on " + std::to_string(L.degree()) + " points"});

    r.split = std::make_unique<CosetSplit>(make_coset_split(L, 0));
    const GroupTable& H = r.split->H.group;
    require(H.size() == q * (q - 1) / d2, "pipeline: unexpected stabilizer order");
    r.provenance.push_back(
        {"stabilizer", "point stabilizer of order " + std::to_string(H.size()) +
                           ", commutator quotient of order " +
                           std::to_string(derived_quotient(H).size())});

    r.sigma = borel_central_cocycle(H, p);
    r.provenance.push_back({"carry-cocycle",
                            "nontrivial central class on the stabilizer; identity verified "
                            "exhaustively, nonsplitness certified by an unsolvable witness "
                            "system"});

    r.dec = std::make_unique<PermutationSplitting>(decompose_permutation_module(L, p));
    r.tau_p = shapiro_induce(*r.split, r.sigma, r.dec->P, pol.seed);
    r.provenance.push_back(
        {"induce", "cocycle induced to the permutation module of dimension " +
                       std::to_string(r.dec->P.dim()) + "; identity verified " +
                       (static_cast<uint64_t>(L.size()) * L.size() * L.size() <= 1000000
                            ? "exhaustively"
                            : "on 100000 sampled triples")});

    r.tau_v = std::make_unique<Cocycle2>(project_cocycle(r.tau_p, r.dec->project_V));
    Cocycle2 tau_i = project_cocycle(r.tau_p, r.dec->project_I);
    {
        // the two projections reassemble the induced cocycle exactly
        uint32_t n = L.size(), npts = L.degree();
        uint8_t bv[64], bi[64];
        for (uint32_t g = 0; g < n; ++g)
            for (uint32_t h = 0; h < n; ++h) {
                detail::span_mat(r.tau_v->at(g, h), r.dec->embed_V, bv);
                detail::span_mat(tau_i.at(g, h), r.dec->embed_I, bi);
                const uint8_t* want = r.tau_p.at(g, h);
                for (uint32_t k = 0; k < npts; ++k)
                    require((bv[k] + bi[k]) % p == want[k],
                            "pipeline: projection does not reassemble the induced cocycle");
            }
    }
    CoboundaryReport iw = coboundary_witness(r.dec->I, tau_i);
    require(iw.is_coboundary, "pipeline: complement summand class unexpectedly nonzero");
    r.tau_i_witness = std::move(*iw.witness);
    bool vid = static_cast<uint64_t>(L.size()) * L.size() * L.size() <= 1000000
                   ? cocycle_identity_holds(r.dec->V, *r.tau_v)
                   : cocycle_identity_sampled(r.dec->V, *r.tau_v, 100000, pol.seed ^ 0x7);
    require(vid, "pipeline: projected cocycle fails the identity");
    r.provenance.push_back({"project",
                            "split into sum-zero part (dimension " +
                                std::to_string(r.dec->V.dim()) +
                                ") and invariant line; line summand is a verified coboundary; "
                                "reassembly exact"});

    CoboundaryReport vw = coboundary_witness(r.dec->V, *r.tau_v);
    require(!vw.is_coboundary, "pipeline: class trivial — the projected cocycle splits");
    r.provenance.push_back(
        {"class", "sum-zero class is not a coboundary (witness system over " +
                      std::to_string(cochain1_columns(L.size(), r.dec->V.dim())) +
                      " unknowns is unsolvable)"});

    r.E = build_extension(r.dec->V, *r.tau_v, pol);
    r.provenance.push_back(
        {"extension", "group of order " + std::to_string(r.E.size()) +
                          " assembled from the law; associativity, inverses, and kernel "
                          "conjugation verified"});
    return r;
}

// ---------------------------------------------------------------------------
// Compatible pairs from the projective and field symmetries.

struct CompatiblePair {
    std::string label;
    std::vector<uint32_t> nu;
    MatGFp mu;
};

/// Conjugation by a point permutation as an index map on the group table.
inline std::vector<uint32_t> conjugation_index_map(const GroupTable& G, const Permutation& pi) {
    Permutation pinv = perm_inverse(pi);
    std::vector<uint32_t> nu(G.size());
    for (uint32_t i = 0; i < G.size(); ++i) {
        auto idx = G.try_index(compose(compose(pinv, G.perm(i)), pi));
        require(idx.has_value(), "conjugation leaves the group");
        nu[i] = *idx;
    }
    return nu;
}

inline MatGFp point_perm_matrix(const Permutation& pi, uint8_t p) {
    MatGFp Q(p, pi.degree(), pi.degree());
    for (uint32_t i = 0; i < pi.degree(); ++i) Q.at(i, pi(i)) = 1;
    return Q;
}

/// Restrict a permutation-module map to the sum-zero summand.
inline MatGFp restrict_to_sum_zero(const PermutationSplitting& dec, const MatGFp& Q) {
    return mat_mul(mat_mul(dec.embed_V, Q), dec.project_V);
}

/// Pairs (nu, mu) covering the full symmetry group of the base: inner pairs
/// for each group generator, the diagonal outer symmetry when the field has
/// odd order, and the field automorphism powers.  Each pair is verified
/// compatible with the module action.
inline std::vector<CompatiblePair> pgl_frobenius_pairs(const ProjectiveAction& pa,
                                                       const PermutationSplitting& dec) {
    const GroupTable& L = pa.group;
    const Field& f = pa.field;
    uint8_t p = dec.V.p();
    std::vector<CompatiblePair> out;

    for (uint32_t s = 0; s < L.num_generators(); ++s) {
        uint32_t g0 = L.generator_indices()[s];
        CompatiblePair cp;
        cp.label = "inner generator " + std::to_string(s);
        cp.nu = conjugation_index_map(L, L.perm(g0));
        cp.mu = dec.V.action(g0);
        out.push_back(std::move(cp));
    }
    if (f->order() % 2 == 1) {
        FieldElement g = multiplicative_generator(f);
        Permutation diag = mobius_perm(pa.points, g, f->zero(), f->zero(), f->one());
        CompatiblePair cp;
        cp.label = "diagonal outer";
        cp.nu = conjugation_index_map(L, diag);
        cp.mu = restrict_to_sum_zero(dec, point_perm_matrix(diag, p));
        out.push_back(std::move(cp));
    }
    Permutation frob = frobenius_perm(pa.points);
    Permutation acc = perm_identity(frob.degree());
    for (uint32_t j = 1; j < f->degree(); ++j) {
        acc = compose(acc, frob);
        CompatiblePair cp;
        cp.label = "field automorphism power " + std::to_string(j);
        cp.nu = conjugation_index_map(L, acc);
        cp.mu = restrict_to_sum_zero(dec, point_perm_matrix(acc, p));
        out.push_back(std::move(cp));
    }

    for (const auto& cp : out) {
        MatGFp mu_inv = mat_inverse(cp.mu);
        for (uint32_t s : L.generator_indices())
            require(mat_mul(mat_mul(mu_inv, dec.V.action(s)), cp.mu) == dec.V.action(cp.nu[s]),
                    "symmetry pairs: constructed pair is incompatible");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniqueness of the nonsplit extension.

struct UniquenessReport {
    uint32_t h2_stabilizer = 0;  // dim H^2 of the stabilizer, trivial module
    uint32_t h2_trivial = 0;     // dim H^2 of the base, trivial module
    uint32_t h2_module = 0;      // concluded dim H^2 of the base on the sum-zero module
    bool direct_check = false;   // direct degree-2 solve on the module ran and agreed
    uint32_t nonzero_classes = 0;
    uint32_t scalar_orbits = 0;
    bool nonsplit_unique = false;
    std::vector<std::string> notes;
};

/// dim H^2 = 1 via the stabilizer route (plus a direct solve when feasible),
/// then scalar maps connecting every nonzero class to the pipeline class.
inline UniquenessReport uniqueness_check(const PipelineResult& pr, const VerifyPolicy& pol = {},
                                         uint64_t max_columns = 30000) {
    UniquenessReport rep;
    const GroupTable& L = pr.psl->group;
    const GroupTable& H = pr.split->H.group;

    ModuleRep trivH = trivial_module(H, pr.p);
    rep.h2_stabilizer = h2(trivH, max_columns).h2;
    ModuleRep trivL = trivial_module(L, pr.p);
    rep.h2_trivial = h2(trivL, max_columns).h2;
    require(rep.h2_stabilizer >= rep.h2_trivial,
            "uniqueness: stabilizer cohomology smaller than the trivial summand");
    rep.h2_module = rep.h2_stabilizer - rep.h2_trivial;
    rep.notes.push_back("induced-module dimension " + std::to_string(rep.h2_stabilizer) +
                        " minus invariant-line dimension " + std::to_string(rep.h2_trivial) +
                        " leaves " + std::to_string(rep.h2_module) +
                        " for the sum-zero module");

    uint64_t direct_cols = cocycle2_columns(L.size(), pr.dec->V.dim());
    if (direct_cols <= max_columns) {
        uint32_t direct = h2(pr.dec->V, max_columns).h2;
        require(direct == rep.h2_module, "uniqueness: direct solve disagrees with the route");
        rep.direct_check = true;
        rep.notes.push_back("direct degree-2 solve over " + std::to_string(direct_cols) +
                            " columns agrees");
    }

    if (rep.h2_module == 0) {
        rep.notes.push_back("no nonsplit extension exists");
        return rep;
    }
    require(rep.h2_module == 1, "uniqueness: second cohomology is not one-dimensional");

    rep.nonzero_classes = pr.p - 1;
    for (uint8_t c = 1; c < pr.p; ++c) {
        Cocycle2 scaled = cocycle_scale(*pr.tau_v, c);
        require(!coboundary_witness(pr.dec->V, scaled).is_coboundary,
                "uniqueness: a nonzero multiple of the class is a coboundary");
        if (c > 1) scalar_isomorphism(pr.E, c, pol);
    }
    rep.scalar_orbits = 1;
    rep.nonsplit_unique = true;
    rep.notes.push_back(
        "all " + std::to_string(rep.nonzero_classes) +
        " nonzero classes are scalar multiples of one class and give isomorphic extensions");
    return rep;
}

// ---------------------------------------------------------------------------
// Automorphism structure of the extension.

struct AutStructureReport {
    uint32_t shift_rank = 0;
    uint64_t shift_group_order = 0;
    bool shifts_elementary_abelian = false;
    bool lifts_normalize_shifts = false;
    uint64_t quotient_closure_order = 0;
    uint64_t expected_quotient_order = 0;
    bool kernel_is_shift_group = false;
    uint64_t constructed_lower_bound = 0;
    std::vector<std::string> notes;
    bool pass = false;
};

/// Verify, at the scale of the given extension:
///  (a) the shift maps from the full degree-1 cocycle space form an
///      elementary abelian group (honest map sweeps over all of E),
///  (b) every lifted symmetry pair normalizes the shift group,
///  (c) the index maps of all constructed automorphisms close into a group
///      of the expected symmetry order,
///  (d) constructed automorphisms inducing the identity on the base are
///      exactly the shifts (module centralizer is scalar, nontrivial scalars
///      move the class).
/// The matching upper bound on |Aut| is cited, not computed.
inline AutStructureReport aut_structure_check(const PipelineResult& pr,
                                              const VerifyPolicy& pol = {}) {
    AutStructureReport rep;
    const ExtGroup& E = pr.E;
    const GroupTable& L = pr.psl->group;
    const ModuleRep& V = pr.dec->V;
    uint32_t n = L.size(), d = E.dim();
    uint8_t p = E.p();

    // --- (a) the shift group ---------------------------------------------
    H1Report r1 = h1(V);
    rep.shift_rank = r1.z1;
    rep.shift_group_order = pow_u64(p, r1.z1);
    require(rep.shift_rank == pr.q + 1, "aut structure: unexpected shift rank");

    // verified automorphism for each basis shift
    for (const auto& delta : r1.z1_basis) z1_shift(E, delta, pol);

    // enumerate all shift tables when the count is moderate
    bool table_sweep = rep.shift_group_order <= 100000;
    std::vector<std::vector<uint8_t>> tables;
    if (table_sweep) {
        tables.reserve(rep.shift_group_order);
        std::vector<uint8_t> coef(r1.z1, 0);
        for (uint64_t idx = 0;; ++idx) {
            std::vector<uint8_t> t(static_cast<size_t>(n) * d, 0);
            for (uint32_t b = 0; b < r1.z1; ++b) {
                if (!coef[b]) continue;
                const auto& base = r1.z1_basis[b].v;
                for (size_t i = 0; i < t.size(); ++i)
                    t[i] = static_cast<uint8_t>((t[i] + coef[b] * base[i]) % p);
            }
            tables.push_back(std::move(t));
            uint32_t carry = 0;
            while (carry < r1.z1 && ++coef[carry] == p) coef[carry++] = 0;
            if (carry == r1.z1) break;
        }
        require(tables.size() == rep.shift_group_order, "aut structure: span enumeration");
        std::sort(tables.begin(), tables.end());
        require(std::adjacent_find(tables.begin(), tables.end()) == tables.end(),
                "aut structure: shift maps are not pairwise distinct");
    }

    // group law shift_i then shift_j = shift_{i+j} and its reverse as honest
    // map equality at every element of E, and each map has order dividing p
    bool ea_ok = true;
    if (table_sweep) {
        size_t tlen = static_cast<size_t>(n) * d;
        size_t tcount = tables.size();
        ea_ok = all_of_n(tcount * (tcount + 1) / 2, [&](uint64_t pi) {
            // unrank the unordered pair (i <= j)
            size_t i = 0;
            uint64_t rem = pi;
            while (rem >= tcount - i) rem -= tcount - i, ++i;
            size_t j = i + static_cast<size_t>(rem);
            const uint8_t* ti = tables[i].data();
            const uint8_t* tj = tables[j].data();
            std::vector<uint8_t> sum(tlen);
            for (size_t o = 0; o < tlen; ++o)
                sum[o] = static_cast<uint8_t>((ti[o] + tj[o]) % p);
            uint8_t xv[64], a1[64], a2[64], b1[64], b2[64], want[64];
            uint32_t xg;
            for (uint64_t idx = 0; idx < E.size(); ++idx) {
                E.decode(idx, xv, xg);
                const uint8_t *ri = ti + static_cast<size_t>(xg) * d,
                              *rj = tj + static_cast<size_t>(xg) * d,
                              *rs = sum.data() + static_cast<size_t>(xg) * d;
                for (uint32_t k = 0; k < d; ++k) {
                    a1[k] = static_cast<uint8_t>((xv[k] + ri[k]) % p);
                    a2[k] = static_cast<uint8_t>((a1[k] + rj[k]) % p);
                    b1[k] = static_cast<uint8_t>((xv[k] + rj[k]) % p);
                    b2[k] = static_cast<uint8_t>((b1[k] + ri[k]) % p);
                    want[k] = static_cast<uint8_t>((xv[k] + rs[k]) % p);
                }
                if (!std::equal(want, want + d, a2) || !std::equal(want, want + d, b2))
                    return false;
            }
            return true;
        });
        // order divides p at every element; nonzero tables move some element
        if (ea_ok)
            ea_ok = all_of_n(tcount, [&](uint64_t i) {
                const uint8_t* t = tables[i].data();
                uint8_t xv[64], cur[64];
                uint32_t xg;
                for (uint64_t idx = 0; idx < E.size(); ++idx) {
                    E.decode(idx, xv, xg);
                    const uint8_t* row = t + static_cast<size_t>(xg) * d;
                    std::copy(xv, xv + d, cur);
                    for (uint8_t it = 0; it < p; ++it)
                        for (uint32_t k = 0; k < d; ++k)
                            cur[k] = static_cast<uint8_t>((cur[k] + row[k]) % p);
                    if (!std::equal(cur, cur + d, xv)) return false;
                }
                return true;
            });
    } else {
        // basis-level check: the span is elementary abelian formally, the
        // basis shifts were verified above
        for (const auto& delta : r1.z1_basis)
            if (!degree1_identity_holds(V, delta)) ea_ok = false;
    }
    rep.shifts_elementary_abelian = ea_ok;
    rep.notes.push_back("shift group of order " + std::to_string(rep.shift_group_order) +
                        " (rank " + std::to_string(rep.shift_rank) + "), elementary abelian: " +
                        (ea_ok ? "verified" : "FAILED"));

    // --- (b) lifts normalize the shift group ------------------------------
    auto pairs = pgl_frobenius_pairs(*pr.psl, *pr.dec);
    std::vector<AutRecord> lifts;
    for (const auto& cp : pairs) {
        LiftResult lr = scalar_adjusted_lift(E, cp.nu, cp.mu, pol);
        lifts.push_back(std::move(lr.record));
        if (lr.mu_scale != 1)
            rep.notes.push_back("lift of " + cp.label + " needs the module map rescaled by " +
                                std::to_string(lr.mu_scale));
    }
    rep.notes.push_back("all " + std::to_string(pairs.size()) +
                        " symmetry pairs lift to verified automorphisms");

    bool norm_ok = true;
    {
        uint8_t buf1[64], buf2[64], buf3[64];
        uint32_t g1, g2, g3;
        for (size_t li = 0; li < lifts.size() && norm_ok; ++li) {
            const AutRecord& F = lifts[li];
            AutRecord Finv = inverse_record(E, F);
            std::vector<uint32_t> nuinv(n);
            for (uint32_t g = 0; g < n; ++g) nuinv[F.nu[g]] = g;
            for (const auto& basis : r1.z1_basis) {
                // conjugated shift table: delta'(h) = delta(h nu^{-1}) mu
                Cochain1 dprime(p, n, d);
                for (uint32_t h = 0; h < n; ++h)
                    detail::span_mat(basis.at(nuinv[h]), F.mu, dprime.at(h));
                AutRecord shifted;
                shifted.kind = AutRecord::Kind::shift;
                shifted.delta = dprime;
                // honest map equality F o shift o F^{-1} == shift' on all of E
                AutRecord shift;
                shift.kind = AutRecord::Kind::shift;
                shift.delta = basis;
                for (uint64_t idx = 0; idx < E.size() && norm_ok; ++idx) {
                    uint8_t xv[64];
                    uint32_t xg;
                    E.decode(idx, xv, xg);
                    apply_aut_raw(E, Finv, xv, xg, buf1, g1);
                    apply_aut_raw(E, shift, buf1, g1, buf2, g2);
                    apply_aut_raw(E, F, buf2, g2, buf3, g3);
                    uint8_t want[64];
                    uint32_t wantg;
                    apply_aut_raw(E, shifted, xv, xg, want, wantg);
                    if (g3 != wantg || !std::equal(want, want + d, buf3)) norm_ok = false;
                }
                // the conjugate is again a shift: degree-1 identity for its
                // table (it is an automorphism already, being a composite of
                // verified ones equal to shift' as a map)
                if (norm_ok && !degree1_identity_holds(V, dprime)) norm_ok = false;
            }
        }
    }
    rep.lifts_normalize_shifts = norm_ok;
    rep.notes.push_back(std::string("lifted symmetries normalize the shift group: ") +
                        (norm_ok ? "verified" : "FAILED"));

    // --- (c) closure of the induced index maps ----------------------------
    require(n <= 4080, "aut structure: base degree above the closure cap");
    std::vector<Permutation> quotient_gens;
    for (const auto& cp : pairs) quotient_gens.push_back(Permutation{cp.nu});
    GroupTable closure = GroupTable::closure(std::move(quotient_gens));
    rep.quotient_closure_order = closure.size();
    rep.expected_quotient_order = (pr.q * pr.q * pr.q - pr.q) * pr.m;
    rep.notes.push_back("induced quotient symmetries close into a group of order " +
                        std::to_string(rep.quotient_closure_order) + " (expected " +
                        std::to_string(rep.expected_quotient_order) + ")");

    // --- (d) kernel of the quotient map ------------------------------------
    // module centralizer: mu with mu X(s) = X(s) mu for all generators
    uint32_t d2 = d * d;
    MatGFp sys(p, d2 * L.num_generators(), d2);
    for (uint32_t s = 0; s < L.num_generators(); ++s) {
        const MatGFp& X = V.generator_action(s);
        for (uint32_t a = 0; a < d; ++a)
            for (uint32_t b = 0; b < d; ++b) {
                uint8_t* row = sys.row((s * d2) + a * d + b);
                // (mu X - X mu)[a,b] = sum_j mu[a,j] X[j,b] - X[a,j] mu[j,b]
                for (uint32_t j = 0; j < d; ++j) {
                    row[a * d + j] = static_cast<uint8_t>((row[a * d + j] + X.at(j, b)) % p);
                    row[j * d + b] =
                        static_cast<uint8_t>((row[j * d + b] + p - X.at(a, j)) % p);
                }
            }
    }
    uint32_t centralizer_dim = static_cast<uint32_t>(kernel_basis(sys).size());
    bool kernel_ok = centralizer_dim == 1;
    // nontrivial scalars move the class
    std::vector<uint32_t> id_nu(n);
    for (uint32_t g = 0; g < n; ++g) id_nu[g] = g;
    for (uint8_t c = 2; c < p && kernel_ok; ++c) {
        MatGFp cI = MatGFp::identity(p, d);
        for (auto& x : cI.a) x = static_cast<uint8_t>(x * c % p);
        LiftResult lr = compatible_pair_lift(E, id_nu, cI, pol);
        if (!lr.class_moved) kernel_ok = false;
    }
    // identity pair lifts to a pure shift
    {
        LiftResult lr = compatible_pair_lift(E, id_nu, MatGFp::identity(p, d), pol);
        if (lr.class_moved) kernel_ok = false;
        // with mu = I and nu = id the correction is a degree-1 cocycle
        if (!lr.class_moved) z1_shift(E, lr.record.phi, pol);
    }
    rep.kernel_is_shift_group = kernel_ok;
    rep.notes.push_back(std::string("module centralizer is scalar (dimension ") +
                        std::to_string(centralizer_dim) +
                        "); nontrivial scalars move the class: " +
                        (kernel_ok ? "verified" : "FAILED"));

    rep.constructed_lower_bound = rep.shift_group_order * rep.quotient_closure_order;
    rep.notes.push_back("constructed automorphism group order at least " +
                        std::to_string(rep.constructed_lower_bound) +
                        "; the matching upper bound is cited, not computed");

    rep.pass = rep.shifts_elementary_abelian && rep.lifts_normalize_shifts &&
               rep.quotient_closure_order == rep.expected_quotient_order &&
               rep.kernel_is_shift_group;
    return rep;
}

}  // namespace cforge
