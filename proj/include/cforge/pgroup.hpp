#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"
#include "gf.hpp"

namespace cforge {

// Finite permutation groups as explicit element tables.  Conventions are
// fixed once and used everywhere: permutations act on the right (x^(fg) =
// (x^f)^g), the identity has index 0, and elements are enumerated by
// breadth-first closure over the generator list, so every table is
// reproducible from the generators alone.

struct Permutation {
    std::vector<uint32_t> img;
    uint32_t degree() const { return static_cast<uint32_t>(img.size()); }
    uint32_t operator()(uint32_t x) const { return img[x]; }
    friend bool operator==(const Permutation&, const Permutation&) = default;
};

inline Permutation perm_identity(uint32_t deg) {
    Permutation p{std::vector<uint32_t>(deg)};
    std::iota(p.img.begin(), p.img.end(), 0);
    return p;
}

/// Apply f, then g.
inline Permutation compose(const Permutation& f, const Permutation& g) {
    require(f.degree() == g.degree(), "compose: degree mismatch");
    Permutation h{std::vector<uint32_t>(f.degree())};
    for (uint32_t x = 0; x < f.degree(); ++x) h.img[x] = g.img[f.img[x]];
    return h;
}

inline Permutation perm_inverse(const Permutation& f) {
    Permutation h{std::vector<uint32_t>(f.degree())};
    for (uint32_t x = 0; x < f.degree(); ++x) h.img[f.img[x]] = x;
    return h;
}

inline uint64_t perm_order(const Permutation& f) {
    std::vector<char> seen(f.degree(), 0);
    uint64_t ord = 1;
    for (uint32_t x = 0; x < f.degree(); ++x) {
        if (seen[x]) continue;
        uint64_t len = 0;
        for (uint32_t y = x; !seen[y]; y = f.img[y]) {
            seen[y] = 1;
            ++len;
        }
        ord = std::lcm(ord, len);
    }
    return ord;
}

inline uint64_t perm_hash(const Permutation& f) {
    uint64_t h = 0x9e3779b97f4a7c15ull ^ f.degree();
    for (uint32_t v : f.img) h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

/// A finite permutation group listed exhaustively, indices 0..size-1.
/// Index 0 is the identity; indices follow breadth-first discovery order
/// over the generators (each element is parent * generator).
class GroupTable {
  public:
    static GroupTable closure(std::vector<Permutation> gens) {
        require(!gens.empty(), "group closure: at least one generator required");
        uint32_t deg = gens[0].degree();
        for (const auto& g : gens) require(g.degree() == deg, "group closure: degree mismatch");

        GroupTable t;
        t.gens_ = std::move(gens);
        t.push_element(perm_identity(deg), 0, UINT32_MAX);
        for (uint32_t v = 0; v < t.elems_.size(); ++v)
            for (uint32_t s = 0; s < t.gens_.size(); ++s) {
                Permutation w = compose(t.elems_[v], t.gens_[s]);
                if (!t.try_index(w)) t.push_element(std::move(w), v, s);
            }

        t.gen_index_.reserve(t.gens_.size());
        for (const auto& g : t.gens_) t.gen_index_.push_back(*t.try_index(g));
        t.inv_.resize(t.elems_.size());
        for (uint32_t i = 0; i < t.elems_.size(); ++i)
            t.inv_[i] = *t.try_index(perm_inverse(t.elems_[i]));
        if (t.elems_.size() <= kMulTableCap) {
            uint32_t n = static_cast<uint32_t>(t.elems_.size());
            t.multable_.resize(static_cast<size_t>(n) * n);
            for (uint32_t a = 0; a < n; ++a)
                for (uint32_t b = 0; b < n; ++b)
                    t.multable_[static_cast<size_t>(a) * n + b] =
                        *t.try_index(compose(t.elems_[a], t.elems_[b]));
        }
        return t;
    }

    uint32_t size() const { return static_cast<uint32_t>(elems_.size()); }
    uint32_t degree() const { return elems_[0].degree(); }
    const Permutation& perm(uint32_t i) const { return elems_[i]; }
    uint32_t num_generators() const { return static_cast<uint32_t>(gens_.size()); }
    const Permutation& generator(uint32_t s) const { return gens_[s]; }
    const std::vector<uint32_t>& generator_indices() const { return gen_index_; }

    std::optional<uint32_t> try_index(const Permutation& f) const {
        auto it = index_.find(perm_hash(f));
        if (it == index_.end()) return std::nullopt;
        for (uint32_t i : it->second)
            if (elems_[i] == f) return i;
        return std::nullopt;
    }
    uint32_t index_of(const Permutation& f) const {
        auto i = try_index(f);
        require(i.has_value(), "group table: permutation not in group");
        return *i;
    }

    uint32_t mul(uint32_t a, uint32_t b) const {
        if (!multable_.empty()) return multable_[static_cast<size_t>(a) * size() + b];
        return index_of(compose(elems_[a], elems_[b]));
    }
    uint32_t inv(uint32_t a) const { return inv_[a]; }
    uint64_t element_order(uint32_t a) const { return perm_order(elems_[a]); }

    /// BFS tree: element i (> 0) equals  perm(parent) * generator(gen).
    std::pair<uint32_t, uint32_t> word_parent(uint32_t i) const {
        require(i > 0 && i < size(), "word_parent: bad index");
        return {parent_[i], via_gen_[i]};
    }

  private:
    static constexpr uint32_t kMulTableCap = 1024;

    void push_element(Permutation p, uint32_t parent, uint32_t gen) {
        uint32_t id = static_cast<uint32_t>(elems_.size());
        index_[perm_hash(p)].push_back(id);
        elems_.push_back(std::move(p));
        parent_.push_back(parent);
        via_gen_.push_back(gen);
    }

    std::vector<Permutation> gens_;
    std::vector<uint32_t> gen_index_;
    std::vector<Permutation> elems_;
    std::vector<uint32_t> parent_, via_gen_, inv_;
    std::vector<uint32_t> multable_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> index_;
};

/// First element index of the given order, scanning ascending.
inline std::optional<uint32_t> find_element_of_order(const GroupTable& G, uint64_t ord) {
    for (uint32_t i = 0; i < G.size(); ++i)
        if (G.element_order(i) == ord) return i;
    return std::nullopt;
}

inline GroupTable make_cyclic_group(uint32_t n) {
    require(n >= 1, "cyclic group: n >= 1 required");
    Permutation c{std::vector<uint32_t>(n)};
    for (uint32_t i = 0; i < n; ++i) c.img[i] = (i + 1) % n;
    return GroupTable::closure({c});
}

// ---------------------------------------------------------------------------
// The projective line and the groups acting on it.

struct ProjPoint {
    FieldElement x0, x1;  // normalized: x1 = 1, or x1 = 0 and x0 = 1
    friend bool operator==(const ProjPoint&, const ProjPoint&) = default;
};

/// Points of the projective line: [x : 1] for x in field enumeration order,
/// then [1 : 0] last (index q).
inline std::vector<ProjPoint> projective_line(const Field& f) {
    std::vector<ProjPoint> pts;
    pts.reserve(f->order() + 1);
    for (uint64_t i = 0; i < f->order(); ++i) pts.push_back({f->from_index(i), f->one()});
    pts.push_back({f->one(), f->zero()});
    return pts;
}

inline ProjPoint normalize_point(FieldElement x0, FieldElement x1) {
    const FieldSpec* spec = x0.spec;
    if (!x1.is_zero()) return {mul(x0, inv(x1)), spec->one()};
    require(!x0.is_zero(), "projective point: both coordinates zero");
    return {spec->one(), spec->zero()};
}

inline uint32_t point_index(const std::vector<ProjPoint>& pts, const ProjPoint& p) {
    for (uint32_t i = 0; i < pts.size(); ++i)
        if (pts[i] == p) return i;
    throw error("projective line: point not found");
}

/// Permutation of the point list induced by the fractional-linear map with
/// matrix [[a, b], [c, d]]:  [x0 : x1] -> [a x0 + b x1 : c x0 + d x1].
inline Permutation mobius_perm(const std::vector<ProjPoint>& pts, const FieldElement& a,
                               const FieldElement& b, const FieldElement& c,
                               const FieldElement& d) {
    require(!sub(mul(a, d), mul(b, c)).is_zero(), "fractional-linear map: singular matrix");
    Permutation perm{std::vector<uint32_t>(pts.size())};
    for (uint32_t i = 0; i < pts.size(); ++i) {
        FieldElement y0 = add(mul(a, pts[i].x0), mul(b, pts[i].x1));
        FieldElement y1 = add(mul(c, pts[i].x0), mul(d, pts[i].x1));
        perm.img[i] = point_index(pts, normalize_point(y0, y1));
    }
    return perm;
}

struct ProjectiveAction {
    Field field;
    std::vector<ProjPoint> points;
    GroupTable group;
};

/// PSL2(q) on the projective line, generated by the translation z -> z + 1,
/// the square scaling z -> g^2 z (g the least multiplicative generator) and
/// the inversion z -> -1/z.
inline ProjectiveAction psl2(const Field& f) {
    require(f->order() >= 4, "psl2: field of order >= 4 required");
    auto pts = projective_line(f);
    FieldElement zero = f->zero(), one = f->one();
    FieldElement g = multiplicative_generator(f);
    std::vector<Permutation> gens = {
        mobius_perm(pts, one, one, zero, one),          // z -> z + 1
        mobius_perm(pts, mul(g, g), zero, zero, one),   // z -> g^2 z
        mobius_perm(pts, zero, neg(one), one, zero),    // z -> -1/z
    };
    return {f, pts, GroupTable::closure(std::move(gens))};
}

/// PGL2(q): the PSL2 generators plus the scaling z -> g z.
inline ProjectiveAction pgl2(const Field& f) {
    require(f->order() >= 4, "pgl2: field of order >= 4 required");
    auto pts = projective_line(f);
    FieldElement zero = f->zero(), one = f->one();
    FieldElement g = multiplicative_generator(f);
    std::vector<Permutation> gens = {
        mobius_perm(pts, one, one, zero, one),
        mobius_perm(pts, mul(g, g), zero, zero, one),
        mobius_perm(pts, zero, neg(one), one, zero),
        mobius_perm(pts, g, zero, zero, one),           // z -> g z
    };
    return {f, pts, GroupTable::closure(std::move(gens))};
}

/// Coordinate-wise field automorphism x -> x^l on the point list.
inline Permutation frobenius_perm(const std::vector<ProjPoint>& pts) {
    Permutation perm{std::vector<uint32_t>(pts.size())};
    for (uint32_t i = 0; i < pts.size(); ++i)
        perm.img[i] =
            point_index(pts, normalize_point(frobenius(pts[i].x0), frobenius(pts[i].x1)));
    return perm;
}

// ---------------------------------------------------------------------------
// Subgroups and quotients.

struct Subgroup {
    GroupTable group;                  // re-indexed table of the subgroup
    std::vector<uint32_t> parent_index;  // subgroup index -> parent index
};

namespace detail {

/// Subgroup closure of the given parent-element indices, as a sorted index
/// list (BFS over multiplication inside the parent table).
inline std::vector<uint32_t> closure_indices(const GroupTable& G,
                                             const std::vector<uint32_t>& seed) {
    std::vector<char> in(G.size(), 0);
    std::vector<uint32_t> queue = {0};
    in[0] = 1;
    for (size_t head = 0; head < queue.size(); ++head)
        for (uint32_t s : seed) {
            uint32_t w = G.mul(queue[head], s);
            if (!in[w]) {
                in[w] = 1;
                queue.push_back(w);
            }
        }
    std::sort(queue.begin(), queue.end());
    return queue;
}

inline Subgroup subgroup_from_members(const GroupTable& G,
                                      const std::vector<uint32_t>& members) {
    // greedy deterministic generating set: sweep members ascending, add any
    // element not yet generated
    std::vector<char> covered(G.size(), 0);
    covered[0] = 1;
    uint32_t ncovered = 1;
    std::vector<uint32_t> gens;
    for (uint32_t h : members) {
        if (covered[h]) continue;
        gens.push_back(h);
        auto closed = closure_indices(G, gens);
        std::fill(covered.begin(), covered.end(), 0);
        for (uint32_t x : closed) covered[x] = 1;
        ncovered = static_cast<uint32_t>(closed.size());
        if (ncovered == members.size()) break;
    }
    require(ncovered == members.size(), "subgroup: member set is not closed");

    std::vector<Permutation> gen_perms;
    if (gens.empty()) gen_perms.push_back(perm_identity(G.degree()));
    for (uint32_t h : gens) gen_perms.push_back(G.perm(h));
    Subgroup sub{GroupTable::closure(std::move(gen_perms)), {}};
    sub.parent_index.resize(sub.group.size());
    for (uint32_t i = 0; i < sub.group.size(); ++i)
        sub.parent_index[i] = G.index_of(sub.group.perm(i));
    return sub;
}

}  // namespace detail

/// Stabilizer of a point, re-indexed as its own group table.
inline Subgroup point_stabilizer(const GroupTable& G, uint32_t point) {
    std::vector<uint32_t> members;
    for (uint32_t g = 0; g < G.size(); ++g)
        if (G.perm(g)(point) == point) members.push_back(g);
    return detail::subgroup_from_members(G, members);
}

/// t[i] = first element (in table order) sending base to i.  For a
/// transitive action these are right-coset representatives of the point
/// stabilizer: Stab(base) * t[i] collects exactly the elements sending
/// base to i.  t[base] is the identity.
inline std::vector<uint32_t> point_transversal(const GroupTable& G, uint32_t base) {
    std::vector<uint32_t> t(G.degree(), UINT32_MAX);
    uint32_t found = 0;
    for (uint32_t g = 0; g < G.size() && found < G.degree(); ++g) {
        uint32_t i = G.perm(g)(base);
        if (t[i] == UINT32_MAX) {
            t[i] = g;
            ++found;
        }
    }
    require(found == G.degree(), "transversal: action is not transitive");
    return t;
}

/// The quotient of G by its derived subgroup, kept as explicit coset data.
struct DerivedQuotient {
    std::vector<uint32_t> derived;    // sorted indices of [G, G]
    std::vector<uint32_t> coset_rep;  // per element: least index in its coset
    std::vector<uint32_t> reps;       // sorted unique representatives
    std::vector<uint32_t> rep_pos;    // per element: position of its rep in reps

    uint32_t size() const { return static_cast<uint32_t>(reps.size()); }
};

inline DerivedQuotient derived_quotient(const GroupTable& G) {
    // the set of all commutators generates the derived subgroup
    std::vector<char> is_comm(G.size(), 0);
    for (uint32_t a = 0; a < G.size(); ++a)
        for (uint32_t b = 0; b < G.size(); ++b)
            is_comm[G.mul(G.inv(a), G.mul(G.inv(b), G.mul(a, b)))] = 1;
    std::vector<uint32_t> seed;
    for (uint32_t i = 0; i < G.size(); ++i)
        if (is_comm[i]) seed.push_back(i);

    DerivedQuotient dq;
    dq.derived = detail::closure_indices(G, seed);
    dq.coset_rep.assign(G.size(), UINT32_MAX);
    for (uint32_t g = 0; g < G.size(); ++g) {
        if (dq.coset_rep[g] != UINT32_MAX) continue;
        dq.reps.push_back(g);
        for (uint32_t d : dq.derived) dq.coset_rep[G.mul(g, d)] = g;
    }
    // the derived subgroup is normal, so sweeping ascending makes each rep
    // the least element of its coset and reps come out sorted
    dq.rep_pos.resize(G.size());
    for (uint32_t g = 0; g < G.size(); ++g) {
        auto it = std::lower_bound(dq.reps.begin(), dq.reps.end(), dq.coset_rep[g]);
        dq.rep_pos[g] = static_cast<uint32_t>(it - dq.reps.begin());
    }
    return dq;
}

/// Multiplication on quotient positions.
inline uint32_t quotient_mul(const GroupTable& G, const DerivedQuotient& dq, uint32_t a,
                             uint32_t b) {
    return dq.rep_pos[G.mul(dq.reps[a], dq.reps[b])];
}

inline uint64_t quotient_element_order(const GroupTable& G, const DerivedQuotient& dq,
                                       uint32_t a) {
    uint64_t ord = 1;
    for (uint32_t x = a; x != 0; x = quotient_mul(G, dq, x, a)) ++ord;
    return a == 0 ? 1 : ord;
}

/// Invariant factors of G / [G, G] as an ascending divisibility chain
/// (empty for a perfect group).  Recovered from element-order counts in
/// each primary component.
inline std::vector<uint64_t> invariant_factors(const GroupTable& G, const DerivedQuotient& dq) {
    uint64_t n = dq.size();
    if (n == 1) return {};
    // prime factorization of the quotient order
    std::vector<std::pair<uint64_t, uint32_t>> primes;
    {
        uint64_t m = n;
        for (uint64_t r = 2; r * r <= m; ++r)
            if (m % r == 0) {
                uint32_t e = 0;
                while (m % r == 0) {
                    m /= r;
                    ++e;
                }
                primes.emplace_back(r, e);
            }
        if (m > 1) primes.emplace_back(m, 1);
    }

    // per prime r: partition (l_1 >= l_2 >= ...) of the r-primary component,
    // via N_k = #{x : x^(r^k) = 1} and #{i : l_i >= k} = log_r N_k - log_r N_{k-1}
    std::vector<std::vector<uint64_t>> primary;  // prime-power parts, descending
    for (auto [r, e] : primes) {
        std::vector<uint32_t> m_k(e + 1, 0);  // m_k = log_r N_k
        for (uint32_t k = 1; k <= e; ++k) {
            uint64_t rk = 1;
            for (uint32_t t = 0; t < k; ++t) rk *= r;
            uint64_t count = 0;
            for (uint32_t x = 0; x < n; ++x) {
                // x^(r^k) via repeated multiplication
                uint32_t acc = 0;
                for (uint64_t t = 0; t < rk; ++t) acc = quotient_mul(G, dq, acc, x);
                if (acc == 0) ++count;
            }
            uint32_t lg = 0;
            uint64_t c = count;
            while (c > 1) {
                require(c % r == 0, "invariant factors: inconsistent order counts");
                c /= r;
                ++lg;
            }
            m_k[k] = lg;
        }
        std::vector<uint64_t> parts;
        // part i has size l_i = #{k >= 1 : (m_k - m_{k-1}) >= i}
        uint32_t nparts = m_k[1];
        for (uint32_t i = 1; i <= nparts; ++i) {
            uint64_t l = 0;
            for (uint32_t k = 1; k <= e; ++k)
                if (m_k[k] - m_k[k - 1] >= i) ++l;
            uint64_t val = 1;
            for (uint64_t t = 0; t < l; ++t) val *= r;
            parts.push_back(val);
        }
        primary.push_back(std::move(parts));  // already descending
    }

    size_t width = 0;
    for (const auto& parts : primary) width = std::max(width, parts.size());
    std::vector<uint64_t> factors(width, 1);
    for (const auto& parts : primary)
        for (size_t i = 0; i < parts.size(); ++i) factors[i] *= parts[i];
    std::reverse(factors.begin(), factors.end());  // ascending divisibility
    return factors;
}

inline std::vector<uint64_t> abelianization(const GroupTable& G) {
    auto dq = derived_quotient(G);
    return invariant_factors(G, dq);
}

}  // namespace cforge
