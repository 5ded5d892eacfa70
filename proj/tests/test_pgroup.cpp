#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "cforge/pgroup.hpp"

using namespace cforge;

namespace {

Permutation cycle3(uint32_t deg, uint32_t a, uint32_t b, uint32_t c) {
    Permutation p = perm_identity(deg);
    p.img[a] = b;
    p.img[b] = c;
    p.img[c] = a;
    return p;
}

std::vector<uint64_t> order_multiset(const GroupTable& G) {
    std::vector<uint64_t> orders;
    orders.reserve(G.size());
    for (uint32_t i = 0; i < G.size(); ++i) orders.push_back(G.element_order(i));
    std::sort(orders.begin(), orders.end());
    return orders;
}

uint64_t psl2_order(uint64_t q) { return q * (q * q - 1) / std::gcd<uint64_t>(2, q - 1); }

GroupTable psl2_of(uint32_t l, uint32_t m) { return psl2(make_field(l, m)).group; }

}  // namespace

TEST_CASE("projective linear group orders match the closed formula") {
    CHECK(psl2_of(2, 2).size() == psl2_order(4));
    CHECK(psl2_of(5, 1).size() == psl2_order(5));
    CHECK(psl2_of(7, 1).size() == psl2_order(7));
    CHECK(psl2_of(2, 3).size() == psl2_order(8));
    CHECK(psl2_of(3, 2).size() == psl2_order(9));
    CHECK(pgl2(make_field(2, 2)).group.size() == 4 * 15);     // = PSL2(4), q even
    CHECK(pgl2(make_field(5, 1)).group.size() == 5 * 24);
    CHECK(pgl2(make_field(7, 1)).group.size() == 7 * 48);
}

TEST_CASE("group table structure: identity, inverses, words, multiplication") {
    for (auto [l, m] : {std::pair{2u, 2u}, {5u, 1u}, {7u, 1u}}) {
        auto pa = psl2(make_field(l, m));
        const auto& G = pa.group;
        REQUIRE(G.perm(0) == perm_identity(G.degree()));
        for (uint32_t a = 0; a < G.size(); ++a) {
            REQUIRE(G.mul(a, G.inv(a)) == 0);
            REQUIRE(G.mul(G.inv(a), a) == 0);
            REQUIRE(G.mul(a, 0) == a);
            REQUIRE(G.mul(0, a) == a);
        }
        // breadth-first word structure: element = parent * generator
        for (uint32_t i = 1; i < G.size(); ++i) {
            auto [par, s] = G.word_parent(i);
            REQUIRE(par < i);
            REQUIRE(G.perm(i) == compose(G.perm(par), G.generator(s)));
        }
        // table multiplication equals permutation composition
        for (uint32_t a = 0; a < G.size(); a += 7)
            for (uint32_t b = 0; b < G.size(); b += 5)
                REQUIRE(G.mul(a, b) == G.index_of(compose(G.perm(a), G.perm(b))));
    }
}

TEST_CASE("multiplication fallback beyond the dense-table cap") {
    auto G = psl2_of(13, 1);  // 1092 elements, above the cached-table cap
    REQUIRE(G.size() == psl2_order(13));
    SplitMix64 rng{0x5eed0101};
    for (int t = 0; t < 300; ++t) {
        uint32_t a = static_cast<uint32_t>(rng.below(G.size()));
        uint32_t b = static_cast<uint32_t>(rng.below(G.size()));
        uint32_t c = static_cast<uint32_t>(rng.below(G.size()));
        CHECK(G.mul(a, G.inv(a)) == 0);
        CHECK(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
        CHECK(G.mul(a, b) == G.index_of(compose(G.perm(a), G.perm(b))));
    }
}

TEST_CASE("element order statistics match isomorphic alternating groups") {
    // PSL2(4) and PSL2(5) are both isomorphic to Alt(5); PSL2(9) to Alt(6).
    auto a5 = GroupTable::closure({cycle3(5, 0, 1, 2), cycle3(5, 2, 3, 4)});
    REQUIRE(a5.size() == 60);
    CHECK(order_multiset(psl2_of(2, 2)) == order_multiset(a5));
    CHECK(order_multiset(psl2_of(5, 1)) == order_multiset(a5));

    auto a6 = GroupTable::closure(
        {cycle3(6, 0, 1, 2), cycle3(6, 1, 2, 3), cycle3(6, 2, 3, 4), cycle3(6, 3, 4, 5)});
    REQUIRE(a6.size() == 360);
    CHECK(order_multiset(psl2_of(3, 2)) == order_multiset(a6));

    // PSL2(8): element orders are exactly {1, 2, 3, 7, 9}
    auto G8 = psl2_of(2, 3);
    std::set<uint64_t> distinct;
    for (uint32_t i = 0; i < G8.size(); ++i) distinct.insert(G8.element_order(i));
    CHECK(distinct == std::set<uint64_t>{1, 2, 3, 7, 9});
}

TEST_CASE("action on the projective line is sharply 3-transitive for PGL") {
    for (auto [l, m] : {std::pair{2u, 2u}, {5u, 1u}, {7u, 1u}, {3u, 2u}}) {
        auto pa = psl2(make_field(l, m));
        const auto& G = pa.group;
        uint32_t npts = G.degree();
        // 2-transitive: the orbit of the ordered pair (0, 1) is all pairs
        std::set<std::pair<uint32_t, uint32_t>> orbit;
        for (uint32_t g = 0; g < G.size(); ++g)
            orbit.emplace(G.perm(g)(0), G.perm(g)(1));
        CHECK(orbit.size() == static_cast<size_t>(npts) * (npts - 1));
    }
}

TEST_CASE("point normalization covers the projective line exactly") {
    auto f = make_field(2, 2);
    auto pts = projective_line(f);
    REQUIRE(pts.size() == 5);
    REQUIRE(pts[4] == (ProjPoint{f->one(), f->zero()}));  // infinity last
    std::set<uint32_t> seen;
    for (uint64_t i0 = 0; i0 < 4; ++i0)
        for (uint64_t i1 = 0; i1 < 4; ++i1) {
            if (i0 == 0 && i1 == 0) {
                CHECK_THROWS_AS(normalize_point(f->zero(), f->zero()), error);
                continue;
            }
            seen.insert(point_index(pts, normalize_point(f->from_index(i0), f->from_index(i1))));
        }
    CHECK(seen.size() == 5);
    auto one = f->one();
    CHECK_THROWS_AS(mobius_perm(pts, one, one, one, one), error);  // singular
}

TEST_CASE("upper-triangular maps fix infinity; stabilizer has the right size") {
    struct Case {
        uint32_t l, m;
        uint32_t stab_order;
        std::vector<uint64_t> stab_ab;
    };
    for (auto [l, m, so, ab] : {Case{2, 2, 12, {3}}, Case{7, 1, 21, {3}}, Case{2, 4, 240, {15}}}) {
        auto pa = psl2(make_field(l, m));
        const auto& G = pa.group;
        uint32_t inf = G.degree() - 1;
        CHECK(G.generator(0)(inf) == inf);  // z -> z + 1
        CHECK(G.generator(1)(inf) == inf);  // z -> g^2 z
        CHECK(G.generator(1)(0) == 0);

        auto H = point_stabilizer(G, inf);
        REQUIRE(H.group.size() == so);
        CHECK(static_cast<uint64_t>(H.group.size()) * G.degree() == G.size());  // orbit-stabilizer
        CHECK(abelianization(H.group) == ab);

        // parent map is faithful and hits every fixer
        uint32_t fixers = 0;
        for (uint32_t g = 0; g < G.size(); ++g)
            if (G.perm(g)(inf) == inf) ++fixers;
        REQUIRE(fixers == H.group.size());
        for (uint32_t i = 0; i < H.group.size(); ++i) {
            REQUIRE(G.perm(H.parent_index[i]) == H.group.perm(i));
            REQUIRE(H.group.perm(i)(inf) == inf);
        }
        for (uint32_t i = 0; i < H.group.size(); i += 3)
            for (uint32_t j = 0; j < H.group.size(); j += 5)
                REQUIRE(H.parent_index[H.group.mul(i, j)] ==
                        G.mul(H.parent_index[i], H.parent_index[j]));
    }
}

TEST_CASE("point transversal represents the stabilizer cosets") {
    for (auto [l, m] : {std::pair{2u, 2u}, {5u, 1u}}) {
        auto pa = psl2(make_field(l, m));
        const auto& G = pa.group;
        uint32_t base = G.degree() - 1;
        auto t = point_transversal(G, base);
        REQUIRE(t.size() == G.degree());
        CHECK(t[base] == 0);
        for (uint32_t i = 0; i < t.size(); ++i) CHECK(G.perm(t[i])(base) == i);
        // g and t[g(base)] lie in the same right coset of the stabilizer
        for (uint32_t g = 0; g < G.size(); ++g) {
            uint32_t j = G.perm(g)(base);
            uint32_t h = G.mul(g, G.inv(t[j]));
            CHECK(G.perm(h)(base) == base);
        }
    }
    // non-transitive action: a single transposition on three points
    Permutation swap01 = perm_identity(3);
    std::swap(swap01.img[0], swap01.img[1]);
    auto T = GroupTable::closure({swap01});
    CHECK_THROWS_AS(point_transversal(T, 0), error);
}

TEST_CASE("field automorphism normalizes the projective group") {
    struct Case {
        uint32_t l, m;
        uint64_t frob_order;
        uint32_t fixed_points;
    };
    for (auto [l, m, fo, fp] : {Case{2, 2, 2, 3}, Case{2, 3, 3, 3}, Case{3, 2, 2, 4}}) {
        auto pa = psl2(make_field(l, m));
        auto phi = frobenius_perm(pa.points);
        CHECK(perm_order(phi) == fo);
        uint32_t fixed = 0;
        for (uint32_t i = 0; i < phi.degree(); ++i)
            if (phi(i) == i) ++fixed;
        CHECK(fixed == fp);  // subfield points plus infinity
        auto phi_inv = perm_inverse(phi);
        for (uint32_t s = 0; s < pa.group.num_generators(); ++s) {
            auto conj = compose(phi_inv, compose(pa.group.generator(s), phi));
            CHECK(pa.group.try_index(conj).has_value());
        }
    }
}

TEST_CASE("abelianization identifies standard quotients") {
    CHECK(abelianization(make_cyclic_group(1)).empty());
    for (uint32_t n = 2; n <= 12; ++n)
        CHECK(abelianization(make_cyclic_group(n)) == std::vector<uint64_t>{n});

    // simple groups are perfect
    CHECK(abelianization(psl2_of(2, 2)).empty());
    CHECK(abelianization(psl2_of(7, 1)).empty());

    // Klein four group: double transpositions inside Sym(4)
    Permutation k1 = perm_identity(4), k2 = perm_identity(4);
    std::swap(k1.img[0], k1.img[1]);
    std::swap(k1.img[2], k1.img[3]);
    std::swap(k2.img[0], k2.img[2]);
    std::swap(k2.img[1], k2.img[3]);
    auto klein = GroupTable::closure({k1, k2});
    REQUIRE(klein.size() == 4);
    CHECK(abelianization(klein) == std::vector<uint64_t>{2, 2});

    // Sym(3) abelianizes to Z/2
    Permutation s1 = perm_identity(3);
    std::swap(s1.img[0], s1.img[1]);
    auto sym3 = GroupTable::closure({s1, cycle3(3, 0, 1, 2)});
    REQUIRE(sym3.size() == 6);
    CHECK(abelianization(sym3) == std::vector<uint64_t>{2});

    // Z/6 x Z/2 built from disjoint cycles: chain 2 | 6
    Permutation c6 = perm_identity(8), c2 = perm_identity(8);
    for (uint32_t i = 0; i < 6; ++i) c6.img[i] = (i + 1) % 6;
    std::swap(c2.img[6], c2.img[7]);
    auto z6z2 = GroupTable::closure({c6, c2});
    REQUIRE(z6z2.size() == 12);
    CHECK(abelianization(z6z2) == std::vector<uint64_t>{2, 6});
}

TEST_CASE("derived quotient exposes usable coset structure") {
    auto pa = psl2(make_field(2, 4));
    auto H = point_stabilizer(pa.group, pa.group.degree() - 1);
    auto dq = derived_quotient(H.group);
    REQUIRE(dq.size() == 15);
    REQUIRE(dq.derived.size() == 16);
    // representatives are minimal and quotient multiplication is a group law
    for (uint32_t g = 0; g < H.group.size(); ++g) {
        CHECK(dq.coset_rep[g] <= g);
        CHECK(dq.coset_rep[dq.coset_rep[g]] == dq.coset_rep[g]);
    }
    for (uint32_t a = 0; a < dq.size(); ++a) {
        CHECK(quotient_mul(H.group, dq, a, 0) == a);
        CHECK(quotient_mul(H.group, dq, 0, a) == a);
    }
    // the quotient is cyclic of order 15: some element attains the order
    bool found = false;
    for (uint32_t a = 0; a < dq.size(); ++a)
        if (quotient_element_order(H.group, dq, a) == 15) found = true;
    CHECK(found);
    CHECK(invariant_factors(H.group, dq) == std::vector<uint64_t>{15});
}

TEST_CASE("cyclic group construction is canonical") {
    auto c = make_cyclic_group(6);
    REQUIRE(c.size() == 6);
    CHECK(c.element_order(1) == 6);  // first discovered element is the generator
    for (uint32_t i = 0; i < 6; ++i) CHECK(c.mul(1, i) == (i + 1) % 6);
    CHECK_THROWS_AS(make_cyclic_group(0), error);
}
