#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "cforge/fplin.hpp"

using namespace cforge;

namespace {

MatGFp random_matrix(uint8_t p, uint32_t rows, uint32_t cols, SplitMix64& rng,
                     uint32_t fill_percent) {
    MatGFp m(p, rows, cols);
    for (uint32_t i = 0; i < rows; ++i)
        for (uint32_t j = 0; j < cols; ++j)
            if (rng.below(100) < fill_percent)
                m.at(i, j) = static_cast<uint8_t>(1 + rng.below(p - 1));
    return m;
}

VecGFp mat_vec_col(const MatGFp& M, const VecGFp& x) {
    // M x for a column vector x (used to verify solutions)
    VecGFp out{M.p, std::vector<uint8_t>(M.rows, 0)};
    for (uint32_t i = 0; i < M.rows; ++i) {
        uint32_t acc = 0;
        for (uint32_t j = 0; j < M.cols; ++j) acc += M.at(i, j) * x.e[j];
        out.e[i] = static_cast<uint8_t>(acc % M.p);
    }
    return out;
}

SparseEliminator eliminate_rows(const MatGFp& M, const std::vector<uint32_t>& order) {
    SparseEliminator elim(M.p, M.cols);
    for (uint32_t r : order) elim.add_row(to_sparse_row(M.row(r), M.cols));
    return elim;
}

}  // namespace

TEST_CASE("dense rref on a hand-checked example") {
    // p = 5:  [1 2 3; 2 4 6] has rank 1, RREF row (1 2 3)
    MatGFp m(5, 2, 3);
    uint8_t vals[2][3] = {{1, 2, 3}, {2, 4, 6 % 5}};
    for (uint32_t i = 0; i < 2; ++i)
        for (uint32_t j = 0; j < 3; ++j) m.at(i, j) = vals[i][j];
    MatGFp r = m;
    auto pivots = rref_inplace(r);
    REQUIRE(pivots == std::vector<uint32_t>{0});
    CHECK(r.at(0, 0) == 1);
    CHECK(r.at(0, 1) == 2);
    CHECK(r.at(0, 2) == 3);

    auto ker = kernel_basis(m);
    REQUIRE(ker.size() == 2);
    // free columns 1 and 2, canonical form: 1 at the free column,
    // p - entry at the pivot column
    CHECK(ker[0].e == std::vector<uint8_t>{3, 1, 0});
    CHECK(ker[1].e == std::vector<uint8_t>{2, 0, 1});
    for (const auto& k : ker) {
        auto img = mat_vec_col(m, k);
        CHECK(std::all_of(img.e.begin(), img.e.end(), [](uint8_t v) { return v == 0; }));
    }
}

TEST_CASE("dense solve finds the canonical particular solution") {
    MatGFp m(7, 2, 3);
    // x0 + x1 = 3, x1 + x2 = 5
    m.at(0, 0) = 1;
    m.at(0, 1) = 1;
    m.at(1, 1) = 1;
    m.at(1, 2) = 1;
    VecGFp b{7, {3, 5}};
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    CHECK(mat_vec_col(m, *x).e == b.e);
    // free variable (column 2) is pinned to zero
    CHECK(x->e[2] == 0);

    // inconsistent: x0 + x1 = 1 and 2 x0 + 2 x1 = 3
    MatGFp bad(7, 2, 2);
    bad.at(0, 0) = 1;
    bad.at(0, 1) = 1;
    bad.at(1, 0) = 2;
    bad.at(1, 1) = 2;
    CHECK_FALSE(solve(bad, VecGFp{7, {1, 3}}).has_value());
}

TEST_CASE("matrix inverse and multiplication round-trip") {
    SplitMix64 rng{0x5eed0001};
    for (uint8_t p : {3, 5, 7, 13}) {
        for (int trial = 0; trial < 20; ++trial) {
            uint32_t n = 1 + static_cast<uint32_t>(rng.below(12));
            MatGFp m = random_matrix(p, n, n, rng, 70);
            if (rank(m) != n) continue;
            MatGFp inv = mat_inverse(m);
            CHECK(mat_mul(m, inv) == MatGFp::identity(p, n));
            CHECK(mat_mul(inv, m) == MatGFp::identity(p, n));
        }
    }
    MatGFp sing(3, 2, 2);
    sing.at(0, 0) = 1;
    sing.at(1, 0) = 2;
    CHECK_THROWS_AS(mat_inverse(sing), error);
}

TEST_CASE("vec_mat and transpose basics") {
    MatGFp m(5, 2, 3);
    m.at(0, 0) = 1;
    m.at(0, 2) = 4;
    m.at(1, 1) = 2;
    VecGFp v{5, {3, 2}};
    auto w = vec_mat(v, m);
    CHECK(w.e == std::vector<uint8_t>{3, 4, 2});
    auto t = transpose(m);
    REQUIRE(t.rows == 3);
    REQUIRE(t.cols == 2);
    CHECK(t.at(0, 0) == 1);
    CHECK(t.at(2, 0) == 4);
    CHECK(t.at(1, 1) == 2);
}

TEST_CASE("sparse eliminator matches dense on random matrices") {
    SplitMix64 rng{0x5eed0002};
    for (uint8_t p : {3, 5, 7}) {
        for (int trial = 0; trial < 34; ++trial) {
            uint32_t rows = 1 + static_cast<uint32_t>(rng.below(200));
            uint32_t cols = 1 + static_cast<uint32_t>(rng.below(300));
            uint32_t fill = 2 + static_cast<uint32_t>(rng.below(60));
            MatGFp m = random_matrix(p, rows, cols, rng, fill);

            std::vector<uint32_t> order(rows);
            std::iota(order.begin(), order.end(), 0);
            auto elim = eliminate_rows(m, order);

            MatGFp mc = m;
            auto dense_pivots = rref_inplace(mc);
            REQUIRE(elim.rank() == dense_pivots.size());
            REQUIRE(elim.pivot_columns() == dense_pivots);
            REQUIRE(elim.rank() + elim.nullity() == cols);

            auto dk = kernel_basis(m);
            auto sk = elim.kernel_basis();
            REQUIRE(dk.size() == sk.size());
            for (size_t i = 0; i < dk.size(); ++i) REQUIRE(dk[i] == sk[i]);

            // the sparse RREF rows are literally the dense RREF rows
            auto rows_out = elim.rref_rows();
            REQUIRE(rows_out.size() == dense_pivots.size());
            for (size_t r = 0; r < rows_out.size(); ++r) {
                VecGFp densified{p, std::vector<uint8_t>(cols, 0)};
                for (auto [c, v] : rows_out[r]) densified.e[c] = v;
                for (uint32_t j = 0; j < cols; ++j) REQUIRE(densified.e[j] == mc.at(r, j));
            }
        }
    }
}

TEST_CASE("sparse eliminator result is independent of row arrival order") {
    SplitMix64 rng{0x5eed0003};
    for (int trial = 0; trial < 12; ++trial) {
        uint8_t p = trial % 2 ? 3 : 7;
        uint32_t rows = 30 + static_cast<uint32_t>(rng.below(60));
        uint32_t cols = 20 + static_cast<uint32_t>(rng.below(80));
        MatGFp m = random_matrix(p, rows, cols, rng, 25);

        std::vector<uint32_t> order(rows);
        std::iota(order.begin(), order.end(), 0);
        auto base = eliminate_rows(m, order);
        auto base_kernel = base.kernel_basis();
        auto base_rref = base.rref_rows();

        for (int shuffle = 0; shuffle < 4; ++shuffle) {
            for (size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.below(i)]);
            auto again = eliminate_rows(m, order);
            REQUIRE(again.rank() == base.rank());
            REQUIRE(again.pivot_columns() == base.pivot_columns());
            REQUIRE(again.kernel_basis() == base_kernel);
            REQUIRE(again.rref_rows() == base_rref);
        }
    }
}

TEST_CASE("sparse membership query tracks the accumulated row space") {
    SplitMix64 rng{0x5eed0004};
    uint8_t p = 5;
    uint32_t cols = 40;
    MatGFp gens = random_matrix(p, 10, cols, rng, 30);
    SparseEliminator elim(p, cols);
    for (uint32_t r = 0; r < gens.rows; ++r) elim.add_row(to_sparse_row(gens.row(r), cols));

    // random combinations of the generators are members
    for (int t = 0; t < 50; ++t) {
        VecGFp combo{p, std::vector<uint8_t>(cols, 0)};
        for (int k = 0; k < 3; ++k) {
            uint32_t g = static_cast<uint32_t>(rng.below(gens.rows));
            uint8_t c = static_cast<uint8_t>(rng.below(p));
            for (uint32_t j = 0; j < cols; ++j)
                combo.e[j] = static_cast<uint8_t>((combo.e[j] + c * gens.at(g, j)) % p);
        }
        CHECK(elim.reduces_to_zero(to_sparse_row(combo.e.data(), cols)));
    }

    // a fresh random row lies outside with overwhelming probability
    // (rank is 10, ambient dimension 40); adding it makes it a member
    uint32_t before = elim.rank();
    MatGFp fresh = random_matrix(p, 1, cols, rng, 60);
    auto frow = to_sparse_row(fresh.row(0), cols);
    REQUIRE_FALSE(elim.reduces_to_zero(frow));
    elim.add_row(frow);
    CHECK(elim.rank() == before + 1);
    CHECK(elim.reduces_to_zero(frow));
}

TEST_CASE("sparse augmented solve agrees with dense solve") {
    SplitMix64 rng{0x5eed0005};
    for (int trial = 0; trial < 30; ++trial) {
        uint8_t p = trial % 2 ? 3 : 7;
        uint32_t rows = 5 + static_cast<uint32_t>(rng.below(40));
        uint32_t cols = 5 + static_cast<uint32_t>(rng.below(40));
        MatGFp m = random_matrix(p, rows, cols, rng, 40);

        // half the trials: b in the column space; half: random b
        VecGFp b{p, std::vector<uint8_t>(rows, 0)};
        if (trial % 2) {
            VecGFp x{p, std::vector<uint8_t>(cols, 0)};
            for (auto& v : x.e) v = static_cast<uint8_t>(rng.below(p));
            b = mat_vec_col(m, x);
        } else {
            for (auto& v : b.e) v = static_cast<uint8_t>(rng.below(p));
        }

        SparseEliminator elim(p, cols + 1);
        for (uint32_t r = 0; r < rows; ++r) {
            SparseRow sr = to_sparse_row(m.row(r), cols);
            if (b.e[r]) sr.emplace_back(cols, b.e[r]);
            elim.add_row(std::move(sr));
        }
        auto dense = solve(m, b);
        REQUIRE(elim.consistent_augmented() == dense.has_value());
        if (dense) {
            auto sx = elim.particular_solution_augmented();
            REQUIRE(sx == *dense);
            CHECK(mat_vec_col(m, sx).e == b.e);
        }
    }
}

TEST_CASE("streaming a large sparse system matches the dense oracle") {
    SplitMix64 rng{0x5eed0006};
    uint8_t p = 3;
    uint32_t cols = 800, ngens = 600, extra = 2400;
    MatGFp gens(p, ngens, cols);
    for (uint32_t i = 0; i < ngens; ++i)
        for (int k = 0; k < 6; ++k)
            gens.at(i, static_cast<uint32_t>(rng.below(cols))) =
                static_cast<uint8_t>(1 + rng.below(p - 1));

    // stream the generators at shuffled positions among many combinations,
    // so the row space is exactly the generator span
    std::vector<VecGFp> stream;
    stream.reserve(ngens + extra);
    for (uint32_t i = 0; i < ngens; ++i)
        stream.push_back(VecGFp{p, {gens.row(i), gens.row(i) + cols}});
    for (uint32_t t = 0; t < extra; ++t) {
        VecGFp combo{p, std::vector<uint8_t>(cols, 0)};
        for (int k = 0; k < 3; ++k) {
            uint32_t g = static_cast<uint32_t>(rng.below(ngens));
            uint8_t c = static_cast<uint8_t>(rng.below(p));
            for (uint32_t j = 0; j < cols; ++j)
                combo.e[j] = static_cast<uint8_t>((combo.e[j] + c * gens.at(g, j)) % p);
        }
        stream.push_back(std::move(combo));
    }
    for (size_t i = stream.size(); i > 1; --i)
        std::swap(stream[i - 1], stream[rng.below(i)]);

    auto result = sparse_rank_kernel(p, cols, [&](auto sink) {
        for (const auto& v : stream) sink(to_sparse_row(v.e.data(), cols));
    });
    auto dense_kernel = kernel_basis(gens);
    REQUIRE(result.rank == rank(gens));
    REQUIRE(result.kernel.size() == dense_kernel.size());
    REQUIRE(result.kernel == dense_kernel);
}

TEST_CASE("zero matrix and edge shapes") {
    MatGFp z(3, 4, 5);
    CHECK(rank(z) == 0);
    auto ker = kernel_basis(z);
    REQUIRE(ker.size() == 5);
    for (uint32_t i = 0; i < 5; ++i) {
        for (uint32_t j = 0; j < 5; ++j) CHECK(ker[i].e[j] == (i == j ? 1 : 0));
    }
    SparseEliminator elim(3, 5);
    elim.add_row({});
    CHECK(elim.rank() == 0);
    CHECK(elim.kernel_basis().size() == 5);
    CHECK(elim.reduces_to_zero({}));
}
