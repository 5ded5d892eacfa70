#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"

namespace cforge {

// Linear algebra over F_p for small odd p (byte-wide values).  Independent
// elimination paths: a dense textbook RREF, a streaming dense eliminator,
// and a streaming sparse eliminator.  All produce the same canonical
// reduced form, so kernels and solutions agree bit for bit.

struct VecGFp {
    uint8_t p = 0;
    std::vector<uint8_t> e;
    friend bool operator==(const VecGFp&, const VecGFp&) = default;
};

struct MatGFp {
    uint8_t p = 0;
    uint32_t rows = 0, cols = 0;
    std::vector<uint8_t> a;  // dense row-major

    MatGFp() = default;
    MatGFp(uint8_t p_, uint32_t r, uint32_t c)
        : p(p_), rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
    uint8_t& at(uint32_t r, uint32_t c) { return a[static_cast<size_t>(r) * cols + c]; }
    uint8_t at(uint32_t r, uint32_t c) const { return a[static_cast<size_t>(r) * cols + c]; }
    const uint8_t* row(uint32_t r) const { return a.data() + static_cast<size_t>(r) * cols; }
    uint8_t* row(uint32_t r) { return a.data() + static_cast<size_t>(r) * cols; }

    static MatGFp identity(uint8_t p, uint32_t n) {
        MatGFp m(p, n, n);
        for (uint32_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    friend bool operator==(const MatGFp&, const MatGFp&) = default;
};

inline uint8_t inv_mod_p(uint8_t a, uint8_t p) {
    for (uint8_t x = 1; x < p; ++x)
        if (a * x % p == 1) return x;
    throw error("fplin: not invertible mod p");
}

inline MatGFp mat_mul(const MatGFp& A, const MatGFp& B) {
    require(A.p == B.p && A.cols == B.rows, "mat_mul: shape or modulus mismatch");
    MatGFp C(A.p, A.rows, B.cols);
    for (uint32_t i = 0; i < A.rows; ++i)
        for (uint32_t k = 0; k < A.cols; ++k) {
            uint8_t v = A.at(i, k);
            if (!v) continue;
            const uint8_t* brow = B.row(k);
            uint8_t* crow = C.row(i);
            for (uint32_t j = 0; j < B.cols; ++j)
                crow[j] = static_cast<uint8_t>((crow[j] + v * brow[j]) % A.p);
        }
    return C;
}

/// v * M for a row vector v.
inline VecGFp vec_mat(const VecGFp& v, const MatGFp& M) {
    require(v.p == M.p && v.e.size() == M.rows, "vec_mat: shape or modulus mismatch");
    VecGFp out{v.p, std::vector<uint8_t>(M.cols, 0)};
    for (uint32_t i = 0; i < M.rows; ++i) {
        uint8_t c = v.e[i];
        if (!c) continue;
        const uint8_t* r = M.row(i);
        for (uint32_t j = 0; j < M.cols; ++j)
            out.e[j] = static_cast<uint8_t>((out.e[j] + c * r[j]) % M.p);
    }
    return out;
}

inline MatGFp transpose(const MatGFp& M) {
    MatGFp T(M.p, M.cols, M.rows);
    for (uint32_t i = 0; i < M.rows; ++i)
        for (uint32_t j = 0; j < M.cols; ++j) T.at(j, i) = M.at(i, j);
    return T;
}

/// In-place reduction to the canonical reduced row echelon form.
/// Returns the pivot columns in ascending order.
inline std::vector<uint32_t> rref_inplace(MatGFp& M) {
    std::vector<uint32_t> pivots;
    uint32_t r = 0;
    for (uint32_t c = 0; c < M.cols && r < M.rows; ++c) {
        uint32_t sel = r;
        while (sel < M.rows && M.at(sel, c) == 0) ++sel;
        if (sel == M.rows) continue;
        if (sel != r)
            for (uint32_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(r, j));
        uint8_t piv_inv = inv_mod_p(M.at(r, c), M.p);
        if (piv_inv != 1)
            for (uint32_t j = c; j < M.cols; ++j)
                M.at(r, j) = static_cast<uint8_t>(M.at(r, j) * piv_inv % M.p);
        for (uint32_t i = 0; i < M.rows; ++i) {
            if (i == r) continue;
            uint8_t f = M.at(i, c);
            if (!f) continue;
            for (uint32_t j = c; j < M.cols; ++j)
                M.at(i, j) =
                    static_cast<uint8_t>((M.at(i, j) + (M.p - f) * M.at(r, j)) % M.p);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline uint32_t rank(MatGFp M) { return static_cast<uint32_t>(rref_inplace(M).size()); }

/// Canonical kernel basis: one vector per free column in ascending order,
/// with a 1 at its free column.
inline std::vector<VecGFp> kernel_basis(MatGFp M) {
    auto pivots = rref_inplace(M);
    std::vector<int32_t> pivot_row(M.cols, -1);
    for (uint32_t r = 0; r < pivots.size(); ++r) pivot_row[pivots[r]] = static_cast<int32_t>(r);
    std::vector<VecGFp> basis;
    for (uint32_t f = 0; f < M.cols; ++f) {
        if (pivot_row[f] >= 0) continue;
        VecGFp x{M.p, std::vector<uint8_t>(M.cols, 0)};
        x.e[f] = 1;
        for (uint32_t r = 0; r < pivots.size(); ++r) {
            uint8_t v = M.at(r, f);
            if (v) x.e[pivots[r]] = static_cast<uint8_t>(M.p - v);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

/// Canonical particular solution of Mx = b (free variables zero), or nullopt.
inline std::optional<VecGFp> solve(const MatGFp& M, const VecGFp& b) {
    require(b.p == M.p && b.e.size() == M.rows, "solve: shape or modulus mismatch");
    MatGFp aug(M.p, M.rows, M.cols + 1);
    for (uint32_t i = 0; i < M.rows; ++i) {
        std::copy(M.row(i), M.row(i) + M.cols, aug.row(i));
        aug.at(i, M.cols) = b.e[i];
    }
    auto pivots = rref_inplace(aug);
    if (!pivots.empty() && pivots.back() == M.cols) return std::nullopt;
    VecGFp x{M.p, std::vector<uint8_t>(M.cols, 0)};
    for (uint32_t r = 0; r < pivots.size(); ++r) x.e[pivots[r]] = aug.at(r, M.cols);
    return x;
}

inline MatGFp mat_inverse(const MatGFp& M) {
    require(M.rows == M.cols, "mat_inverse: square matrix required");
    MatGFp aug(M.p, M.rows, 2 * M.cols);
    for (uint32_t i = 0; i < M.rows; ++i) {
        std::copy(M.row(i), M.row(i) + M.cols, aug.row(i));
        aug.at(i, M.cols + i) = 1;
    }
    auto pivots = rref_inplace(aug);
    require(pivots.size() == M.rows && (pivots.empty() || pivots.back() == M.rows - 1),
            "mat_inverse: singular matrix");
    MatGFp inv(M.p, M.rows, M.cols);
    for (uint32_t i = 0; i < M.rows; ++i)
        std::copy(aug.row(i) + M.cols, aug.row(i) + 2 * M.cols, inv.row(i));
    return inv;
}

// ---------------------------------------------------------------------------

namespace detail {

template <uint8_t P>
void axpy_rows_fixed(uint8_t* dst, const uint8_t* src, uint8_t c, size_t len) {
    for (size_t i = 0; i < len; ++i)
        dst[i] = static_cast<uint8_t>((dst[i] + c * src[i]) % P);
}

/// dst += c * src over F_p, entries kept in [0, p).  The usual moduli get
/// constant-divisor bodies so the compiler can vectorize the reduction.
inline void axpy_rows(uint8_t p, uint8_t* dst, const uint8_t* src, uint8_t c, size_t len) {
    switch (p) {
        case 2: return axpy_rows_fixed<2>(dst, src, c, len);
        case 3: return axpy_rows_fixed<3>(dst, src, c, len);
        case 5: return axpy_rows_fixed<5>(dst, src, c, len);
        case 7: return axpy_rows_fixed<7>(dst, src, c, len);
        case 11: return axpy_rows_fixed<11>(dst, src, c, len);
        case 13: return axpy_rows_fixed<13>(dst, src, c, len);
        default:
            for (size_t i = 0; i < len; ++i)
                dst[i] = static_cast<uint8_t>((dst[i] + c * src[i]) % p);
    }
}

}  // namespace detail

/// Row-at-a-time dense eliminator for systems with few columns.  Pivot rows
/// are kept mutually reduced, so the final state is the unique RREF of the
/// accumulated row space and the kernel comes out in canonical form.
class DenseEliminator {
  public:
    DenseEliminator(uint8_t p, uint32_t cols) : p_(p), cols_(cols), pivot_at_(cols, -1) {
        require(p >= 2 && p < 16, "dense eliminator: modulus out of range");
    }

    /// row must hold cols() entries in [0, p).
    void add_row(const uint8_t* row) {
        scratch_.assign(row, row + cols_);
        int32_t lead = reduce_scratch();
        if (lead >= 0) install(static_cast<uint32_t>(lead));
    }

    /// True iff the row already lies in the accumulated row space.
    bool reduces_to_zero(const uint8_t* row) const {
        scratch_.assign(row, row + cols_);
        return reduce_scratch() < 0;
    }

    uint8_t p() const { return p_; }
    uint32_t cols() const { return cols_; }
    uint32_t rank() const { return static_cast<uint32_t>(rows_.size()); }
    uint32_t nullity() const { return cols_ - rank(); }
    bool is_pivot(uint32_t col) const { return pivot_at_[col] >= 0; }

    const uint8_t* pivot_row(uint32_t col) const {
        require(pivot_at_[col] >= 0, "dense eliminator: not a pivot column");
        return rows_[static_cast<size_t>(pivot_at_[col])].data();
    }

    /// Canonical kernel basis, identical in form to the dense kernel_basis
    /// output: one vector per free column in ascending order.
    std::vector<VecGFp> kernel_basis() const {
        std::vector<VecGFp> basis;
        for (uint32_t f = 0; f < cols_; ++f) {
            if (pivot_at_[f] >= 0) continue;
            VecGFp x{p_, std::vector<uint8_t>(cols_, 0)};
            x.e[f] = 1;
            for (uint32_t c = 0; c < cols_; ++c) {
                int32_t r = pivot_at_[c];
                if (r >= 0 && rows_[r][f]) x.e[c] = static_cast<uint8_t>(p_ - rows_[r][f]);
            }
            basis.push_back(std::move(x));
        }
        return basis;
    }

  private:
    /// Ascending scan clearing every pivot column; pivot rows never extend
    /// left of their pivot, so one pass fully reduces the row.  Returns the
    /// leftmost surviving column or -1 when the row is dependent.
    int32_t reduce_scratch() const {
        int32_t lead = -1;
        for (uint32_t c = 0; c < cols_; ++c) {
            uint8_t v = scratch_[c];
            if (!v) continue;
            int32_t r = pivot_at_[c];
            if (r >= 0)
                detail::axpy_rows(p_, scratch_.data() + c, rows_[r].data() + c,
                                  static_cast<uint8_t>(p_ - v), cols_ - c);
            else if (lead < 0)
                lead = static_cast<int32_t>(c);
        }
        return lead;
    }

    void install(uint32_t c0) {
        uint8_t s = inv_mod_p(scratch_[c0], p_);
        if (s != 1)
            for (uint32_t c = c0; c < cols_; ++c)
                scratch_[c] = static_cast<uint8_t>(scratch_[c] * s % p_);
        for (auto& pr : rows_)
            if (pr[c0])
                detail::axpy_rows(p_, pr.data() + c0, scratch_.data() + c0,
                                  static_cast<uint8_t>(p_ - pr[c0]), cols_ - c0);
        pivot_at_[c0] = static_cast<int32_t>(rows_.size());
        rows_.push_back(scratch_);
    }

    uint8_t p_;
    uint32_t cols_;
    std::vector<std::vector<uint8_t>> rows_;
    std::vector<int32_t> pivot_at_;
    mutable std::vector<uint8_t> scratch_;
};

/// One sparse row: strictly ascending columns, values in [1, p).
using SparseRow = std::vector<std::pair<uint32_t, uint8_t>>;

inline SparseRow to_sparse_row(const uint8_t* v, uint32_t n) {
    SparseRow r;
    for (uint32_t i = 0; i < n; ++i)
        if (v[i]) r.emplace_back(i, v[i]);
    return r;
}

/// Streaming row-at-a-time eliminator.  Pivot rows are kept mutually reduced
/// (no pivot row meets another pivot's column) with their support never left
/// of their own pivot, which makes the final state the unique RREF of the
/// row space: rank, pivot columns and kernel are independent of the order
/// rows arrive in.
class SparseEliminator {
  public:
    SparseEliminator(uint8_t p, uint32_t cols)
        : p_(p), cols_(cols), pivot_at_(cols, -1), users_(cols) {
        require(p >= 2 && p < 16, "sparse eliminator: modulus out of range");
    }

    void add_row(SparseRow row) {
        reduce(row);
        if (row.empty()) return;
        install(std::move(row));
    }

    /// True iff the row already lies in the accumulated row space.
    bool reduces_to_zero(SparseRow row) const {
        reduce(row);
        return row.empty();
    }

    uint8_t p() const { return p_; }
    uint32_t cols() const { return cols_; }
    uint32_t rank() const { return static_cast<uint32_t>(pivots_.size()); }
    uint32_t nullity() const { return cols_ - rank(); }

    std::vector<uint32_t> pivot_columns() const {
        std::vector<uint32_t> out;
        out.reserve(pivots_.size());
        for (uint32_t c = 0; c < cols_; ++c)
            if (pivot_at_[c] >= 0) out.push_back(c);
        return out;
    }

    bool is_pivot(uint32_t col) const { return pivot_at_[col] >= 0; }

    /// RREF rows sorted by pivot column.
    std::vector<SparseRow> rref_rows() const {
        std::vector<SparseRow> out;
        out.reserve(pivots_.size());
        for (uint32_t c = 0; c < cols_; ++c)
            if (pivot_at_[c] >= 0) out.push_back(pivots_[pivot_at_[c]]);
        return out;
    }

    /// Canonical kernel basis, identical to the dense kernel_basis output.
    std::vector<VecGFp> kernel_basis() const {
        std::vector<int64_t> kidx(cols_, -1);
        std::vector<VecGFp> basis;
        for (uint32_t f = 0; f < cols_; ++f) {
            if (pivot_at_[f] >= 0) continue;
            kidx[f] = static_cast<int64_t>(basis.size());
            VecGFp x{p_, std::vector<uint8_t>(cols_, 0)};
            x.e[f] = 1;
            basis.push_back(std::move(x));
        }
        for (const auto& prow : pivots_) {
            uint32_t c = prow.front().first;
            for (size_t i = 1; i < prow.size(); ++i) {
                auto [f, v] = prow[i];
                basis[kidx[f]].e[c] = static_cast<uint8_t>(p_ - v);
            }
        }
        return basis;
    }

    /// For an augmented system [M | b] fed with b as the last column:
    /// consistency and the canonical particular solution (free vars zero).
    bool consistent_augmented() const { return pivot_at_[cols_ - 1] < 0; }
    VecGFp particular_solution_augmented() const {
        require(consistent_augmented(), "augmented system inconsistent");
        VecGFp x{p_, std::vector<uint8_t>(cols_ - 1, 0)};
        for (const auto& prow : pivots_) {
            uint32_t c = prow.front().first;
            if (prow.back().first == cols_ - 1)
                x.e[c] = prow.back().second;
        }
        return x;
    }

  private:
    // row -= v * prow where prow = [(c,1), ...] and row[i] = (c, v).
    // prow's support never extends left of c, so entries before i are
    // untouched and the merged suffix starts past c.
    void subtract_scaled(SparseRow& row, size_t i, uint8_t v, const SparseRow& prow) const {
        scratch_.clear();
        size_t a = i + 1, b = 1;
        while (a < row.size() || b < prow.size()) {
            uint32_t ca = a < row.size() ? row[a].first : UINT32_MAX;
            uint32_t cb = b < prow.size() ? prow[b].first : UINT32_MAX;
            if (ca < cb) {
                scratch_.push_back(row[a]);
                ++a;
            } else if (cb < ca) {
                uint8_t nv = static_cast<uint8_t>((p_ - v * prow[b].second % p_) % p_);
                if (nv) scratch_.emplace_back(cb, nv);
                ++b;
            } else {
                uint8_t nv =
                    static_cast<uint8_t>((row[a].second + (p_ - v * prow[b].second % p_)) % p_);
                if (nv) scratch_.emplace_back(ca, nv);
                ++a;
                ++b;
            }
        }
        row.resize(i);
        row.insert(row.end(), scratch_.begin(), scratch_.end());
    }

    void reduce(SparseRow& row) const {
        size_t i = 0;
        while (i < row.size()) {
            auto [c, v] = row[i];
            int32_t pi = pivot_at_[c];
            if (pi < 0) {
                ++i;
                continue;
            }
            subtract_scaled(row, i, v, pivots_[pi]);
        }
    }

    void install(SparseRow row) {
        uint8_t lead = row.front().second;
        if (lead != 1) {
            uint8_t s = inv_mod_p(lead, p_);
            for (auto& [c, v] : row) v = static_cast<uint8_t>(v * s % p_);
        }
        uint32_t c0 = row.front().first;
        int32_t id = static_cast<int32_t>(pivots_.size());
        // clear column c0 from every existing pivot row
        for (int32_t uid : users_[c0]) {
            SparseRow& P = pivots_[uid];
            auto it = std::lower_bound(P.begin(), P.end(), c0,
                                       [](const auto& e, uint32_t c) { return e.first < c; });
            if (it == P.end() || it->first != c0) continue;  // stale entry
            size_t pos = static_cast<size_t>(it - P.begin());
            uint8_t w = it->second;
            subtract_scaled(P, pos, w, row);
            for (size_t k = 1; k < row.size(); ++k) users_[row[k].first].push_back(uid);
        }
        users_[c0].clear();
        users_[c0].shrink_to_fit();
        for (size_t k = 1; k < row.size(); ++k) users_[row[k].first].push_back(id);
        pivot_at_[c0] = id;
        pivots_.push_back(std::move(row));
    }

    uint8_t p_;
    uint32_t cols_;
    std::vector<SparseRow> pivots_;
    std::vector<int32_t> pivot_at_;
    std::vector<std::vector<int32_t>> users_;
    mutable SparseRow scratch_;
};

struct SparseRankKernel {
    uint32_t rank = 0;
    std::vector<VecGFp> kernel;
};

/// Rank and canonical kernel of a streamed sparse system.  feed is called
/// with a sink accepting one SparseRow at a time.
template <class Feeder>
SparseRankKernel sparse_rank_kernel(uint8_t p, uint32_t cols, Feeder&& feed) {
    SparseEliminator elim(p, cols);
    feed([&](SparseRow row) { elim.add_row(std::move(row)); });
    return {elim.rank(), elim.kernel_basis()};
}

}  // namespace cforge
