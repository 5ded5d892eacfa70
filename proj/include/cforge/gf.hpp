#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "common.hpp"

namespace cforge {

// Finite fields F_{l^m}.  Elements are little-endian coefficient vectors over
// F_l, reduced modulo a fixed monic irreducible polynomial.  The modulus is
// the smallest monic irreducible of degree m in the element enumeration
// order (ascending integer encoding sum c_i * l^i), so a (l, m) pair always
// names the same field.

namespace poly {

// polynomials over F_l, little-endian, not necessarily trimmed
using P = std::vector<uint32_t>;

inline int degree(const P& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
        if (f[i] != 0) return i;
    return -1;
}

inline uint32_t inv_mod(uint32_t a, uint32_t l) {
    // extended gcd; l prime, a in [1, l)
    int64_t t = 0, nt = 1, r = l, nr = a % l;
    while (nr != 0) {
        int64_t q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (t < 0) t += l;
    return static_cast<uint32_t>(t);
}

// in-place f mod g, g monic
inline void reduce(P& f, const P& g, uint32_t l) {
    int dg = degree(g);
    for (int i = degree(f); i >= dg; --i) {
        uint32_t c = f[i];
        if (c == 0) continue;
        for (int j = 0; j <= dg; ++j) {
            uint64_t sub = static_cast<uint64_t>(c) * g[j] % l;
            uint32_t& slot = f[i - dg + j];
            slot = static_cast<uint32_t>((slot + l - sub) % l);
        }
    }
    f.resize(dg > 0 ? dg : 1, 0);
}

inline P mul(const P& a, const P& b, uint32_t l) {
    P c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = static_cast<uint32_t>((c[i + j] + static_cast<uint64_t>(a[i]) * b[j]) % l);
    }
    return c;
}

inline bool divides(const P& d, P f, uint32_t l) {
    int dd = degree(d);
    uint32_t lead_inv = inv_mod(d[dd], l);
    for (int i = degree(f); i >= dd; --i) {
        uint32_t c = f[i];
        if (c == 0) continue;
        uint64_t q = static_cast<uint64_t>(c) * lead_inv % l;
        for (int j = 0; j <= dd; ++j) {
            uint64_t sub = q * d[j] % l;
            uint32_t& slot = f[i - dd + j];
            slot = static_cast<uint32_t>((slot + l - sub) % l);
        }
    }
    return degree(f) == -1;
}

}  // namespace poly

inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

class FieldSpec;
using Field = std::shared_ptr<const FieldSpec>;

struct FieldElement {
    const FieldSpec* spec = nullptr;
    std::vector<uint32_t> coeffs;  // little-endian, size m, entries in [0, l)

    bool is_zero() const {
        for (uint32_t c : coeffs)
            if (c) return false;
        return true;
    }
    uint64_t encode() const;
    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.spec == b.spec && a.coeffs == b.coeffs;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }
};

class FieldSpec {
  public:
    uint32_t characteristic() const { return l_; }
    uint32_t degree() const { return m_; }
    uint64_t order() const { return order_; }
    const std::vector<uint32_t>& modulus() const { return modulus_; }

    FieldElement zero() const { return {this, std::vector<uint32_t>(m_, 0)}; }
    FieldElement one() const {
        FieldElement e = zero();
        e.coeffs[0] = 1;
        return e;
    }
    FieldElement element(std::vector<uint32_t> coeffs) const {
        require(coeffs.size() == m_, "field element: coefficient count != m");
        for (uint32_t c : coeffs)
            require(c < l_, "field element: coefficient out of range");
        return {this, std::move(coeffs)};
    }
    /// i-th element in the canonical enumeration (0 first).
    FieldElement from_index(uint64_t idx) const {
        require(idx < order_, "field element index out of range");
        FieldElement e = zero();
        for (uint32_t i = 0; i < m_; ++i) {
            e.coeffs[i] = static_cast<uint32_t>(idx % l_);
            idx /= l_;
        }
        return e;
    }

    static Field make(uint32_t l, uint32_t m, uint64_t cap);

  private:
    FieldSpec(uint32_t l, uint32_t m, uint64_t order, std::vector<uint32_t> modulus)
        : l_(l), m_(m), order_(order), modulus_(std::move(modulus)) {}
    uint32_t l_, m_;
    uint64_t order_;
    std::vector<uint32_t> modulus_;
};

inline uint64_t FieldElement::encode() const {
    uint64_t v = 0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * spec->characteristic() + coeffs[i];
    return v;
}

inline Field FieldSpec::make(uint32_t l, uint32_t m, uint64_t cap) {
    require(is_prime(l), "field: characteristic must be prime");
    require(m >= 1, "field: degree must be at least 1");
    uint64_t order = 1;
    for (uint32_t i = 0; i < m; ++i) {
        order *= l;
        require(order <= cap, "field: order exceeds cap");
    }
    // smallest monic irreducible of degree m in enumeration order
    std::vector<uint32_t> mod;
    for (uint64_t v = 0;; ++v) {
        require(v < order, "field: no irreducible modulus found");
        poly::P cand(m + 1, 0);
        uint64_t t = v;
        for (uint32_t i = 0; i < m; ++i) {
            cand[i] = static_cast<uint32_t>(t % l);
            t /= l;
        }
        cand[m] = 1;
        bool irred = true;
        if (m >= 2) {
            if (cand[0] == 0) continue;  // divisible by x
            for (uint32_t dd = 1; irred && 2 * dd <= m; ++dd) {
                uint64_t count = 1;
                for (uint32_t i = 0; i < dd; ++i) count *= l;
                for (uint64_t dv = 0; dv < count; ++dv) {
                    poly::P div(dd + 1, 0);
                    uint64_t u = dv;
                    for (uint32_t i = 0; i < dd; ++i) {
                        div[i] = static_cast<uint32_t>(u % l);
                        u /= l;
                    }
                    div[dd] = 1;
                    if (poly::divides(div, cand, l)) {
                        irred = false;
                        break;
                    }
                }
            }
        }
        if (irred) {
            mod = std::move(cand);
            break;
        }
    }
    return Field(new FieldSpec(l, m, order, std::move(mod)));
}

/// F_{l^m} with the canonical (smallest) irreducible modulus.
inline Field make_field(uint32_t l, uint32_t m, uint64_t cap = 1ull << 20) {
    return FieldSpec::make(l, m, cap);
}

namespace detail {
inline void check_same_field(const FieldElement& a, const FieldElement& b) {
    require(a.spec != nullptr && a.spec == b.spec, "field elements from different fields");
}
}  // namespace detail

inline FieldElement add(const FieldElement& a, const FieldElement& b) {
    detail::check_same_field(a, b);
    uint32_t l = a.spec->characteristic();
    FieldElement c = a;
    for (size_t i = 0; i < c.coeffs.size(); ++i) c.coeffs[i] = (c.coeffs[i] + b.coeffs[i]) % l;
    return c;
}

inline FieldElement neg(const FieldElement& a) {
    uint32_t l = a.spec->characteristic();
    FieldElement c = a;
    for (auto& x : c.coeffs) x = (l - x) % l;
    return c;
}

inline FieldElement sub(const FieldElement& a, const FieldElement& b) { return add(a, neg(b)); }

inline FieldElement mul(const FieldElement& a, const FieldElement& b) {
    detail::check_same_field(a, b);
    uint32_t l = a.spec->characteristic();
    poly::P prod = poly::mul(a.coeffs, b.coeffs, l);
    poly::reduce(prod, a.spec->modulus(), l);
    FieldElement c = a.spec->zero();
    for (size_t i = 0; i < c.coeffs.size() && i < prod.size(); ++i) c.coeffs[i] = prod[i];
    return c;
}

inline FieldElement pow(const FieldElement& a, uint64_t e) {
    FieldElement acc = a.spec->one(), base = a;
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

inline FieldElement inv(const FieldElement& a) {
    require(!a.is_zero(), "field: inverse of zero");
    return pow(a, a.spec->order() - 2);
}

/// x -> x^l, a field automorphism generating Gal(F_{l^m} / F_l).
inline FieldElement frobenius(const FieldElement& a) { return pow(a, a.spec->characteristic()); }

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return sub(a, b); }
inline FieldElement operator-(const FieldElement& a) { return neg(a); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return mul(a, b); }

/// All field elements, 0 first, in the canonical enumeration order.
inline std::vector<FieldElement> enumerate_field(const Field& f) {
    std::vector<FieldElement> out;
    out.reserve(f->order());
    for (uint64_t i = 0; i < f->order(); ++i) out.push_back(f->from_index(i));
    return out;
}

inline uint64_t multiplicative_order(const FieldElement& a) {
    require(!a.is_zero(), "multiplicative order of zero");
    uint64_t n = a.spec->order() - 1, ord = n;
    for (uint64_t q : prime_factors(n)) {
        while (ord % q == 0 && pow(a, ord / q) == a.spec->one()) ord /= q;
    }
    return ord;
}

/// Smallest generator of the multiplicative group in enumeration order.
inline FieldElement multiplicative_generator(const Field& f) {
    uint64_t n = f->order() - 1;
    auto factors = prime_factors(n);
    for (uint64_t i = 1; i < f->order(); ++i) {
        FieldElement a = f->from_index(i);
        bool gen = true;
        for (uint64_t q : factors) {
            if (pow(a, n / q) == f->one()) {
                gen = false;
                break;
            }
        }
        if (gen) return a;
    }
    throw error("multiplicative group has no generator");  // unreachable
}

}  // namespace cforge
