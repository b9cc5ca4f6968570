#ifndef NBLDPC_FIELD_HPP
#define NBLDPC_FIELD_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbldpc {

/// p x p matrix over GF(2), rows stored as bitmasks (bit c = column c).
struct BinaryMatrix {
    int rows = 0;
    int cols = 0;
    std::array<std::uint32_t, 16> row_bits{};

    bool operator==(const BinaryMatrix&) const = default;

    bool get(int r, int c) const { return (row_bits[r] >> c) & 1u; }
    void set(int r, int c, bool v) {
        if (v)
            row_bits[r] |= (1u << c);
        else
            row_bits[r] &= ~(1u << c);
    }

    static BinaryMatrix identity(int n) {
        BinaryMatrix m;
        m.rows = m.cols = n;
        for (int i = 0; i < n; ++i) m.row_bits[i] = 1u << i;
        return m;
    }
};

/// Length-p bit vector, the binary image of one field symbol.
struct BitVector {
    int len = 0;
    std::uint32_t bits = 0;

    bool operator==(const BitVector&) const = default;
    bool get(int i) const { return (bits >> i) & 1u; }
    void set(int i, bool v) {
        if (v)
            bits |= (1u << i);
        else
            bits &= ~(1u << i);
    }
};

inline BinaryMatrix matmul_gf2(const BinaryMatrix& a, const BinaryMatrix& b) {
    BinaryMatrix out;
    out.rows = a.rows;
    out.cols = b.cols;
    for (int r = 0; r < a.rows; ++r) {
        std::uint32_t acc = 0;
        std::uint32_t row = a.row_bits[r];
        for (int c = 0; c < a.cols; ++c)
            if ((row >> c) & 1u) acc ^= b.row_bits[c];
        out.row_bits[r] = acc;
    }
    return out;
}

/// GF(2^p) with nonzero elements represented as powers of the companion
/// matrix A of a fixed primitive polynomial. Immutable after construction.
struct FieldParams {
    int p = 0;
    int q = 0;                    // 2^p
    std::uint32_t primitive_poly = 0;  // bitmask incl. x^p term and constant
    BinaryMatrix generator;       // A, the companion matrix
    std::vector<BinaryMatrix> element_table;  // A^0 .. A^{q-2}

    int order() const { return q - 1; }
};

namespace detail {

// Minimal-weight primitive polynomials over GF(2) for degrees 1..16.
// Bitmask includes the x^p term; e.g. p=3 -> x^3+x+1 -> 0b1011.
inline constexpr std::uint32_t kPrimitivePoly[17] = {
    0,
    0x3,      // x+1
    0x7,      // x^2+x+1
    0xB,      // x^3+x+1
    0x13,     // x^4+x+1
    0x25,     // x^5+x^2+1
    0x43,     // x^6+x+1
    0x83,     // x^7+x+1
    0x11D,    // x^8+x^4+x^3+x^2+1
    0x211,    // x^9+x^4+1
    0x409,    // x^10+x^3+1
    0x805,    // x^11+x^2+1
    0x1053,   // x^12+x^6+x^4+x+1
    0x201B,   // x^13+x^4+x^3+x+1
    0x4443,   // x^14+x^10+x^6+x+1
    0x8003,   // x^15+x+1
    0x1100B,  // x^16+x^12+x^3+x+1
};

}  // namespace detail

/// Builds GF(2^p) from the built-in primitive-polynomial table, 1 <= p <= 16.
inline FieldParams make_field(int p) {
    if (p < 1 || p > 16)
        throw std::invalid_argument("make_field: p out of range [1,16]: " + std::to_string(p));
    FieldParams f;
    f.p = p;
    f.q = 1 << p;
    f.primitive_poly = detail::kPrimitivePoly[p];

    // Companion matrix of multiplication by alpha on the basis {1, alpha, ..., alpha^{p-1}}:
    // column j < p-1 is e_{j+1}; the last column holds the low bits of the polynomial
    // (alpha^p reduced mod the primitive polynomial).
    BinaryMatrix a;
    a.rows = a.cols = p;
    for (int j = 0; j + 1 < p; ++j) a.set(j + 1, j, true);
    for (int t = 0; t < p; ++t)
        if ((f.primitive_poly >> t) & 1u) a.set(t, p - 1, true);
    f.generator = a;

    f.element_table.reserve(f.q - 1);
    f.element_table.push_back(BinaryMatrix::identity(p));
    for (int k = 1; k < f.q - 1; ++k)
        f.element_table.push_back(matmul_gf2(a, f.element_table.back()));
    return f;
}

/// (k1 + k2) mod (q-1); negative inputs are reduced into [0, q-2] first.
inline int exponent_add(const FieldParams& field, long long k1, long long k2) {
    const long long m = field.order();
    long long r = (k1 + k2) % m;
    if (r < 0) r += m;
    return static_cast<int>(r);
}

inline int exponent_mod(const FieldParams& field, long long k) {
    return exponent_add(field, k, 0);
}

/// A^{k mod (q-1)}; companion_power(0) is the identity.
inline const BinaryMatrix& companion_power(const FieldParams& field, long long k) {
    return field.element_table[static_cast<std::size_t>(exponent_mod(field, k))];
}

/// A^k * v over GF(2).
inline BitVector mat_vec(const FieldParams& field, long long k, const BitVector& v) {
    if (v.len != field.p) throw std::invalid_argument("mat_vec: length mismatch");
    const BinaryMatrix& m = companion_power(field, k);
    BitVector out;
    out.len = field.p;
    for (int r = 0; r < field.p; ++r) {
        std::uint32_t masked = m.row_bits[r] & v.bits;
        out.set(r, __builtin_popcount(masked) & 1);
    }
    return out;
}

inline int matrix_rank_gf2(BinaryMatrix m) {
    int rank = 0;
    for (int c = 0; c < m.cols; ++c) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r)
            if (m.get(r, c)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m.row_bits[pivot], m.row_bits[rank]);
        for (int r = 0; r < m.rows; ++r)
            if (r != rank && m.get(r, c)) m.row_bits[r] ^= m.row_bits[rank];
        ++rank;
    }
    return rank;
}

}  // namespace nbldpc

#endif
