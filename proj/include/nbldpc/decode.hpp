#ifndef NBLDPC_DECODE_HPP
#define NBLDPC_DECODE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nbldpc/field.hpp"
#include "nbldpc/graph.hpp"

namespace nbldpc {

enum class BitState : std::uint8_t { Known0 = 0, Known1 = 1, Erased = 2 };

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Channel output on the binary image: per-bit known value or erasure.
struct ErasurePattern {
    std::vector<BitState> bit_states;
    long long erased_count = 0;

    static ErasurePattern all_known_zero(long long bits) {
        ErasurePattern p;
        p.bit_states.assign(bits, BitState::Known0);
        return p;
    }
    void recount() {
        erased_count = 0;
        for (auto s : bit_states)
            if (s == BitState::Erased) ++erased_count;
    }
};

struct DecodeResult {
    std::vector<BitState> final_states;
    int iterations_used = 0;
    std::vector<long long> ops_per_iteration;  // bits recovered per sweep
    long long recovered_bits = 0;
    long long unrecovered_symbols = 0;
    bool success = false;
};

/// Sweep discipline. Sequential peeling reuses bits recovered earlier in the
/// same sweep; synchronous evaluates every equation against the pre-sweep
/// state (the schedule density evolution models).
enum class Schedule { Sequential, Synchronous };

namespace detail {

inline void count_symbols(const BinaryImageGraph& big, DecodeResult& res) {
    const int p = big.p;
    res.unrecovered_symbols = 0;
    for (long long n = 0; n < big.graph.N; ++n) {
        bool whole = true;
        for (int t = 0; t < p; ++t)
            if (res.final_states[n * p + t] == BitState::Erased) {
                whole = false;
                break;
            }
        if (!whole) ++res.unrecovered_symbols;
    }
    res.success = true;
    for (auto s : res.final_states)
        if (s == BitState::Erased) {
            res.success = false;
            break;
        }
}

/// Assigns a recovered value, guarding against contradictory recoveries
/// (impossible for erasure patterns applied to a valid codeword).
inline bool assign_bit(std::vector<BitState>& state, long long bit, int value,
                       long long& ops) {
    BitState nv = value ? BitState::Known1 : BitState::Known0;
    if (state[bit] == BitState::Erased) {
        state[bit] = nv;
        ++ops;
        return true;
    }
    if (state[bit] != nv)
        throw IntegrityError("decode: bit resolved to two different values");
    return false;
}

struct PendingWrites {
    std::vector<std::pair<long long, std::uint8_t>> writes;
    void push(long long bit, int value) { writes.push_back({bit, static_cast<std::uint8_t>(value)}); }
    long long commit(std::vector<BitState>& state) {
        long long ops = 0;
        for (auto& [bit, v] : writes) assign_bit(state, bit, v, ops);
        writes.clear();
        return ops;
    }
};

}  // namespace detail

namespace detail {

/// Core peeling loop. `use_raw` adds the plain bit-level equations (the rows
/// of H-bar as given); `use_inverse` adds, per (check, target) pair, the
/// label-inverted system x_n = sum_{i != n} A^{k_i - k_n} x_i whose rows touch
/// exactly one target bit each. The hybrid decoder runs both families.
inline DecodeResult peel(const BinaryImageGraph& big, const FieldParams& field,
                         const ErasurePattern& pattern, int max_iter, bool use_raw,
                         bool use_inverse, Schedule schedule) {
    const auto& g = big.graph;
    const int p = big.p;
    if (static_cast<long long>(pattern.bit_states.size()) != big.bit_count)
        throw std::invalid_argument("decode: pattern length mismatch");
    if (max_iter < 1) throw std::invalid_argument("decode: max_iter < 1");

    DecodeResult res;
    res.final_states = pattern.bit_states;
    auto& state = res.final_states;

    long long remaining = 0;
    for (auto s : state)
        if (s == BitState::Erased) ++remaining;
    if (remaining == 0) {
        count_symbols(big, res);
        return res;
    }

    const bool synchronous = schedule == Schedule::Synchronous;
    PendingWrites pending;

    for (int iter = 0; iter < max_iter; ++iter) {
        long long ops = 0;
        for (int m = 0; m < g.M; ++m) {
            const auto& edges = g.chk_edges[m];
            const int deg = static_cast<int>(edges.size());

            if (use_raw) {
                for (int t = 0; t < p; ++t) {
                    long long unknown_bit = -1;
                    int parity = 0;
                    bool stuck = false;
                    for (int e : edges) {
                        const auto& mat = companion_power(field, g.edge_label[e]);
                        std::uint32_t mask = mat.row_bits[t];
                        const long long base = static_cast<long long>(g.edge_var[e]) * p;
                        while (mask) {
                            int s = __builtin_ctz(mask);
                            mask &= mask - 1;
                            BitState st = state[base + s];
                            if (st == BitState::Erased) {
                                if (unknown_bit >= 0) {
                                    stuck = true;
                                    break;
                                }
                                unknown_bit = base + s;
                            } else {
                                parity ^= static_cast<int>(st);
                            }
                        }
                        if (stuck) break;
                    }
                    if (!stuck && unknown_bit >= 0) {
                        if (synchronous)
                            pending.push(unknown_bit, parity);
                        else
                            assign_bit(state, unknown_bit, parity, ops);
                    }
                }
            }

            if (use_inverse) {
                for (int j = 0; j < deg; ++j) {
                    const int ej = edges[j];
                    const int kj = g.edge_label[ej];
                    const long long tbase = static_cast<long long>(g.edge_var[ej]) * p;
                    for (int t = 0; t < p; ++t) {
                        if (state[tbase + t] != BitState::Erased) continue;
                        int value = 0;
                        bool resolvable = true;
                        for (int i = 0; i < deg && resolvable; ++i) {
                            if (i == j) continue;
                            const int ei = edges[i];
                            const auto& mat =
                                companion_power(field, g.edge_label[ei] - kj);
                            std::uint32_t mask = mat.row_bits[t];
                            const long long base =
                                static_cast<long long>(g.edge_var[ei]) * p;
                            while (mask) {
                                int s = __builtin_ctz(mask);
                                mask &= mask - 1;
                                BitState st = state[base + s];
                                if (st == BitState::Erased) {
                                    resolvable = false;
                                    break;
                                }
                                value ^= static_cast<int>(st);
                            }
                        }
                        if (resolvable) {
                            if (synchronous)
                                pending.push(tbase + t, value);
                            else
                                assign_bit(state, tbase + t, value, ops);
                        }
                    }
                }
            }
        }
        if (synchronous) ops += pending.commit(state);
        res.ops_per_iteration.push_back(ops);
        res.recovered_bits += ops;
        res.iterations_used = iter + 1;
        remaining -= ops;
        if (ops == 0 || remaining == 0) break;
    }
    count_symbols(big, res);
    return res;
}

}  // namespace detail

/// Hybrid inverse-operation peeling: bit-level peeling on the raw rows of
/// H-bar together with the per-target label-inverted systems. One iteration
/// is a full sweep over every equation.
inline DecodeResult decode_hybrid(const BinaryImageGraph& big, const FieldParams& field,
                                  const ErasurePattern& pattern, int max_iter = 60,
                                  Schedule schedule = Schedule::Sequential) {
    return detail::peel(big, field, pattern, max_iter, true, true, schedule);
}

/// No-inverse baseline (D1): plain bit-level peeling on the rows of H-bar as
/// given; a bit is recovered only when it is the sole erased bit of a row.
inline DecodeResult decode_no_inverse(const BinaryImageGraph& big, const FieldParams& field,
                                      const ErasurePattern& pattern, int max_iter = 60,
                                      Schedule schedule = Schedule::Sequential) {
    return detail::peel(big, field, pattern, max_iter, true, false, schedule);
}

/// Maximum-likelihood oracle: Gauss-Jordan elimination over GF(2) on the
/// binary system restricted to erased bits. A bit is recovered iff its value
/// is identical in every solution.
inline DecodeResult decode_ml_oracle(const BinaryImageGraph& big, const ErasurePattern& pattern,
                                     long long max_unknowns = 20000) {
    const auto& g = big.graph;
    const int p = big.p;
    if (static_cast<long long>(pattern.bit_states.size()) != big.bit_count)
        throw std::invalid_argument("decode_ml_oracle: pattern length mismatch");

    DecodeResult res;
    res.final_states = pattern.bit_states;
    auto& state = res.final_states;

    std::vector<long long> erased;  // bit index per matrix column
    std::vector<long long> col_of(big.bit_count, -1);
    for (long long b = 0; b < big.bit_count; ++b)
        if (state[b] == BitState::Erased) {
            col_of[b] = static_cast<long long>(erased.size());
            erased.push_back(b);
        }
    if (erased.empty()) {
        res.iterations_used = 1;
        res.ops_per_iteration.push_back(0);
        detail::count_symbols(big, res);
        return res;
    }
    if (static_cast<long long>(erased.size()) > max_unknowns)
        throw std::invalid_argument("decode_ml_oracle: unknown count exceeds guard");

    const std::size_t ncols = erased.size() + 1;  // + RHS column
    const std::size_t words = (ncols + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (int m = 0; m < g.M; ++m) {
        for (int t = 0; t < p; ++t) {
            std::vector<std::uint64_t> row(words, 0);
            bool nonzero = false;
            int rhs = 0;
            for (int e : g.chk_edges[m]) {
                const auto& mat = companion_power(big.field, g.edge_label[e]);
                std::uint32_t mask = mat.row_bits[t];
                const long long base = static_cast<long long>(g.edge_var[e]) * p;
                while (mask) {
                    int s = __builtin_ctz(mask);
                    mask &= mask - 1;
                    const long long bit = base + s;
                    if (state[bit] == BitState::Erased) {
                        const long long c = col_of[bit];
                        row[c >> 6] ^= 1ull << (c & 63);
                        nonzero = true;
                    } else {
                        rhs ^= static_cast<int>(state[bit]);
                    }
                }
            }
            if (rhs) row[(ncols - 1) >> 6] ^= 1ull << ((ncols - 1) & 63);
            if (nonzero) rows.push_back(std::move(row));
        }
    }

    auto test_bit = [&](const std::vector<std::uint64_t>& r, std::size_t c) {
        return (r[c >> 6] >> (c & 63)) & 1ull;
    };
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t c = 0; c < erased.size() && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && !test_bit(rows[piv], c)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && test_bit(rows[r], c))
                for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[rank][w];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    for (std::size_t r = 0; r < rank; ++r) {
        // determined iff the pivot row involves no free column
        std::size_t support = 0;
        for (std::size_t w = 0; w < words; ++w) support += __builtin_popcountll(rows[r][w]);
        const bool rhs = test_bit(rows[r], ncols - 1);
        if (support == 1u + (rhs ? 1u : 0u)) {
            const long long bit = erased[pivot_col[r]];
            state[bit] = rhs ? BitState::Known1 : BitState::Known0;
            ++res.recovered_bits;
        }
    }
    res.iterations_used = 1;
    res.ops_per_iteration.push_back(res.recovered_bits);
    detail::count_symbols(big, res);
    return res;
}

}  // namespace nbldpc

#endif
