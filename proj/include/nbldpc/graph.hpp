#ifndef NBLDPC_GRAPH_HPP
#define NBLDPC_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbldpc/degree.hpp"
#include "nbldpc/field.hpp"
#include "nbldpc/rng.hpp"

namespace nbldpc {

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Labeled q-ary Tanner graph. Edge i connects variable edge_var[i] to check
/// edge_chk[i] with label exponent edge_label[i] (A^k). No parallel edges.
struct TannerGraph {
    int N = 0;
    int M = 0;
    int p = 0;  // 0 until labels are assigned
    std::uint64_t seed = 0;
    std::vector<int> edge_var, edge_chk, edge_label;
    std::vector<std::vector<int>> var_edges, chk_edges;  // adjacency by edge index

    std::size_t edge_count() const { return edge_var.size(); }

    void rebuild_adjacency() {
        var_edges.assign(N, {});
        chk_edges.assign(M, {});
        for (std::size_t e = 0; e < edge_var.size(); ++e) {
            var_edges[edge_var[e]].push_back(static_cast<int>(e));
            chk_edges[edge_chk[e]].push_back(static_cast<int>(e));
        }
    }
};

/// Binary image of a labeled graph: each edge label k acts as the p x p block
/// A^k, so the code becomes ker(H-bar) on N*p bits. Carries its field so the
/// blocks are materializable without extra context.
struct BinaryImageGraph {
    TannerGraph graph;
    FieldParams field;
    int p = 0;
    long long bit_count = 0;
};

namespace detail {

/// Largest-remainder apportionment of `total` items over weights.
inline std::vector<long long> largest_remainder(const std::vector<double>& weights,
                                                long long total) {
    double wsum = 0;
    for (double w : weights) wsum += w;
    std::vector<long long> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> rema(weights.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double exact = total * weights[i] / wsum;
        counts[i] = static_cast<long long>(exact);
        assigned += counts[i];
        rema[i] = {exact - counts[i], i};
    }
    std::sort(rema.begin(), rema.end(),
              [](auto& a, auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (long long r = 0; r < total - assigned; ++r) counts[rema[r % rema.size()].second]++;
    return counts;
}

/// Integer node counts per degree for one side of the graph.
inline std::map<int, long long> degree_node_counts(const DegreeDistribution& dist,
                                                   long long nodes) {
    std::vector<int> degs;
    std::vector<double> w;
    for (auto& [d, c] : dist.coeffs) {
        if (c <= 0) continue;
        degs.push_back(d);
        w.push_back(c / d);
    }
    auto counts = largest_remainder(w, nodes);
    std::map<int, long long> out;
    for (std::size_t i = 0; i < degs.size(); ++i) out[degs[i]] = counts[i];
    return out;
}

/// Adjusts check-side node counts so total socket count equals `target`,
/// preferring changes in the highest-degree bucket. May introduce at most
/// one node at an off-target degree.
inline void balance_sockets(std::map<int, long long>& counts, long long target) {
    auto sockets = [&] {
        long long s = 0;
        for (auto& [d, n] : counts) s += static_cast<long long>(d) * n;
        return s;
    };
    for (int guard = 0; guard < 64; ++guard) {
        long long delta = target - sockets();
        if (delta == 0) return;
        int dmax = counts.rbegin()->first;
        if (delta > 0) {
            if (delta >= dmax) {
                counts[dmax] += delta / dmax;
                delta %= dmax;
                if (delta == 0) return;
            }
            if (delta >= 2) {
                counts[static_cast<int>(delta)] += 1;  // one off-target check node
                return;
            }
            // delta == 1: promote one highest-degree check by one degree
            counts[dmax] -= 1;
            if (counts[dmax] == 0) counts.erase(dmax);
            counts[dmax + 1] += 1;
            return;
        }
        // delta < 0: drop a check whose degree matches, else shrink from the top
        long long need = -delta;
        auto it = counts.find(static_cast<int>(need));
        if (need >= 2 && it != counts.end() && it->second > 0) {
            if (--it->second == 0) counts.erase(it);
            return;
        }
        int d = counts.rbegin()->first;
        if (--counts[d] == 0) counts.erase(d);
        if (counts.empty()) throw ConstructionError("socket balancing exhausted check nodes");
    }
    throw ConstructionError("socket balancing did not terminate");
}

}  // namespace detail

/// Samples a Tanner graph from (lambda, rho) by configuration-model socket
/// matching: largest-remainder node counts, highest-bucket socket repair,
/// bounded rematching plus local edge swaps to remove parallel edges.
/// Deterministic given the seed.
inline TannerGraph sample_code(const DegreeDistribution& lambda, const DegreeDistribution& rho,
                               long long N, std::uint64_t seed) {
    lambda.validate(1e-6);
    rho.validate(1e-6);
    if (rho.min_degree() < 2)
        throw std::invalid_argument("sample_code: check distribution needs degree >= 2");
    double R = design_rate(lambda, rho);
    if (R >= 1.0) throw std::invalid_argument("sample_code: design rate must be below 1");

    auto vcounts = detail::degree_node_counts(lambda, N);
    long long E = 0;
    for (auto& [d, n] : vcounts) E += static_cast<long long>(d) * n;

    long long M_target = std::llround(E * rho.inv_moment());
    auto ccounts = detail::degree_node_counts(rho, std::max<long long>(1, M_target));
    detail::balance_sockets(ccounts, E);

    TannerGraph g;
    g.seed = seed;
    g.N = static_cast<int>(N);
    long long M = 0;
    for (auto& [d, n] : ccounts) M += n;
    g.M = static_cast<int>(M);

    std::vector<int> vdeg(N), cdeg(M);
    {
        long long idx = 0;
        for (auto& [d, n] : vcounts)
            for (long long i = 0; i < n; ++i) vdeg[idx++] = d;
        idx = 0;
        for (auto& [d, n] : ccounts)
            for (long long i = 0; i < n; ++i) cdeg[idx++] = d;
    }

    std::vector<int> vsock, csock;
    vsock.reserve(E);
    csock.reserve(E);
    for (long long n = 0; n < N; ++n)
        for (int s = 0; s < vdeg[n]; ++s) vsock.push_back(static_cast<int>(n));
    for (long long m = 0; m < M; ++m)
        for (int s = 0; s < cdeg[m]; ++s) csock.push_back(static_cast<int>(m));
    if (vsock.size() != csock.size())
        throw ConstructionError("socket mismatch after balancing");

    Rng rng(derive_seed(seed, 0x67726170));
    auto has_duplicates = [&](const std::vector<int>& vs) {
        std::set<std::pair<int, int>> seen;
        for (std::size_t e = 0; e < vs.size(); ++e)
            if (!seen.insert({vs[e], csock[e]}).second) return true;
        return false;
    };

    const int resample_attempts = 10;
    bool simple = false;
    for (int attempt = 0; attempt < resample_attempts && !simple; ++attempt) {
        for (std::size_t i = vsock.size(); i > 1; --i)
            std::swap(vsock[i - 1], vsock[rng.below(i)]);
        simple = !has_duplicates(vsock);
    }
    if (!simple) {
        // local swaps: exchange the variable endpoints of a duplicate edge and
        // a random partner edge when that removes the collision
        std::set<std::pair<int, int>> seen;
        std::vector<std::size_t> dups;
        for (std::size_t e = 0; e < vsock.size(); ++e)
            if (!seen.insert({vsock[e], csock[e]}).second) dups.push_back(e);
        std::multiset<std::pair<int, int>> edges;
        for (std::size_t e = 0; e < vsock.size(); ++e) edges.insert({vsock[e], csock[e]});
        long long budget = static_cast<long long>(dups.size()) * 4000 + 4000;
        while (!dups.empty() && budget-- > 0) {
            std::size_t e = dups.back();
            std::size_t f = rng.below(vsock.size());
            if (f == e) continue;
            std::pair<int, int> oe{vsock[e], csock[e]}, of{vsock[f], csock[f]};
            std::pair<int, int> ne{vsock[f], csock[e]}, nf{vsock[e], csock[f]};
            if (ne == nf) continue;
            if (edges.count(ne) || edges.count(nf)) continue;
            edges.erase(edges.find(oe));
            edges.erase(edges.find(of));
            edges.insert(ne);
            edges.insert(nf);
            std::swap(vsock[e], vsock[f]);
            dups.pop_back();
            // the partner edge may itself have been a duplicate; recheck at the end
            if (dups.empty()) {
                std::set<std::pair<int, int>> chk;
                dups.clear();
                for (std::size_t i = 0; i < vsock.size(); ++i)
                    if (!chk.insert({vsock[i], csock[i]}).second) dups.push_back(i);
            }
        }
        if (!dups.empty())
            throw ConstructionError("could not remove parallel edges within swap budget");
    }

    g.edge_var.assign(vsock.begin(), vsock.end());
    g.edge_chk.assign(csock.begin(), csock.end());
    g.edge_label.assign(vsock.size(), 0);
    g.rebuild_adjacency();
    return g;
}

/// Draws every edge label exponent independently and uniformly from
/// {0, ..., q-2}. Deterministic given the seed.
inline TannerGraph assign_labels(TannerGraph graph, const FieldParams& field,
                                 std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x6c61626c));
    for (auto& k : graph.edge_label)
        k = static_cast<int>(rng.below(static_cast<std::uint64_t>(field.order())));
    graph.p = field.p;
    return graph;
}

/// Expands a labeled graph to its binary image.
inline BinaryImageGraph expand_binary(const TannerGraph& graph, const FieldParams& field) {
    if (graph.p != field.p) throw std::invalid_argument("expand_binary: labels not assigned for this field");
    BinaryImageGraph big;
    big.graph = graph;
    big.field = field;
    big.p = field.p;
    big.bit_count = static_cast<long long>(graph.N) * field.p;
    return big;
}

/// Evaluates all parity blocks on a bit assignment (length N*p) and reports
/// whether the word lies in ker(H-bar).
inline bool in_binary_kernel(const BinaryImageGraph& big, const std::vector<std::uint8_t>& bits) {
    const auto& g = big.graph;
    const int p = big.p;
    for (int m = 0; m < g.M; ++m) {
        for (int t = 0; t < p; ++t) {
            int acc = 0;
            for (int e : g.chk_edges[m]) {
                const auto& mat = companion_power(big.field, g.edge_label[e]);
                std::uint32_t rowmask = mat.row_bits[t];
                const long long base = static_cast<long long>(g.edge_var[e]) * p;
                for (int s = 0; s < p; ++s)
                    if ((rowmask >> s) & 1u) acc ^= bits[base + s];
            }
            if (acc) return false;
        }
    }
    return true;
}

/// Edge-perspective bit-node and binary-check-node degree distributions of
/// the expanded graph, counted from the rows/columns of the label blocks.
inline std::pair<DegreeDistribution, DegreeDistribution> empirical_binary_degrees(
    const BinaryImageGraph& big) {
    const auto& g = big.graph;
    const int p = big.p;
    std::map<int, long long> bit_hist, chk_hist;
    for (int n = 0; n < g.N; ++n) {
        for (int t = 0; t < p; ++t) {
            int deg = 0;
            for (int e : g.var_edges[n]) {
                const auto& mat = companion_power(big.field, g.edge_label[e]);
                for (int r = 0; r < p; ++r) deg += (mat.row_bits[r] >> t) & 1u;
            }
            if (deg > 0) bit_hist[deg]++;
        }
    }
    for (int m = 0; m < g.M; ++m) {
        for (int t = 0; t < p; ++t) {
            int deg = 0;
            for (int e : g.chk_edges[m]) {
                const auto& mat = companion_power(big.field, g.edge_label[e]);
                deg += __builtin_popcount(mat.row_bits[t]);
            }
            if (deg > 0) chk_hist[deg]++;
        }
    }
    auto to_dist = [](const std::map<int, long long>& hist) {
        DegreeDistribution d;
        long double edges = 0;
        for (auto& [deg, n] : hist) edges += static_cast<long double>(deg) * n;
        for (auto& [deg, n] : hist)
            d.coeffs[deg] = static_cast<double>(static_cast<long double>(deg) * n / edges);
        return d;
    };
    return {to_dist(bit_hist), to_dist(chk_hist)};
}

/// Text export: "N M p seed" header, then one "n m k" line per edge.
inline void write_graph(std::ostream& os, const TannerGraph& g) {
    os << g.N << ' ' << g.M << ' ' << g.p << ' ' << g.seed << '\n';
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        os << g.edge_var[e] << ' ' << g.edge_chk[e] << ' ' << g.edge_label[e] << '\n';
}

inline TannerGraph read_graph(std::istream& is) {
    TannerGraph g;
    if (!(is >> g.N >> g.M >> g.p >> g.seed))
        throw std::runtime_error("read_graph: malformed header");
    int n, m, k;
    while (is >> n >> m >> k) {
        if (n < 0 || n >= g.N || m < 0 || m >= g.M)
            throw std::runtime_error("read_graph: edge endpoint out of range");
        g.edge_var.push_back(n);
        g.edge_chk.push_back(m);
        g.edge_label.push_back(k);
    }
    g.rebuild_adjacency();
    return g;
}

}  // namespace nbldpc

#endif
