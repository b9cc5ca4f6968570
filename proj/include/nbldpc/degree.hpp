#ifndef NBLDPC_DEGREE_HPP
#define NBLDPC_DEGREE_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace nbldpc {

/// Edge-perspective degree distribution: coeffs[d] is the fraction of edges
/// attached to degree-d nodes, i.e. the coefficient of x^{d-1}.
struct DegreeDistribution {
    std::map<int, double> coeffs;

    double sum() const {
        double s = 0;
        for (auto& [d, c] : coeffs) s += c;
        return s;
    }
    int min_degree() const { return coeffs.empty() ? 0 : coeffs.begin()->first; }
    int max_degree() const { return coeffs.empty() ? 0 : coeffs.rbegin()->first; }

    /// Sum_d coeffs[d]/d; proportional to node count per edge.
    double inv_moment() const {
        double s = 0;
        for (auto& [d, c] : coeffs) s += c / d;
        return s;
    }

    /// Evaluates Sum_d coeffs[d] * x^{d-1}.
    double eval(double x) const {
        double s = 0;
        for (auto& [d, c] : coeffs) s += c * std::pow(x, d - 1);
        return s;
    }

    void validate(double tol = 1e-9) const {
        if (coeffs.empty()) throw std::invalid_argument("degree distribution: empty");
        for (auto& [d, c] : coeffs) {
            if (d < 1) throw std::invalid_argument("degree distribution: degree < 1");
            if (c < -1e-15) throw std::invalid_argument("degree distribution: negative weight");
        }
        if (std::abs(sum() - 1.0) > tol)
            throw std::invalid_argument("degree distribution: weights do not sum to 1");
    }
};

/// Row-weight profile of uniform random labels: a[i-1] = P(row weight = i),
/// d_m the average row weight.
struct RowWeightProfile {
    int p = 0;
    std::vector<double> a;  // a[0] = a_1, ..., a[p-1] = a_p
    double d_m = 0;
};

namespace detail {

inline double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace detail

/// a_i = C(p,i)/(q-1): the row (and column) weights of A^0..A^{q-2} enumerate
/// every nonzero length-p vector exactly once per row index.
inline RowWeightProfile uniform_label_profile(int p) {
    if (p < 1) throw std::invalid_argument("uniform_label_profile: p < 1");
    RowWeightProfile prof;
    prof.p = p;
    prof.a.resize(p);
    const double denom = std::pow(2.0, p) - 1.0;
    for (int i = 1; i <= p; ++i) prof.a[i - 1] = detail::binomial(p, i) / denom;
    for (int i = 1; i <= p; ++i) prof.d_m += i * prof.a[i - 1];
    return prof;
}

/// Coefficients b_{j,i} of (a_1 x + ... + a_p x^p)^i, j in [i, p*i].
/// Repeated convolution in extended precision, demoted at the boundary.
inline std::map<int, double> expand_weight_polynomial(const RowWeightProfile& profile, int i) {
    if (i < 1) throw std::invalid_argument("expand_weight_polynomial: i < 1");
    std::vector<long double> cur{1.0L};  // cur[t] = coefficient of x^t
    std::vector<long double> base(profile.a.begin(), profile.a.end());  // degrees 1..p
    for (int rep = 0; rep < i; ++rep) {
        std::vector<long double> nxt(cur.size() + base.size(), 0.0L);
        for (std::size_t u = 0; u < cur.size(); ++u) {
            if (cur[u] == 0.0L) continue;
            for (std::size_t v = 0; v < base.size(); ++v) nxt[u + v + 1] += cur[u] * base[v];
        }
        cur = std::move(nxt);
    }
    std::map<int, double> out;
    for (std::size_t t = 0; t < cur.size(); ++t)
        if (cur[t] != 0.0L) out[static_cast<int>(t)] = static_cast<double>(cur[t]);
    return out;
}

/// The q-ary to binary-image degree conversion:
///   hat{rho}_j = sum_i b_{j,i} j rho_i / i, normalized.
/// Applies to either side; the variable side uses the same profile since
/// column weights of the companion powers follow the same distribution.
inline DegreeDistribution convert_distribution(const DegreeDistribution& dist,
                                               const RowWeightProfile& profile) {
    dist.validate(1e-6);
    std::map<int, long double> acc;
    for (auto& [i, ci] : dist.coeffs) {
        if (ci == 0.0) continue;
        auto b = expand_weight_polynomial(profile, i);
        for (auto& [j, bji] : b) acc[j] += static_cast<long double>(bji) * j * ci / i;
    }
    long double total = 0;
    for (auto& [j, v] : acc) total += v;
    DegreeDistribution out;
    for (auto& [j, v] : acc) {
        double c = static_cast<double>(v / total);
        if (c > 0) out.coeffs[j] = c;
    }
    return out;
}

/// R = 1 - (sum_i rho_i/i) / (sum_i lambda_i/i).
inline double design_rate(const DegreeDistribution& lambda, const DegreeDistribution& rho) {
    lambda.validate(1e-6);
    rho.validate(1e-6);
    const double dl = lambda.inv_moment();
    if (dl <= 0) throw std::invalid_argument("design_rate: zero variable-side denominator");
    return 1.0 - rho.inv_moment() / dl;
}

}  // namespace nbldpc

#endif
