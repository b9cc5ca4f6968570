#ifndef NBLDPC_DESIGN_HPP
#define NBLDPC_DESIGN_HPP

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "nbldpc/de.hpp"
#include "nbldpc/degree.hpp"
#include "nbldpc/rng.hpp"

namespace nbldpc {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Convergence-optimization instance: maximize graph operations per
/// iteration over (lambda, rho) near trust-region anchors.
struct OptimizationProblem {
    DegreeDistribution anchor_lambda, anchor_rho;
    double r0 = 0.5;            // minimum design rate
    double eps0 = 0.3;          // channel erasure probability in the recursion
    double gamma0 = 0.0;        // symbol-domain trajectory endpoints
    double gammaL = 0.0;
    double zeta1 = 0.05, zeta2 = 0.05;  // trust-region radii (L-inf)
    long long N = 0;            // symbols; Np = N*p bits
    int p = 1;
    std::vector<int> lambda_support;  // defaults: anchor support plus 2..16
    std::vector<int> rho_support;     // defaults: anchor support +/- 1
    int budget = 50;            // outer re-anchoring rounds
    int inner_proposals = 600;  // proposals per outer round
    int contraction_grid = 500;
    std::uint64_t seed = 1;

    void validate() const {
        anchor_lambda.validate(1e-6);
        anchor_rho.validate(1e-6);
        if (!(r0 > 0 && r0 < 1)) throw std::invalid_argument("problem: R0 outside (0,1)");
        if (!(zeta1 > 0 && zeta1 <= 0.2) || !(zeta2 > 0 && zeta2 <= 0.2))
            throw std::invalid_argument("problem: zeta outside (0, 0.2]");
        if (!(gammaL > 0 && gammaL < gamma0))
            throw std::invalid_argument("problem: need 0 < gammaL < gamma0");
        if (N <= 0) throw std::invalid_argument("problem: N must be positive");
    }

    std::vector<int> effective_lambda_support() const {
        if (!lambda_support.empty()) return lambda_support;
        std::set<int> s;
        for (auto& [d, c] : anchor_lambda.coeffs) s.insert(d);
        for (int d = 2; d <= 16; ++d) s.insert(d);
        return {s.begin(), s.end()};
    }
    std::vector<int> effective_rho_support() const {
        if (!rho_support.empty()) return rho_support;
        std::set<int> s;
        for (auto& [d, c] : anchor_rho.coeffs) {
            if (d - 1 >= 2) s.insert(d - 1);
            s.insert(d);
            s.insert(d + 1);
        }
        return {s.begin(), s.end()};
    }
};

struct OptimizationResult {
    DegreeDistribution lambda_star, rho_star;
    double g_star = 0;
    double L_star = 0;
    double threshold = 0;
    std::vector<std::pair<int, double>> history;  // (outer iteration, objective)
};

namespace detail {

inline double rate_lhs(const DegreeDistribution& d) { return d.inv_moment(); }

inline bool within_trust(const DegreeDistribution& x, const DegreeDistribution& anchor,
                         double zeta) {
    std::set<int> degs;
    for (auto& [d, c] : x.coeffs) degs.insert(d);
    for (auto& [d, c] : anchor.coeffs) degs.insert(d);
    for (int d : degs) {
        double a = x.coeffs.count(d) ? x.coeffs.at(d) : 0.0;
        double b = anchor.coeffs.count(d) ? anchor.coeffs.at(d) : 0.0;
        if (std::abs(a - b) >= zeta) return false;
    }
    return true;
}

}  // namespace detail

/// Checks nonnegativity, normalization, the rate constraint
/// sum(lambda_i/i) >= sum(rho_i/i)/(1-R0), the trust region against the
/// problem anchors, and the contraction f(gamma) < gamma on a log grid over
/// [gammaL, gamma0].
inline bool feasible(const DegreeDistribution& lambda, const DegreeDistribution& rho,
                     const OptimizationProblem& prob) {
    for (auto& [d, c] : lambda.coeffs)
        if (c < -1e-12) return false;
    for (auto& [d, c] : rho.coeffs)
        if (c < -1e-12) return false;
    if (std::abs(lambda.sum() - 1.0) > 1e-9 || std::abs(rho.sum() - 1.0) > 1e-9) return false;
    if (detail::rate_lhs(lambda) < detail::rate_lhs(rho) / (1.0 - prob.r0) - 1e-12) return false;
    if (!detail::within_trust(lambda, prob.anchor_lambda, prob.zeta1)) return false;
    if (!detail::within_trust(rho, prob.anchor_rho, prob.zeta2)) return false;

    auto params = DEParams::from_symbol_distributions(lambda, rho, prob.p, prob.eps0);
    const double lg0 = std::log(prob.gamma0), lgL = std::log(prob.gammaL);
    for (int i = 0; i < prob.contraction_grid; ++i) {
        double t = static_cast<double>(i) / (prob.contraction_grid - 1);
        double g = std::exp(lgL + t * (lg0 - lgL));
        if (symbol_step(g, params) >= g) return false;
    }
    return true;
}

/// Objective g: recovered bits per iteration over [gammaL, gamma0], computed
/// through the iteration-count integral. The numerator uses the bit erasure
/// probability at the segment start, so g * L is invariant in (lambda, rho).
inline double objective(const DegreeDistribution& lambda, const DegreeDistribution& rho,
                         const OptimizationProblem& prob, double* L_out = nullptr) {
    auto params = DEParams::from_symbol_distributions(lambda, rho, prob.p, prob.eps0);
    IterationCountResult ic;
    try {
        ic = iteration_count(params, prob.gamma0, prob.gammaL);
    } catch (const std::domain_error& e) {
        throw InfeasibleError(e.what());
    }
    if (L_out) *L_out = ic.L;
    const double seg_eps = symbol_to_bit(prob.gamma0, prob.p);
    return ops_per_iteration(prob.gammaL, seg_eps, prob.N, prob.p, ic.L);
}

/// Trust-region local search with randomized pairwise mass transfers
/// (simplex-exact) plus compound lambda+rho moves, re-anchoring on the
/// incumbent after every round. Accepts strictly improving feasible moves
/// only, so the history is nondecreasing and every entry feasible.
inline OptimizationResult optimize(OptimizationProblem prob) {
    prob.validate();
    if (!feasible(prob.anchor_lambda, prob.anchor_rho, prob))
        throw InfeasibleError("optimize: anchor distributions infeasible");

    auto lam_supp = prob.effective_lambda_support();
    auto rho_supp = prob.effective_rho_support();

    DegreeDistribution lam = prob.anchor_lambda, rho = prob.anchor_rho;
    for (int d : lam_supp) lam.coeffs.try_emplace(d, 0.0);
    for (int d : rho_supp) rho.coeffs.try_emplace(d, 0.0);

    OptimizationResult res;
    double L_best = 0;
    double g_best = objective(lam, rho, prob, &L_best);
    res.history.push_back({0, g_best});

    Rng rng(derive_seed(prob.seed, 0x6f707431));

    auto propose_transfer = [&](const DegreeDistribution& cur, const DegreeDistribution& anchor,
                                const std::vector<int>& supp, double zeta,
                                double scale) -> DegreeDistribution {
        DegreeDistribution out = cur;
        int d1 = supp[rng.below(supp.size())];
        int d2 = supp[rng.below(supp.size())];
        if (d1 == d2) return out;
        double a1 = anchor.coeffs.count(d1) ? anchor.coeffs.at(d1) : 0.0;
        double a2 = anchor.coeffs.count(d2) ? anchor.coeffs.at(d2) : 0.0;
        // exact L-inf projection: never leave the trust region or the simplex
        double room = std::min(out.coeffs.at(d1) - std::max(0.0, a1 - zeta + 1e-12),
                               std::max(0.0, a2 + zeta - 1e-12 - out.coeffs.at(d2)));
        if (room <= 0) return out;
        double delta = room * scale;
        out.coeffs.at(d1) -= delta;
        out.coeffs.at(d2) += delta;
        return out;
    };

    for (int outer = 1; outer <= prob.budget; ++outer) {
        bool improved_this_round = false;
        for (int t = 0; t < prob.inner_proposals; ++t) {
            double scale = rng.uniform();
            double kind = rng.uniform();
            DegreeDistribution lam2 = lam, rho2 = rho;
            if (kind < 0.4) {
                lam2 = propose_transfer(lam, prob.anchor_lambda, lam_supp, prob.zeta1, scale);
            } else if (kind < 0.7) {
                rho2 = propose_transfer(rho, prob.anchor_rho, rho_supp, prob.zeta2, scale);
            } else {
                lam2 = propose_transfer(lam, prob.anchor_lambda, lam_supp, prob.zeta1, scale);
                rho2 = propose_transfer(rho, prob.anchor_rho, rho_supp, prob.zeta2, rng.uniform());
            }
            if (!feasible(lam2, rho2, prob)) continue;
            double L2 = 0, g2;
            try {
                g2 = objective(lam2, rho2, prob, &L2);
            } catch (const InfeasibleError&) {
                continue;
            }
            if (g2 > g_best * (1.0 + 1e-12)) {  // ties keep the incumbent
                g_best = g2;
                L_best = L2;
                lam = std::move(lam2);
                rho = std::move(rho2);
                improved_this_round = true;
            }
        }
        prob.anchor_lambda = lam;  // re-anchor on the incumbent
        prob.anchor_rho = rho;
        res.history.push_back({outer, g_best});
        if (!improved_this_round && outer > 2) {
            // converged inner search twice in a row under a fresh anchor
            bool prev_flat = res.history.size() >= 3 &&
                             res.history[res.history.size() - 2].second == g_best;
            if (prev_flat) break;
        }
    }

    // drop zero-padding before returning
    for (auto it = lam.coeffs.begin(); it != lam.coeffs.end();)
        it = it->second <= 0.0 ? lam.coeffs.erase(it) : std::next(it);
    for (auto it = rho.coeffs.begin(); it != rho.coeffs.end();)
        it = it->second <= 0.0 ? rho.coeffs.erase(it) : std::next(it);

    res.lambda_star = lam;
    res.rho_star = rho;
    res.g_star = g_best;
    res.L_star = L_best;
    res.threshold = find_threshold(lam, rho, prob.p, 1e-4);
    return res;
}

}  // namespace nbldpc

#endif
