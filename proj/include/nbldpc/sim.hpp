#ifndef NBLDPC_SIM_HPP
#define NBLDPC_SIM_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "nbldpc/de.hpp"
#include "nbldpc/decode.hpp"
#include "nbldpc/degree.hpp"
#include "nbldpc/graph.hpp"
#include "nbldpc/rng.hpp"

namespace nbldpc {

/// BEC realization on the all-zero codeword: each bit is erased independently
/// with probability eps0, known bits carry value 0. Deterministic per seed.
inline ErasurePattern transmit_bec(long long bit_count, double eps0, std::uint64_t seed) {
    if (eps0 < 0.0 || eps0 > 1.0) throw std::invalid_argument("transmit_bec: eps0 outside [0,1]");
    ErasurePattern pat;
    pat.bit_states.assign(bit_count, BitState::Known0);
    Rng rng(derive_seed(seed, 0x62656331));
    for (long long b = 0; b < bit_count; ++b)
        if (rng.uniform() < eps0) {
            pat.bit_states[b] = BitState::Erased;
            ++pat.erased_count;
        }
    return pat;
}

enum class DecoderKind { Hybrid, NoInverse, Binary, Ml };

inline const char* decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::Hybrid: return "hybrid";
        case DecoderKind::NoInverse: return "no_inverse";
        case DecoderKind::Binary: return "binary";
        case DecoderKind::Ml: return "ml";
    }
    return "?";
}

struct SimConfig {
    int p = 1;
    DegreeDistribution lambda;
    DegreeDistribution rho;
    long long np_bits = 0;           // block length in bits; divisible by p
    std::vector<double> eps0_list;
    int trials = 1;
    int max_iter = 60;
    DecoderKind decoder = DecoderKind::Hybrid;
    std::uint64_t seed = 1;
    bool fresh_graph_per_trial = true;
    int threads = 1;

    long long symbols() const { return np_bits / p; }

    void validate() const {
        lambda.validate(1e-6);
        rho.validate(1e-6);
        if (trials < 1) throw std::invalid_argument("config: trials < 1");
        if (np_bits <= 0 || np_bits % p != 0)
            throw std::invalid_argument("config: np_bits must be positive and divisible by p");
        if (decoder == DecoderKind::Binary && p != 1)
            throw std::invalid_argument("config: binary decoder requires p = 1");
        if (eps0_list.empty()) throw std::invalid_argument("config: empty eps0 list");
        for (double e : eps0_list)
            if (e < 0 || e > 1) throw std::invalid_argument("config: eps0 outside [0,1]");
    }
};

struct SimRow {
    double eps0 = 0;
    int trials = 0;
    double ber = 0;            // unrecovered erased bits / total bits
    double ser = 0;            // unrecovered symbols / N
    double success_rate = 0;
    double mean_iters = 0;
    double mean_ops_per_iter = 0;
    double ci95_ber = 0;
};

struct SimReport {
    std::vector<SimRow> rows;  // sorted by eps0
};

namespace detail {

struct TrialStats {
    double ber = 0, ser = 0, success = 0, iters = 0, ops_per_iter = 0;
};

inline TrialStats run_trial(const SimConfig& cfg, const FieldParams& field,
                            const BinaryImageGraph* fixed, std::size_t eps_index,
                            int trial) {
    const double eps0 = cfg.eps0_list[eps_index];
    const std::uint64_t trial_tag =
        derive_seed(cfg.seed, (static_cast<std::uint64_t>(eps_index) << 32) | static_cast<std::uint32_t>(trial));
    BinaryImageGraph local;
    const BinaryImageGraph* big = fixed;
    if (!fixed) {
        auto graph = sample_code(cfg.lambda, cfg.rho, cfg.symbols(), derive_seed(trial_tag, 1));
        graph = assign_labels(std::move(graph), field, derive_seed(trial_tag, 2));
        local = expand_binary(graph, field);
        big = &local;
    }
    auto pattern = transmit_bec(big->bit_count, eps0, derive_seed(trial_tag, 3));
    DecodeResult res;
    switch (cfg.decoder) {
        case DecoderKind::Hybrid:
        case DecoderKind::Binary:
            res = decode_hybrid(*big, field, pattern, cfg.max_iter);
            break;
        case DecoderKind::NoInverse:
            res = decode_no_inverse(*big, field, pattern, cfg.max_iter);
            break;
        case DecoderKind::Ml:
            res = decode_ml_oracle(*big, pattern);
            break;
    }
    TrialStats st;
    long long unrecovered = pattern.erased_count - res.recovered_bits;
    st.ber = static_cast<double>(unrecovered) / static_cast<double>(big->bit_count);
    st.ser = static_cast<double>(res.unrecovered_symbols) / static_cast<double>(big->graph.N);
    st.success = res.success ? 1.0 : 0.0;
    st.iters = res.iterations_used;
    st.ops_per_iter = res.iterations_used > 0
                          ? static_cast<double>(res.recovered_bits) / res.iterations_used
                          : 0.0;
    return st;
}

}  // namespace detail

/// Monte-Carlo campaign over the eps0 grid. Per-trial RNG streams derive from
/// (seed, eps0 index, trial), so the aggregate is independent of execution
/// order; trials may run on several threads.
inline SimReport run_campaign(const SimConfig& cfg) {
    cfg.validate();
    auto field = make_field(cfg.p);

    BinaryImageGraph fixed;
    bool have_fixed = !cfg.fresh_graph_per_trial;
    if (have_fixed) {
        auto graph = sample_code(cfg.lambda, cfg.rho, cfg.symbols(), derive_seed(cfg.seed, 1));
        graph = assign_labels(std::move(graph), field, derive_seed(cfg.seed, 2));
        fixed = expand_binary(graph, field);
    }

    std::vector<double> grid = cfg.eps0_list;
    std::sort(grid.begin(), grid.end());
    SimConfig sorted_cfg = cfg;
    sorted_cfg.eps0_list = grid;

    SimReport report;
    for (std::size_t ei = 0; ei < grid.size(); ++ei) {
        std::vector<detail::TrialStats> stats(cfg.trials);
        const int nthreads = std::max(1, cfg.threads);
        if (nthreads == 1) {
            for (int t = 0; t < cfg.trials; ++t)
                stats[t] = detail::run_trial(sorted_cfg, field, have_fixed ? &fixed : nullptr, ei, t);
        } else {
            std::vector<std::thread> pool;
            std::atomic<int> next{0};
            for (int w = 0; w < nthreads; ++w)
                pool.emplace_back([&] {
                    for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1))
                        stats[t] =
                            detail::run_trial(sorted_cfg, field, have_fixed ? &fixed : nullptr, ei, t);
                });
            for (auto& th : pool) th.join();
        }
        SimRow row;
        row.eps0 = grid[ei];
        row.trials = cfg.trials;
        double var_acc = 0;
        for (auto& st : stats) {
            row.ber += st.ber;
            row.ser += st.ser;
            row.success_rate += st.success;
            row.mean_iters += st.iters;
            row.mean_ops_per_iter += st.ops_per_iter;
        }
        const double n = cfg.trials;
        row.ber /= n;
        row.ser /= n;
        row.success_rate /= n;
        row.mean_iters /= n;
        row.mean_ops_per_iter /= n;
        for (auto& st : stats) var_acc += (st.ber - row.ber) * (st.ber - row.ber);
        if (cfg.trials > 1) row.ci95_ber = 1.96 * std::sqrt(var_acc / (n - 1) / n);
        report.rows.push_back(row);
    }
    return report;
}

/// Per-sweep unrecovered-bit fractions of the hybrid decoder, averaged over
/// seeds; index l is the fraction after l sweeps. Used to cross-check the
/// density-evolution trajectory, hence the synchronous schedule.
inline std::vector<double> simulate_bit_erasure_trajectory(
    const DegreeDistribution& lambda, const DegreeDistribution& rho, int p, long long np_bits,
    double eps0, int iterations, const std::vector<std::uint64_t>& seeds,
    Schedule schedule = Schedule::Synchronous) {
    auto field = make_field(p);
    std::vector<double> acc(iterations + 1, 0.0);
    for (std::uint64_t seed : seeds) {
        auto graph = sample_code(lambda, rho, np_bits / p, derive_seed(seed, 11));
        graph = assign_labels(std::move(graph), field, derive_seed(seed, 12));
        auto big = expand_binary(graph, field);
        auto pattern = transmit_bec(big.bit_count, eps0, derive_seed(seed, 13));
        auto res = decode_hybrid(big, field, pattern, iterations, schedule);
        double remaining = static_cast<double>(pattern.erased_count);
        acc[0] += remaining / static_cast<double>(big.bit_count);
        std::size_t l = 1;
        for (; l <= static_cast<std::size_t>(iterations); ++l) {
            if (l <= res.ops_per_iteration.size()) remaining -= res.ops_per_iteration[l - 1];
            acc[l] += remaining / static_cast<double>(big.bit_count);
        }
    }
    for (auto& v : acc) v /= static_cast<double>(seeds.size());
    return acc;
}

struct DegreeComparison {
    std::vector<int> degrees;
    std::vector<double> estimated;
    std::vector<double> empirical;  // mean over seeds
    double linf_gap = 0;
};

/// Degree-conversion estimate vs the empirical binary-image distribution of sampled
/// graphs (variable side), averaged over seeds.
inline DegreeComparison estimate_vs_empirical(const DegreeDistribution& lambda,
                                              const DegreeDistribution& rho, int p,
                                              long long np_bits,
                                              const std::vector<std::uint64_t>& seeds) {
    auto field = make_field(p);
    auto prof = uniform_label_profile(p);
    auto est = convert_distribution(lambda, prof);
    std::map<int, double> emp_acc;
    for (std::uint64_t seed : seeds) {
        auto graph = sample_code(lambda, rho, np_bits / p, derive_seed(seed, 21));
        graph = assign_labels(std::move(graph), field, derive_seed(seed, 22));
        auto big = expand_binary(graph, field);
        auto [lemp, remp] = empirical_binary_degrees(big);
        for (auto& [d, c] : lemp.coeffs) emp_acc[d] += c;
    }
    for (auto& [d, c] : emp_acc) c /= static_cast<double>(seeds.size());

    DegreeComparison cmp;
    std::set<int> degs;
    for (auto& [d, c] : est.coeffs) degs.insert(d);
    for (auto& [d, c] : emp_acc) degs.insert(d);
    for (int d : degs) {
        double e = est.coeffs.count(d) ? est.coeffs.at(d) : 0.0;
        double m = emp_acc.count(d) ? emp_acc.at(d) : 0.0;
        cmp.degrees.push_back(d);
        cmp.estimated.push_back(e);
        cmp.empirical.push_back(m);
        cmp.linf_gap = std::max(cmp.linf_gap, std::abs(e - m));
    }
    return cmp;
}

// ---- text formats ----

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Degree distribution as a text map: one "degree coefficient" line each.
inline void write_distribution(std::ostream& os, const DegreeDistribution& d) {
    for (auto& [deg, c] : d.coeffs) os << deg << ' ' << format_double(c) << '\n';
}

inline DegreeDistribution read_distribution(std::istream& is) {
    DegreeDistribution d;
    int deg;
    double c;
    while (is >> deg >> c) d.coeffs[deg] = c;
    return d;
}

inline void write_sim_csv(std::ostream& os, const SimReport& report) {
    os << "eps0,trials,ber,ser,success_rate,mean_iters,mean_ops_per_iter,ci95_ber\n";
    for (auto& r : report.rows) {
        os << format_double(r.eps0) << ',' << r.trials << ',' << format_double(r.ber) << ','
           << format_double(r.ser) << ',' << format_double(r.success_rate) << ','
           << format_double(r.mean_iters) << ',' << format_double(r.mean_ops_per_iter) << ','
           << format_double(r.ci95_ber) << '\n';
    }
}

inline void write_de_csv(std::ostream& os, const DETrajectory& traj) {
    os << "iter,gamma,bit_eps\n";
    for (std::size_t l = 0; l < traj.sym_gamma.size(); ++l)
        os << l << ',' << format_double(traj.sym_gamma[l]) << ','
           << format_double(traj.bit_eps[l]) << '\n';
}

}  // namespace nbldpc

#endif
