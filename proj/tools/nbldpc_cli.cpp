// Command-line front end: code design, analysis and simulation over the BEC.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible optimization
// input, 4 construction failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nbldpc/nbldpc.hpp"

using json = nlohmann::json;
using namespace nbldpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitConstruction = 4;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

json load_config(const std::string& path) {
    if (path.empty()) throw CliError(kExitConfig, "missing --config");
    std::ifstream in(path);
    if (!in) throw CliError(kExitConfig, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, std::string("config parse error: ") + e.what());
    }
    return j;
}

DegreeDistribution dist_from_json(const json& j, const std::string& key) {
    if (!j.contains(key)) throw CliError(kExitConfig, "config missing key: " + key);
    DegreeDistribution d;
    for (auto& [k, v] : j.at(key).items()) {
        int deg = 0;
        try {
            deg = std::stoi(k);
        } catch (...) {
            throw CliError(kExitConfig, "bad degree key in " + key + ": " + k);
        }
        d.coeffs[deg] = v.get<double>();
    }
    try {
        d.validate(1e-6);
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, key + ": " + e.what());
    }
    return d;
}

int get_p(const json& j) {
    if (!j.contains("p")) throw CliError(kExitConfig, "config missing key: p");
    int p = j.at("p").get<int>();
    if (p < 1 || p > 16) throw CliError(kExitConfig, "p outside [1,16]");
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(kExitConfig, "cannot open output file: " + path);
    return out;
}

json dist_to_json(const DegreeDistribution& d) {
    json j = json::object();
    for (auto& [deg, c] : d.coeffs) j[std::to_string(deg)] = c;
    return j;
}

int cmd_field_info(const json& cfg) {
    auto f = make_field(get_p(cfg));
    std::cout << "p " << f.p << "\nq " << f.q << "\nprimitive_poly 0x" << std::hex
              << f.primitive_poly << std::dec << "\ngenerator_rows";
    for (int r = 0; r < f.p; ++r) {
        std::cout << ' ';
        for (int c = 0; c < f.p; ++c) std::cout << (f.generator.get(r, c) ? '1' : '0');
    }
    auto prof = uniform_label_profile(f.p);
    std::cout << "\nrow_weight_profile";
    for (double a : prof.a) std::cout << ' ' << format_double(a);
    std::cout << "\nd_m " << format_double(prof.d_m) << '\n';
    return kExitOk;
}

int cmd_estimate_deg(const json& cfg, const std::string& out_path, bool empirical,
                     std::optional<std::uint64_t> seed_override) {
    const int p = get_p(cfg);
    auto prof = uniform_label_profile(p);
    std::ostringstream body;
    for (const char* side : {"lambda", "rho"}) {
        if (!cfg.contains(side)) continue;
        auto converted = convert_distribution(dist_from_json(cfg, side), prof);
        body << side << "_hat\n";
        write_distribution(body, converted);
    }
    if (body.str().empty()) throw CliError(kExitConfig, "config needs lambda and/or rho");

    if (empirical) {
        if (!cfg.contains("lambda") || !cfg.contains("rho") || !cfg.contains("np_bits"))
            throw CliError(kExitConfig, "--empirical needs lambda, rho and np_bits");
        long long np = cfg.at("np_bits").get<long long>();
        if (np <= 0 || np % p != 0)
            throw CliError(kExitConfig, "np_bits must be positive and divisible by p");
        int nseeds = cfg.value("empirical_seeds", 10);
        std::uint64_t seed = seed_override.value_or(cfg.value("seed", 1ull));
        std::vector<std::uint64_t> seeds;
        for (int s = 0; s < nseeds; ++s) seeds.push_back(derive_seed(seed, s));
        auto cmp = estimate_vs_empirical(dist_from_json(cfg, "lambda"), dist_from_json(cfg, "rho"),
                                         p, np, seeds);
        body << "degree,estimated,empirical\n";
        for (std::size_t i = 0; i < cmp.degrees.size(); ++i)
            body << cmp.degrees[i] << ',' << format_double(cmp.estimated[i]) << ','
                 << format_double(cmp.empirical[i]) << '\n';
        body << "linf_gap," << format_double(cmp.linf_gap) << ",\n";
    }
    if (!out_path.empty())
        open_out(out_path) << body.str();
    else
        std::cout << body.str();
    return kExitOk;
}

int cmd_construct(const json& cfg, const std::string& out_path,
                  std::optional<std::uint64_t> seed_override) {
    const int p = get_p(cfg);
    auto lambda = dist_from_json(cfg, "lambda");
    auto rho = dist_from_json(cfg, "rho");
    if (!cfg.contains("np_bits")) throw CliError(kExitConfig, "config missing key: np_bits");
    long long np = cfg.at("np_bits").get<long long>();
    if (np <= 0 || np % p != 0)
        throw CliError(kExitConfig, "np_bits must be positive and divisible by p");
    std::uint64_t seed = seed_override.value_or(cfg.value("seed", 1ull));
    auto field = make_field(p);
    TannerGraph g;
    try {
        g = sample_code(lambda, rho, np / p, derive_seed(seed, 1));
    } catch (const ConstructionError& e) {
        throw CliError(kExitConstruction, std::string("construction failed (seed ") +
                                              std::to_string(seed) + "): " + e.what());
    }
    g = assign_labels(std::move(g), field, derive_seed(seed, 2));
    g.seed = seed;
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_graph(out, g);
    } else {
        write_graph(std::cout, g);
    }
    return kExitOk;
}

int cmd_threshold(const json& cfg) {
    const int p = get_p(cfg);
    double tol = cfg.value("tol", 1e-4);
    double th = find_threshold(dist_from_json(cfg, "lambda"), dist_from_json(cfg, "rho"), p, tol);
    std::cout << "threshold " << format_double(th) << '\n';
    return kExitOk;
}

int cmd_de_run(const json& cfg, const std::string& out_path) {
    const int p = get_p(cfg);
    if (!cfg.contains("eps0")) throw CliError(kExitConfig, "config missing key: eps0");
    auto params = DEParams::from_symbol_distributions(
        dist_from_json(cfg, "lambda"), dist_from_json(cfg, "rho"), p, cfg.at("eps0").get<double>());
    double gamma0 = cfg.value("gamma0", -1.0);
    double tol = cfg.value("tol", 1e-10);
    int max_iter = cfg.value("max_iter", 5000);
    auto traj = run_de(params, gamma0, tol, max_iter);
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_de_csv(out, traj);
    } else {
        write_de_csv(std::cout, traj);
    }
    std::cerr << (traj.converged ? "converged" : "not converged") << ", fixed point "
              << format_double(traj.fixed_point) << '\n';
    return kExitOk;
}

int cmd_simulate(const json& cfg, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override) {
    SimConfig sc;
    sc.p = get_p(cfg);
    sc.lambda = dist_from_json(cfg, "lambda");
    sc.rho = dist_from_json(cfg, "rho");
    if (!cfg.contains("np_bits")) throw CliError(kExitConfig, "config missing key: np_bits");
    sc.np_bits = cfg.at("np_bits").get<long long>();
    if (!cfg.contains("eps0")) throw CliError(kExitConfig, "config missing key: eps0");
    if (cfg.at("eps0").is_array())
        sc.eps0_list = cfg.at("eps0").get<std::vector<double>>();
    else
        sc.eps0_list = {cfg.at("eps0").get<double>()};
    sc.trials = cfg.value("trials", 1);
    sc.max_iter = cfg.value("max_iter", 60);
    sc.seed = seed_override.value_or(cfg.value("seed", 1ull));
    sc.fresh_graph_per_trial = cfg.value("fresh_graph_per_trial", true);
    sc.threads = cfg.value("threads", 1);
    std::string dec = cfg.value("decoder", "hybrid");
    if (dec == "hybrid")
        sc.decoder = DecoderKind::Hybrid;
    else if (dec == "no_inverse")
        sc.decoder = DecoderKind::NoInverse;
    else if (dec == "binary")
        sc.decoder = DecoderKind::Binary;
    else if (dec == "ml")
        sc.decoder = DecoderKind::Ml;
    else
        throw CliError(kExitConfig, "unknown decoder: " + dec);
    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, e.what());
    }
    SimReport report;
    try {
        report = run_campaign(sc);
    } catch (const ConstructionError& e) {
        throw CliError(kExitConstruction, e.what());
    }
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_sim_csv(out, report);
    } else {
        write_sim_csv(std::cout, report);
    }
    return kExitOk;
}

int cmd_design(const json& cfg, const std::string& out_path,
               std::optional<std::uint64_t> seed_override) {
    OptimizationProblem prob;
    prob.p = get_p(cfg);
    prob.anchor_lambda = dist_from_json(cfg, "anchor_lambda");
    prob.anchor_rho = dist_from_json(cfg, "anchor_rho");
    prob.r0 = cfg.value("r0", 0.5);
    prob.eps0 = cfg.value("eps0", 0.3);
    if (!cfg.contains("gamma0") || !cfg.contains("gammaL"))
        throw CliError(kExitConfig, "config missing gamma0/gammaL");
    prob.gamma0 = cfg.at("gamma0").get<double>();
    prob.gammaL = cfg.at("gammaL").get<double>();
    prob.zeta1 = cfg.value("zeta1", 0.05);
    prob.zeta2 = cfg.value("zeta2", 0.05);
    if (!cfg.contains("np_bits")) throw CliError(kExitConfig, "config missing key: np_bits");
    long long np = cfg.at("np_bits").get<long long>();
    if (np <= 0 || np % prob.p != 0)
        throw CliError(kExitConfig, "np_bits must be positive and divisible by p");
    prob.N = np / prob.p;
    prob.budget = cfg.value("budget", 50);
    prob.inner_proposals = cfg.value("inner_proposals", 600);
    prob.seed = seed_override.value_or(cfg.value("seed", 1ull));
    if (cfg.contains("lambda_support"))
        prob.lambda_support = cfg.at("lambda_support").get<std::vector<int>>();
    if (cfg.contains("rho_support"))
        prob.rho_support = cfg.at("rho_support").get<std::vector<int>>();

    OptimizationResult res;
    try {
        prob.validate();
        res = optimize(prob);
    } catch (const InfeasibleError& e) {
        throw CliError(kExitInfeasible, e.what());
    } catch (const std::invalid_argument& e) {
        throw CliError(kExitConfig, e.what());
    }

    auto final_params = DEParams::from_symbol_distributions(res.lambda_star, res.rho_star,
                                                            prob.p, prob.eps0);
    if (iteration_count(final_params, prob.gamma0, prob.gammaL).clamped)
        std::cerr << "warning: iteration-count integrand clamped near a stall; L unreliable\n";

    const double seg_eps = symbol_to_bit(prob.gamma0, prob.p);
    const double numer =
        (std::pow(1.0 - prob.gammaL, 1.0 / prob.p) - (1.0 - seg_eps)) * prob.N * prob.p;
    std::ostringstream csv;
    csv << "outer_iter,g,L,feasible\n";
    for (auto& [it, g] : res.history)
        csv << it << ',' << format_double(g) << ',' << format_double(numer / g) << ",1\n";
    if (!out_path.empty())
        open_out(out_path) << csv.str();
    else
        std::cout << csv.str();

    json summary;
    summary["lambda_star"] = dist_to_json(res.lambda_star);
    summary["rho_star"] = dist_to_json(res.rho_star);
    summary["g_star"] = res.g_star;
    summary["L_star"] = res.L_star;
    summary["threshold"] = res.threshold;
    std::cout << summary.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-binary LDPC toolkit for the binary erasure channel"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--out/--seed may follow the subcommand

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON configuration file")->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "override the config seed");

    auto* c_field = app.add_subcommand("field-info", "print GF(2^p) parameters");
    int field_p = 0;
    c_field->add_option("--p", field_p, "extension degree (alternative to --config)");
    auto* c_est = app.add_subcommand("estimate-deg", "binary-image degree conversion");
    bool empirical = false;
    c_est->add_flag("--empirical", empirical, "also sample graphs and compare");
    auto* c_con = app.add_subcommand("construct", "sample and label a Tanner graph");
    auto* c_thr = app.add_subcommand("threshold", "density-evolution threshold");
    auto* c_de = app.add_subcommand("de-run", "density-evolution trajectory");
    auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo decoding campaign");
    auto* c_des = app.add_subcommand("design", "convergence-optimized degree distributions");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) seed = seed_raw;

    try {
        json cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (*c_field) {
            if (field_p > 0) cfg["p"] = field_p;
            return cmd_field_info(cfg);
        }
        if (*c_est) return cmd_estimate_deg(cfg, out_path, empirical, seed);
        if (*c_con) return cmd_construct(cfg, out_path, seed);
        if (*c_thr) return cmd_threshold(cfg);
        if (*c_de) return cmd_de_run(cfg, out_path);
        if (*c_sim) return cmd_simulate(cfg, out_path, seed);
        if (*c_des) return cmd_design(cfg, out_path, seed);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
