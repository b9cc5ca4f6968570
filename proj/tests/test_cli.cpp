// Exercises the command-line contract: exit codes, output schemas.
// The binary path comes from the NBLDPC_CLI environment variable.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
    const char* p = std::getenv("NBLDPC_CLI");
    return p ? p : "";
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string dir = "test_cli_tmp";
    std::system(("mkdir -p " + dir).c_str());
    std::string out_file = dir + "/stdout.txt";
    int rc = std::system((cli_path() + " " + args + " >" + out_file + " 2>/dev/null").c_str());
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

void write_file(const std::string& name, const std::string& text) {
    std::system("mkdir -p test_cli_tmp");
    std::ofstream("test_cli_tmp/" + name) << text;
}

}  // namespace

TEST_CASE("command line contract") {
    if (cli_path().empty()) {
        SKIP("NBLDPC_CLI not set");
    }

    SECTION("field-info succeeds with --p") {
        auto r = run("field-info --p 4");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("q 16") != std::string::npos);
    }

    SECTION("missing config is a configuration error (exit 2)") {
        CHECK(run("threshold").exit_code == 2);
        CHECK(run("simulate").exit_code == 2);
    }

    SECTION("malformed distribution is a configuration error (exit 2)") {
        write_file("bad.json", R"({"p":2,"lambda":{"2":0.9},"rho":{"4":1.0}})");
        CHECK(run("threshold --config test_cli_tmp/bad.json").exit_code == 2);
    }

    SECTION("infeasible design anchor exits 3") {
        // published convergence-optimized coefficients: design rate 0.4897 < R0
        write_file("infeasible.json",
                   R"({"p":3,"anchor_lambda":{"2":0.45,"3":0.18,"4":0.15,"6":0.03,"9":0.08,)"
                   R"("14":0.11},"anchor_rho":{"5":0.27,"6":0.73},"r0":0.5,"eps0":0.3,)"
                   R"("gamma0":0.002997,"gammaL":3e-7,"np_bits":9999,"budget":1})");
        CHECK(run("design --config test_cli_tmp/infeasible.json").exit_code == 3);
    }

    SECTION("impossible socket matching exits 4") {
        // one degree-2 variable against one degree-2 check forces a parallel edge
        write_file("impossible.json",
                   R"({"p":1,"lambda":{"2":1.0},"rho":{"2":1.0},"np_bits":1,"seed":1})");
        CHECK(run("construct --config test_cli_tmp/impossible.json").exit_code == 4);
    }

    SECTION("simulate emits the documented CSV header") {
        write_file("sim.json",
                   R"({"p":1,"lambda":{"2":1.0},"rho":{"4":1.0},"np_bits":1000,)"
                   R"("eps0":0.2,"trials":2,"seed":3})");
        auto r = run("simulate --config test_cli_tmp/sim.json");
        CHECK(r.exit_code == 0);
        CHECK(r.out.rfind("eps0,trials,ber,ser,success_rate,mean_iters,mean_ops_per_iter,ci95_ber",
                          0) == 0);
    }

    SECTION("de-run emits the documented CSV header") {
        write_file("de.json",
                   R"({"p":1,"lambda":{"2":1.0},"rho":{"4":1.0},"eps0":0.25})");
        auto r = run("de-run --config test_cli_tmp/de.json");
        CHECK(r.exit_code == 0);
        CHECK(r.out.rfind("iter,gamma,bit_eps", 0) == 0);
    }

    std::system("rm -rf test_cli_tmp");
}
