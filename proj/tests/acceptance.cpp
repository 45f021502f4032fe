#include "lcid/verification.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void print(const lcid::CriterionResult& r) {
    std::printf("%s  criterion %d  %-40s %7.2f s  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
}

// Runs every subcommand twice with one seed and compares the report bytes.
lcid::CriterionResult reproducibility() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / ("lcid_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path params = dir / "params.json";
    std::ofstream(params) << R"({"model": "apc_rw", "alpha": [-4, -3, -2], "beta0": [0.5, 0.3, 0.2],
      "beta1": [0.2, 0.3, 0.5], "mu0": 0.1, "mu1": -0.2, "sigma2_e0": 0.7, "sigma2_e1": 1.1,
      "sigma2_eps": 0.3, "dims": {"X": 2, "T": 7}, "init": {"c0": 0.2, "c1": -0.1}})";
    const fs::path lcParams = dir / "lc_params.json";
    std::ofstream(lcParams) << R"({"model": "ap_rw", "alpha": [-5, -4, -3, -2], "beta": [0.1, 0.2, 0.3, 0.4],
      "mu": -0.5, "sigma2_e": 0.4, "sigma2_eps": 0.01, "dims": {"X": 3, "T": 40}, "init": {"c": 0}})";
    const fs::path surface = dir / "surface.tsv";
    const std::string p = params.string();
    const std::string commands[] = {
        "moments --params " + p,
        "moments --params " + p + " --format csv",
        "simulate --params " + p,
        "mc-validate --params " + p + " --reps 2000",
        "fit --surface " + surface.string() + " --stage2 arima011",
        "demo distributional --reps 5000",
        "demo dynamic --params " + p,
        "identify check --params " + p + " --other " + p,
        "identify counterexample apc-example1",
        "identify recover --params " + p,
        "identify search --params " + p + " --starts 4 --max-evals 4000",
        "theorems --quick",
    };
    const std::string exe = LCID_CLI_PATH;
    {
        const std::string make = exe + " simulate --params " + lcParams.string() + " --seed 5 --out " + surface.string();
        if (std::system(make.c_str()) != 0) return {9, "reproducibility", false, "could not create a surface", 0.0};
    }
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const std::string& cmd : commands) {
        const fs::path a = dir / ("a" + std::to_string(i) + ".out");
        const fs::path b = dir / ("b" + std::to_string(i) + ".out");
        const std::string base = exe + " " + cmd + " --seed 123 --threads 0 --no-timestamp --out ";
        const int ca = std::system((base + a.string() + " 2>/dev/null").c_str());
        const int cb = std::system((base + b.string() + " 2>/dev/null").c_str());
        const bool same = ca == 0 && cb == 0 && slurp(a) == slurp(b) && !slurp(a).empty();
        if (!same) detail += "differs: " + cmd + "; ";
        ok = ok && same;
        ++i;
    }
    fs::remove_all(dir);
    if (ok) detail = std::to_string(i) + " commands byte-identical across repeated runs";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {9, "reproducibility", ok, detail, secs};
}

}  // namespace

int main() {
    lcid::VerificationOptions options;
    bool all = true;
    for (int id = 1; id <= lcid::kCriterionCount; ++id) {
        const lcid::CriterionResult r = lcid::run_criterion(id, options);
        print(r);
        all = all && r.passed;
    }
    const lcid::CriterionResult r9 = reproducibility();
    print(r9);
    all = all && r9.passed;
    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
