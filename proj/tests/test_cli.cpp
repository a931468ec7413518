#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncamgm/cli.hpp"
#include "ncamgm/ensemble.hpp"

using namespace ncamgm;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify at the equality point reports 1/27 on both sides") {
    const std::string out = "/tmp/ncamgm_cli_verify.json";
    const int code = run_cli({"verify", "--n", "3", "--m", "3", "--family", "near_uniform",
                              "--trials", "1", "--out", out});
    CHECK(code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["report_version"] == 1);
    REQUIRE(j["trials"].size() == 1);
    CHECK(std::abs(j["trials"][0]["lhs"].get<double>() - 1.0 / 27.0) <= 1e-12);
    CHECK(std::abs(j["trials"][0]["rhs"].get<double>() - 1.0 / 27.0) <= 1e-12);
    CHECK(j["violations"] == 0);
    std::remove(out.c_str());
}

TEST_CASE("verify rejects m > n with a usage exit code") {
    CHECK(run_cli({"verify", "--n", "2", "--m", "3"}) == 2);
}

TEST_CASE("unknown flags are rejected") {
    CHECK(run_cli({"verify", "--frobnicate", "1"}) == 2);
    CHECK(run_cli({"nonsense"}) == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("verify works from an ensemble file") {
    EnsembleSpec spec;
    spec.family = Family::wishart;
    spec.n = 3;
    spec.dim = 3;
    spec.seed = 1001;
    const std::string ens = "/tmp/ncamgm_cli_input.json";
    save_ensemble(generate(spec), ens);

    const std::string out = "/tmp/ncamgm_cli_file_verify.json";
    CHECK(run_cli({"verify", "--input", ens, "--m", "3", "--out", out}) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["trials"][0]["family"] == "file");
    std::remove(ens.c_str());
    std::remove(out.c_str());
}

TEST_CASE("variant subcommand at the equality point") {
    const std::string out = "/tmp/ncamgm_cli_variant.json";
    const int code = run_cli({"variant", "--n", "3", "--m", "3", "--family", "near_uniform",
                              "--trials", "1", "--out", out});
    CHECK(code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(std::abs(j["trials"][0]["margin"].get<double>()) <= 1e-13);
    std::remove(out.c_str());
}

TEST_CASE("prove-steps passes on seeded triples") {
    const std::string out = "/tmp/ncamgm_cli_prove.json";
    const int code = run_cli({"prove-steps", "--seed", "1", "--trials", "10", "--dim", "3",
                              "--out", out});
    CHECK(code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["all_hold"] == true);
    CHECK(j["scalar_bounds"]["ok"] == true);
    std::remove(out.c_str());
}

TEST_CASE("generalize passes for n = 6, n0 = 3") {
    const std::string out = "/tmp/ncamgm_cli_generalize.json";
    const int code = run_cli({"generalize", "--n", "6", "--n0", "3", "--m", "3", "--dim", "3",
                              "--seed", "5", "--trials", "2", "--out", out});
    CHECK(code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["all_pass"] == true);
    CHECK(j["k"] == 2);
    std::remove(out.c_str());
}

TEST_CASE("generalize rejects indivisible n") {
    CHECK(run_cli({"generalize", "--n", "7", "--n0", "3"}) == 2);
}

TEST_CASE("search CSV output is byte-identical across reruns") {
    const std::string out1 = "/tmp/ncamgm_cli_search1.csv";
    const std::string out2 = "/tmp/ncamgm_cli_search2.csv";
    const std::vector<std::string> args = {"search",   "--n",   "4",  "--m",      "3",
                                           "--dim",    "3",     "--trials", "30",
                                           "--seed",   "7",     "--family", "wishart,diagonal",
                                           "--format", "csv"};
    auto with_out = [&](const std::string& o) {
        std::vector<std::string> full = args;
        full.push_back("--out");
        full.push_back(o);
        return full;
    };
    CHECK(run_cli(with_out(out1)) == 0);
    CHECK(run_cli(with_out(out2)) == 0);
    const std::string a = slurp(out1);
    CHECK(a == slurp(out2));
    CHECK(a.rfind("trial,seed,family,n,m,dim,lhs,rhs,margin\n", 0) == 0);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("kaczmarz subcommand reports the paired comparison") {
    const std::string out = "/tmp/ncamgm_cli_kaczmarz.json";
    const int code = run_cli({"kaczmarz", "--rows", "30", "--cols", "6", "--epochs", "2",
                              "--trials", "20", "--seed", "3", "--out", out});
    CHECK(code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["median_without_replacement"].get<double>() <=
          j["median_with_replacement"].get<double>());
    std::remove(out.c_str());
}
