// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned in code next to the check it gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ncamgm/conjecture.hpp"
#include "ncamgm/ensemble.hpp"
#include "ncamgm/explorer.hpp"
#include "ncamgm/kaczmarz.hpp"
#include "ncamgm/proofsteps.hpp"
#include "ncamgm/symsum.hpp"
#include "oracles.hpp"

using namespace ncamgm;
namespace oracle = ncamgm::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

const Family kAllFamilies[] = {Family::wishart, Family::diagonal, Family::projection_jitter,
                               Family::near_uniform, Family::scalar};

EnsembleSpec cycled_spec(int trial, int n, int max_dim, std::uint64_t seed_base) {
    EnsembleSpec spec;
    spec.family = kAllFamilies[trial % 5];
    spec.n = n;
    spec.dim = spec.family == Family::scalar ? 1 : 1 + (trial % max_dim);
    spec.seed = seed_base + static_cast<std::uint64_t>(trial);
    spec.jitter = 0.05;
    return spec;
}

// 1. fast == brute over 200 seeded ensembles, n <= 7, m in {2,3,4}, d <= 5.
Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 6;             // 2..7
        const int m = 2 + trial % 3;             // 2..4
        EnsembleSpec spec = cycled_spec(trial, n, 5, 11000);
        const Ensemble e = generate(spec);
        const SymMatrix fast = distinct_tuple_sum(e, m, SumMode::fast).value;
        const SymMatrix brute = distinct_tuple_sum(e, m, SumMode::brute).value;
        worst = std::max(worst, oracle::rel_diff(fast, brute));
        ++checked;
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst <= 1e-11 && elapsed < 30.0;
    return {pass, "max rel err " + fmt(worst) + " over " + std::to_string(checked) +
                      " ensembles, " + fmt(elapsed) + " s"};
}

// 2. Theorem cases m=3, n in {3,6,9}: margins and Loewner certificates.
Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_margin_ratio = 0.0;  // most negative margin / max(1, lhs)
    double worst_eig = 0.0;
    for (int n : {3, 6, 9}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const EnsembleSpec spec = cycled_spec(trial, n, 6, 21000 + 1000 * n);
            const Ensemble e = generate(spec);
            const ConjectureReport rep = check_conjecture(e, 3);
            worst_margin_ratio =
                std::min(worst_margin_ratio, rep.margin / std::max(1.0, rep.lhs));
            const LoewnerFormReport lf = check_loewner_form(e, 3, 1e-8);
            worst_eig = std::min({worst_eig, lf.upper_cert.min_eig, lf.lower_cert.min_eig});
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_margin_ratio >= -1e-8 && worst_eig >= -1e-8 && elapsed < 120.0;
    return {pass, "worst margin ratio " + fmt(worst_margin_ratio) + ", worst cert eig " +
                      fmt(worst_eig) + ", " + fmt(elapsed) + " s"};
}

// 3. Equality tightness at the uniform triple.
Outcome criterion3() {
    std::vector<SymMatrix> members;
    for (int i = 0; i < 3; ++i) {
        SymMatrix m(3);
        for (int k = 0; k < 3; ++k) m.set(k, k, 1.0 / 3.0);
        members.push_back(m);
    }
    const ConjectureReport rep = check_conjecture(Ensemble(members), 3);
    const double err =
        std::max(std::abs(rep.lhs - 1.0 / 27.0), std::abs(rep.rhs - 1.0 / 27.0));
    return {err <= 1e-12, "lhs/rhs deviation from 1/27: " + fmt(err)};
}

// 4. The two scalar bounds used by the chain.
Outcome criterion4() {
    const double square_minus_cube[] = {0.0, 0.0, 1.0, -1.0};
    const ScalarBoundResult b1 = scalar_poly_max(square_minus_cube, 0.0, 1.0);
    const double shifted_cubic[] = {0.0, -13.0 / 9.0, 4.0, -3.0};
    const ScalarBoundResult b2 = scalar_poly_max(shifted_cubic, 0.0, 1.0);

    const double err = std::max({std::abs(b1.max_value - 4.0 / 27.0),
                                 std::abs(b1.argmax - 2.0 / 3.0), std::abs(b2.max_value),
                                 std::abs(b2.argmax)});

    // cross-check against a dense grid
    double grid_max1 = -1e300, grid_max2 = -1e300;
    for (int i = 0; i <= 1000000; ++i) {
        const double x = static_cast<double>(i) / 1000000.0;
        grid_max1 = std::max(grid_max1, x * x * (1.0 - x));
        grid_max2 = std::max(grid_max2, -13.0 / 9.0 * x + 4.0 * x * x - 3.0 * x * x * x);
    }
    const bool grid_ok = std::abs(b1.max_value - grid_max1) <= 1e-10 &&
                         std::abs(b2.max_value - grid_max2) <= 1e-10;

    return {err <= 1e-12 && grid_ok, "max deviation " + fmt(err)};
}

// 5. Proof-chain suite on 500 seeded normalized triples plus 500 partitions.
Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_eig = 0.0;
    double worst_residual = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        EnsembleSpec spec = cycled_spec(trial, 3, 5, 51000);
        if (spec.family == Family::near_uniform && spec.jitter == 0.0) spec.jitter = 0.05;
        Ensemble raw = generate(spec);
        if (op_norm(raw.member_sum()) == 0.0) continue;
        auto [e, scale] = normalize_ensemble(raw);

        const ChainReport upper = chain_check(e, ChainDirection::upper);
        const ChainReport lower = chain_check(e, ChainDirection::lower);
        const ShiftResult shift = shift_to_identity_partition(e);
        worst_eig = std::min({worst_eig, upper.worst_min_eig(), lower.worst_min_eig(),
                              shift.monotonicity.min_eig});

        const auto& mem = e.members();
        const auto [gap, gap_cert] = lemma1_gap(mem[0], mem[1], mem[2]);
        const LoewnerCertificate l2 = lemma2_check(mem[0], mem[0] + mem[2], mem[1], 1e-9);
        worst_eig = std::min({worst_eig, gap_cert.min_eig, l2.min_eig});

        const Lower4Report low4 = lower4_identity_check(shift.shifted);
        worst_residual = std::max(worst_residual, low4.max_residual);
    }
    const double elapsed = seconds_since(t0);
    // scale is 1 after normalization, so the thresholds are absolute here
    const bool pass = worst_eig >= -1e-10 && worst_residual <= 1e-10 && elapsed < 120.0;
    return {pass, "worst cert eig " + fmt(worst_eig) + ", worst lower4 residual " +
                      fmt(worst_residual) + ", " + fmt(elapsed) + " s"};
}

// 6. Block-aggregation identity, exhaustive enumeration, n=6, k=2, n0=3.
Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const EnsembleSpec spec = cycled_spec(trial, 6, 3, 61000);
        const Ensemble e = generate(spec);
        const BlockAggregateReport rep = block_aggregate_identity(e, 2, 3, 3);
        if (rep.sampled) return {false, "unexpected sampling for n = 6"};
        worst = std::max(worst, rep.residual);
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst <= 1e-10 && elapsed < 60.0;
    return {pass, "max residual " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

// 7. Scalar ensembles have nonnegative margins for every m <= n <= 7.
Outcome criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    double min_margin = std::numeric_limits<double>::infinity();
    long checks = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        for (int n = 1; n <= 7; ++n) {
            EnsembleSpec spec;
            spec.family = Family::scalar;
            spec.n = n;
            spec.dim = 1;
            spec.seed = 71000 + static_cast<std::uint64_t>(seed) * 7 + n;
            const Ensemble e = generate(spec);
            for (int m = 1; m <= n; ++m) {
                min_margin = std::min(min_margin, check_conjecture(e, m).margin);
                ++checks;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = min_margin >= -1e-12;
    return {pass, "min margin " + fmt(min_margin) + " over " + std::to_string(checks) +
                      " checks, " + fmt(elapsed) + " s"};
}

// 8. Explorer determinism and complete reports on open cases.
Outcome criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::pair<int, int> open_cases[] = {{4, 3}, {5, 3}, {4, 4}, {5, 4}, {6, 4}};
    for (const auto& [n, m] : open_cases) {
        SearchConfig cfg;
        cfg.n = n;
        cfg.m = m;
        cfg.dim = 3;
        cfg.trials = 100;
        cfg.base_seed = 81000 + n * 10 + m;
        cfg.families = {Family::wishart, Family::diagonal, Family::projection_jitter};
        cfg.jitter = 0.05;
        cfg.flag_dir = "/tmp";

        const SearchReport a = margin_search(cfg);
        const SearchReport b = margin_search(cfg);
        if (static_cast<int>(a.trials.size()) != cfg.trials)
            return {false, "incomplete report for n=" + std::to_string(n)};

        const std::string p1 = "/tmp/ncamgm_acc8_a.csv";
        const std::string p2 = "/tmp/ncamgm_acc8_b.csv";
        write_search_csv(a, p1);
        write_search_csv(b, p2);
        std::ifstream f1(p1), f2(p2);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        const bool identical = s1.str() == s2.str();
        std::remove(p1.c_str());
        std::remove(p2.c_str());
        if (!identical) return {false, "reports differ for n=" + std::to_string(n)};
    }
    return {true, "5 open cases, byte-identical margin columns, " + fmt(seconds_since(t0)) + " s"};
}

// 9. Kaczmarz demo: exact identity solve and the paired median comparison.
Outcome criterion9() {
    const LinearSystem identity = make_identity_system(10, 900);
    const ErrorTrace t = run_kaczmarz(identity, SamplingPolicy::without_replacement, 1, 1);
    if (t.sq_errors.back() != 0.0) return {false, "identity system not solved exactly"};

    const LinearSystem sys = make_gaussian_system(50, 10, 901);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 100; ++s) seeds.push_back(91000 + s);
    const PolicySummary summary = compare_policies(sys, seeds, 3);
    const bool pass = summary.median_without <= summary.median_with;
    return {pass, "median without " + fmt(summary.median_without) + " vs with " +
                      fmt(summary.median_with) + ", win rate " + fmt(summary.win_rate)};
}

}  // namespace

int main() {
    const auto suite_start = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence (fast vs brute distinct sums)", criterion1},
        {"theorem cases m=3, n in {3,6,9}", criterion2},
        {"equality tightness at the uniform triple", criterion3},
        {"scalar bounds 4/27 and 0", criterion4},
        {"proof-chain suite on 500 triples", criterion5},
        {"block-aggregation identity n=6", criterion6},
        {"scalar ensembles stay nonnegative", criterion7},
        {"explorer determinism and open cases", criterion8},
        {"kaczmarz policy comparison", criterion9},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::printf("criterion %zu %s - %s: %s\n", i + 1, out.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), out.detail.c_str());
    }

    // 10. The whole suite must fit a five-minute single-process budget.
    const double total = seconds_since(suite_start);
    const bool time_ok = total < 300.0;
    if (!time_ok) ++failures;
    std::printf("criterion 10 %s - total runtime budget: %.1f s of 300 s\n",
                time_ok ? "PASS" : "FAIL", total);

    return failures == 0 ? 0 : 1;
}
