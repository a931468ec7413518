#include "ncamgm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncamgm/conjecture.hpp"
#include "ncamgm/ensemble.hpp"
#include "ncamgm/errors.hpp"
#include "ncamgm/explorer.hpp"
#include "ncamgm/kaczmarz.hpp"
#include "ncamgm/proofsteps.hpp"

namespace ncamgm {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    int n = 3;
    int m = 3;
    int dim = 3;
    std::uint64_t seed = 0;
    int trials = 1;
    std::string family = "wishart";
    double tol = 1e-9;
    double eps = 0.0;
    std::string input;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--n", o.n, "ensemble size");
    cmd->add_option("--m", o.m, "product order");
    cmd->add_option("--dim", o.dim, "matrix dimension");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--trials", o.trials, "number of generated instances");
    cmd->add_option("--family", o.family,
                    "ensemble family (wishart, diagonal, projection_jitter, "
                    "near_uniform, scalar); comma-separated list for search");
    cmd->add_option("--eps", o.eps, "perturbation / ridge parameter for "
                                    "near_uniform and projection_jitter");
    cmd->add_option("--tol", o.tol, "violation tolerance (numerical, not mathematical)");
    cmd->add_option("--input", o.input, "ensemble JSON file to check instead of generating");
    cmd->add_option("--out", o.out, "report file (stdout if omitted)");
    cmd->add_option("--format", o.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

std::string dir_of(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw input_error("cannot open report file " + out_path);
    out << text;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct VerifyTrial {
    int trial;
    std::uint64_t seed;
    std::string family;
    int n, m, dim;
    double lhs, rhs, margin, scale;
    double upper_min_eig, lower_min_eig;
    bool has_certs;
};

nlohmann::json verify_trial_json(const VerifyTrial& t) {
    nlohmann::json j = {{"trial", t.trial}, {"seed", t.seed},   {"family", t.family},
                        {"n", t.n},         {"m", t.m},         {"dim", t.dim},
                        {"lhs", t.lhs},     {"rhs", t.rhs},     {"margin", t.margin},
                        {"scale", t.scale}};
    if (t.has_certs) {
        j["upper_min_eig"] = t.upper_min_eig;
        j["lower_min_eig"] = t.lower_min_eig;
    }
    return j;
}

int run_verify_like(const CommonOpts& o, bool variant_form) {
    std::vector<VerifyTrial> rows;
    int violations = 0;
    const std::string out_dir = o.out.empty() ? "." : dir_of(o.out);

    auto check_one = [&](const Ensemble& e, int trial, std::uint64_t seed,
                         const std::string& family) {
        VerifyTrial row{};
        row.trial = trial;
        row.seed = seed;
        row.family = family;
        row.n = e.size();
        row.m = o.m;
        row.dim = e.dim();
        row.scale = 1.0;
        row.has_certs = !variant_form;

        const ConjectureReport rep =
            variant_form ? check_variant(e, o.m) : check_conjecture(e, o.m);
        row.lhs = rep.lhs;
        row.rhs = rep.rhs;
        row.margin = rep.margin;

        bool violated = rep.margin < -o.tol * std::max(1.0, rep.lhs);
        if (!variant_form) {
            const LoewnerFormReport lf = check_loewner_form(e, o.m, o.tol);
            row.scale = lf.scale;
            row.upper_min_eig = lf.upper_cert.min_eig;
            row.lower_min_eig = lf.lower_cert.min_eig;
            violated = violated || lf.upper_cert.min_eig < -o.tol || lf.lower_cert.min_eig < -o.tol;
        }
        if (violated) {
            ++violations;
            save_ensemble(e, out_dir + "/violation_" + (variant_form ? "variant" : "verify") +
                                 "_trial" + std::to_string(trial) + ".json");
        }
        rows.push_back(row);
    };

    if (!o.input.empty()) {
        check_one(load_ensemble(o.input), 0, 0, "file");
    } else {
        const Family fam = parse_family(o.family);
        for (int t = 0; t < o.trials; ++t) {
            EnsembleSpec spec;
            spec.family = fam;
            spec.n = o.n;
            spec.dim = fam == Family::scalar ? 1 : o.dim;
            spec.seed = o.seed + static_cast<std::uint64_t>(t);
            spec.jitter = o.eps;
            check_one(generate(spec), t, spec.seed, o.family);
        }
    }

    if (o.format == "csv") {
        std::ostringstream csv;
        csv << "trial,seed,family,n,m,dim,lhs,rhs,margin";
        if (!variant_form) csv << ",upper_min_eig,lower_min_eig,scale";
        csv << '\n';
        for (const VerifyTrial& t : rows) {
            csv << t.trial << ',' << t.seed << ',' << t.family << ',' << t.n << ',' << t.m << ','
                << t.dim << ',' << fmt(t.lhs) << ',' << fmt(t.rhs) << ',' << fmt(t.margin);
            if (!variant_form)
                csv << ',' << fmt(t.upper_min_eig) << ',' << fmt(t.lower_min_eig) << ','
                    << fmt(t.scale);
            csv << '\n';
        }
        emit(csv.str(), o.out);
    } else {
        nlohmann::json j;
        j["report_version"] = 1;
        j["command"] = variant_form ? "variant" : "verify";
        j["tol"] = o.tol;
        nlohmann::json trials = nlohmann::json::array();
        for (const VerifyTrial& t : rows) trials.push_back(verify_trial_json(t));
        j["trials"] = std::move(trials);
        j["violations"] = violations;
        emit(j.dump(2) + "\n", o.out);
    }
    return violations > 0 ? kExitViolation : kExitPass;
}

int run_prove_steps(const CommonOpts& o) {
    if (o.format == "csv")
        throw input_error("prove-steps: reports are JSON only");
    // The two scalar bounds the chain leans on; they hold or nothing else matters.
    const double square_minus_cube[] = {0.0, 0.0, 1.0, -1.0};
    const ScalarBoundResult b1 = scalar_poly_max(square_minus_cube, 0.0, 1.0);
    const double shifted_cubic[] = {0.0, -13.0 / 9.0, 4.0, -3.0};
    const ScalarBoundResult b2 = scalar_poly_max(shifted_cubic, 0.0, 1.0);
    const bool constants_ok = std::abs(b1.max_value - 4.0 / 27.0) <= 1e-12 &&
                              std::abs(b1.argmax - 2.0 / 3.0) <= 1e-12 &&
                              std::abs(b2.max_value) <= 1e-12 && std::abs(b2.argmax) <= 1e-12;

    nlohmann::json trials = nlohmann::json::array();
    bool all_hold = constants_ok;

    for (int t = 0; t < o.trials; ++t) {
        Ensemble e = [&] {
            if (!o.input.empty()) return load_ensemble(o.input);
            EnsembleSpec spec;
            spec.family = parse_family(o.family);
            spec.n = 3;
            spec.dim = spec.family == Family::scalar ? 1 : o.dim;
            spec.seed = o.seed + static_cast<std::uint64_t>(t);
            spec.jitter = o.eps;
            return generate(spec);
        }();
        if (e.size() != 3) throw input_error("prove-steps: triples only (n = 3)");

        auto [normalized, scale] = normalize_ensemble(e);
        const ChainReport upper = chain_check(normalized, ChainDirection::upper);
        const ChainReport lower = chain_check(normalized, ChainDirection::lower);
        const ShiftResult shift = shift_to_identity_partition(normalized);
        const Lower4Report lower4 = lower4_identity_check(shift.shifted);

        const auto& mem = normalized.members();
        const auto [gap, gap_cert] = lemma1_gap(mem[0], mem[1], mem[2]);
        const LoewnerCertificate lemma2 =
            lemma2_check(mem[0], mem[0] + mem[2], mem[1], o.tol);

        const double worst_eig =
            std::min({upper.worst_min_eig(), lower.worst_min_eig(), shift.monotonicity.min_eig,
                      gap_cert.min_eig, lemma2.min_eig});
        const double max_res =
            std::max({upper.max_residual(), lower.max_residual(), lower4.max_residual});
        const bool ok = upper.all_hold && lower.all_hold && shift.monotonicity.holds &&
                        lower4.all_hold && gap_cert.holds && lemma2.holds &&
                        shift.sum_residual <= 1e-12;
        all_hold = all_hold && ok;

        trials.push_back({{"trial", t},
                          {"seed", o.seed + static_cast<std::uint64_t>(t)},
                          {"scale", scale},
                          {"worst_min_eig", worst_eig},
                          {"max_identity_residual", max_res},
                          {"shift_sum_residual", shift.sum_residual},
                          {"all_hold", ok}});
        if (!o.input.empty()) break;
    }

    nlohmann::json j;
    j["report_version"] = 1;
    j["command"] = "prove-steps";
    j["scalar_bounds"] = {{"square_minus_cube_max", b1.max_value},
                          {"square_minus_cube_argmax", b1.argmax},
                          {"shifted_cubic_max", b2.max_value},
                          {"shifted_cubic_argmax", b2.argmax},
                          {"ok", constants_ok}};
    j["trials"] = std::move(trials);
    j["all_hold"] = all_hold;
    emit(j.dump(2) + "\n", o.out);
    return all_hold ? kExitPass : kExitViolation;
}

int run_generalize(const CommonOpts& o, int n0) {
    if (o.format == "csv")
        throw input_error("generalize: reports are JSON only");
    if (n0 < 1 || o.n % n0 != 0)
        throw input_error("generalize: --n must be a positive multiple of --n0");
    const int k = o.n / n0;
    const double threshold = std::max(o.tol, 1e-10);

    nlohmann::json trials = nlohmann::json::array();
    bool all_pass = true;
    for (int t = 0; t < o.trials; ++t) {
        EnsembleSpec spec;
        spec.family = parse_family(o.family);
        spec.n = o.n;
        spec.dim = spec.family == Family::scalar ? 1 : o.dim;
        spec.seed = o.seed + static_cast<std::uint64_t>(t);
        spec.jitter = o.eps;
        const Ensemble e = !o.input.empty() ? load_ensemble(o.input) : generate(spec);

        const BlockAggregateReport rep =
            block_aggregate_identity(e, k, n0, o.m, o.tol, spec.seed);
        const bool ok = (rep.sampled || rep.residual <= threshold) &&
                        rep.worst_upper.min_eig >= -threshold &&
                        rep.worst_lower.min_eig >= -threshold;
        all_pass = all_pass && ok;
        trials.push_back({{"trial", t},
                          {"seed", spec.seed},
                          {"residual", rep.residual},
                          {"sampled", rep.sampled},
                          {"outer_permutations", rep.outer_permutations},
                          {"worst_upper_min_eig", rep.worst_upper.min_eig},
                          {"worst_lower_min_eig", rep.worst_lower.min_eig},
                          {"scale", rep.scale},
                          {"ok", ok}});
        if (!o.input.empty()) break;
    }

    nlohmann::json j;
    j["report_version"] = 1;
    j["command"] = "generalize";
    j["n"] = o.n;
    j["n0"] = n0;
    j["k"] = k;
    j["m"] = o.m;
    j["trials"] = std::move(trials);
    j["all_pass"] = all_pass;
    emit(j.dump(2) + "\n", o.out);
    return all_pass ? kExitPass : kExitViolation;
}

int run_search(const CommonOpts& o, bool do_refine, int refine_steps, double step_size) {
    SearchConfig cfg;
    cfg.n = o.n;
    cfg.m = o.m;
    cfg.dim = o.dim;
    cfg.trials = o.trials;
    cfg.base_seed = o.seed;
    cfg.tol = o.tol;
    cfg.jitter = o.eps;
    cfg.refine = do_refine;
    cfg.refine_steps = refine_steps;
    cfg.step_size = step_size;
    cfg.flag_dir = o.out.empty() ? "." : dir_of(o.out);

    cfg.families.clear();
    std::stringstream ss(o.family);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) cfg.families.push_back(parse_family(item));
    }
    if (cfg.families.empty()) throw input_error("search: no families given");

    const SearchReport rep = margin_search(cfg);

    double refined_margin = rep.min_margin;
    bool refined_violation = false;
    if (cfg.refine && rep.argmin_trial >= 0) {
        const Ensemble worst = generate(rep.argmin_spec);
        auto [refined_ensemble, final_margin] = refine(worst, cfg);
        refined_margin = final_margin;
        const double lhs = check_conjecture(refined_ensemble, cfg.m).lhs;
        if (refined_margin < -cfg.tol * std::max(1.0, lhs)) {
            refined_violation = true;
            save_ensemble(refined_ensemble, cfg.flag_dir + "/violation_refined_seed" +
                                                std::to_string(cfg.base_seed) + ".json");
        }
    }

    if (o.format == "csv") {
        emit(search_report_csv_text(rep), o.out);
    } else {
        emit(search_report_json_text(rep, cfg), o.out);
    }
    if (cfg.refine)
        std::cerr << "refined_margin " << fmt(refined_margin) << "\n";

    return (rep.violations > 0 || refined_violation) ? kExitViolation : kExitPass;
}

int run_kaczmarz_cmd(const CommonOpts& o, int rows, int cols, int epochs) {
    const LinearSystem sys = make_gaussian_system(rows, cols, o.seed);
    std::vector<std::uint64_t> seeds;
    for (int t = 0; t < o.trials; ++t) seeds.push_back(o.seed + 1 + static_cast<std::uint64_t>(t));
    const PolicySummary summary = compare_policies(sys, seeds, epochs);

    if (o.format == "csv") {
        std::vector<ErrorTrace> traces;
        for (std::uint64_t s : seeds) {
            traces.push_back(run_kaczmarz(sys, SamplingPolicy::without_replacement, s, epochs));
            traces.push_back(run_kaczmarz(sys, SamplingPolicy::with_replacement, s, epochs));
        }
        const std::string path = o.out.empty() ? "/dev/stdout" : o.out;
        write_traces_csv(traces, path);
    } else {
        nlohmann::json j;
        j["report_version"] = 1;
        j["command"] = "kaczmarz";
        j["rows"] = rows;
        j["cols"] = cols;
        j["epochs"] = epochs;
        j["seeds"] = o.trials;
        j["median_without_replacement"] = summary.median_without;
        j["median_with_replacement"] = summary.median_with;
        j["win_rate_without"] = summary.win_rate;
        emit(j.dump(2) + "\n", o.out);
    }
    return summary.median_without <= summary.median_with ? kExitPass : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Numerical laboratory for the matrix AM-GM inequality"};
    app.require_subcommand(1);

    CommonOpts vo, xo, po, go, so, ko;

    CLI::App* verify = app.add_subcommand(
        "verify", "norm-form and two-sided Loewner-form checks on ensembles");
    add_common(verify, vo);

    CLI::App* variant = app.add_subcommand(
        "variant", "norms-inside-sums variant of the inequality");
    add_common(variant, xo);

    CLI::App* prove = app.add_subcommand(
        "prove-steps", "full proof-chain verification on triples");
    add_common(prove, po);

    CLI::App* generalize = app.add_subcommand(
        "generalize", "block-aggregation identity for n = k*n0");
    add_common(generalize, go);
    int n0 = 3;
    generalize->add_option("--n0", n0, "inner ensemble size");

    CLI::App* search = app.add_subcommand("search", "margin sweep over random ensembles");
    add_common(search, so);
    bool do_refine = false;
    int refine_steps = 200;
    double step_size = 0.01;
    search->add_flag("--refine", do_refine, "greedy-descend the worst instance");
    search->add_option("--refine-steps", refine_steps, "perturbation proposals");
    search->add_option("--step-size", step_size, "rank-1 perturbation magnitude");

    CLI::App* kacz = app.add_subcommand(
        "kaczmarz", "row-sampling policy comparison on consistent least squares");
    kacz->add_option("--seed", ko.seed, "base seed");
    kacz->add_option("--trials", ko.trials, "number of paired seeds");
    kacz->add_option("--out", ko.out, "report file (stdout if omitted)");
    kacz->add_option("--format", ko.format, "report format: json or csv (csv = full traces)")
        ->check(CLI::IsMember({"json", "csv"}));
    int rows = 50, cols = 10, epochs = 3;
    kacz->add_option("--rows", rows, "system rows");
    kacz->add_option("--cols", cols, "system columns");
    kacz->add_option("--epochs", epochs, "full passes over the rows");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (verify->parsed()) return run_verify_like(vo, false);
        if (variant->parsed()) return run_verify_like(xo, true);
        if (prove->parsed()) return run_prove_steps(po);
        if (generalize->parsed()) return run_generalize(go, n0);
        if (search->parsed()) return run_search(so, do_refine, refine_steps, step_size);
        if (kacz->parsed()) return run_kaczmarz_cmd(ko, rows, cols, epochs);
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitNumerical;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const precondition_error& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace ncamgm
