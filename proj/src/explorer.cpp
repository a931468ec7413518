#include "ncamgm/explorer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ncamgm/errors.hpp"
#include "ncamgm/rng.hpp"

namespace ncamgm {

namespace {

EnsembleSpec trial_spec(const SearchConfig& cfg, int trial) {
    EnsembleSpec spec;
    spec.family = cfg.families[trial % cfg.families.size()];
    spec.n = cfg.n;
    spec.dim = spec.family == Family::scalar ? 1 : cfg.dim;
    spec.seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
    spec.jitter = cfg.jitter;
    return spec;
}

// %.17g round-trips doubles and keeps report bytes reproducible.
std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SearchReport margin_search(const SearchConfig& cfg) {
    if (cfg.trials < 1) throw input_error("margin_search: trials must be >= 1");
    if (cfg.tol < 0.0) throw input_error("margin_search: tol must be >= 0");
    if (cfg.m > cfg.n) throw input_error("margin_search: m > n");
    if (cfg.families.empty()) throw input_error("margin_search: no families given");

    const auto t0 = std::chrono::steady_clock::now();
    SearchReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();

    for (int t = 0; t < cfg.trials; ++t) {
        const EnsembleSpec spec = trial_spec(cfg, t);
        const Ensemble e = generate(spec);
        const ConjectureReport check = check_conjecture(e, cfg.m);

        TrialResult tr;
        tr.trial = t;
        tr.seed = spec.seed;
        tr.family = spec.family;
        tr.n = cfg.n;
        tr.m = cfg.m;
        tr.dim = spec.dim;
        tr.lhs = check.lhs;
        tr.rhs = check.rhs;
        tr.margin = check.margin;
        rep.trials.push_back(tr);

        if (tr.margin < rep.min_margin) {
            rep.min_margin = tr.margin;
            rep.argmin_trial = t;
            rep.argmin_spec = spec;
        }

        const double scaled_tol = cfg.tol * std::max(1.0, check.lhs);
        if (tr.margin < -scaled_tol) {
            // Mathematics and numerics get separated before we cry wolf:
            // re-verify at tightened eigensolver tolerance, then serialize.
            CheckOptions tight;
            tight.eig.rel_tol = 1e-15;
            tight.eig.max_sweeps = 200;
            const ConjectureReport confirm = check_conjecture(e, cfg.m, tight);
            if (confirm.margin < -scaled_tol) {
                ++rep.violations;
                save_ensemble(e, cfg.flag_dir + "/violation_trial" + std::to_string(t) +
                                     "_seed" + std::to_string(spec.seed) + ".json");
            }
        }
    }

    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

std::pair<Ensemble, double> refine(const Ensemble& e, const SearchConfig& cfg) {
    if (cfg.refine_steps < 1) throw input_error("refine: refine_steps must be >= 1");
    if (cfg.step_size < 0.0) throw input_error("refine: step_size must be >= 0");

    SplitMix64 rng(cfg.base_seed ^ 0xC2B2AE3D27D4EB4FULL);
    const int d = e.dim();
    std::vector<SymMatrix> members = e.members();
    double margin = check_conjecture(e, cfg.m).margin;

    for (int step = 0; step < cfg.refine_steps; ++step) {
        const int target = static_cast<int>(rng.next_below(members.size()));
        std::vector<double> v(d);
        double norm = 0.0;
        for (double& x : v) {
            x = rng.next_normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;

        SymMatrix proposed = members[target];
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                proposed.set(i, j,
                             proposed(i, j) + sign * cfg.step_size * v[i] * v[j] / (norm * norm));

        // Accepted steps must certify PSD and strictly lower the margin.
        if (!psd_certificate(proposed).holds) continue;

        std::vector<SymMatrix> candidate = members;
        candidate[target] = proposed;
        const double new_margin = check_conjecture(Ensemble(candidate), cfg.m).margin;
        if (new_margin < margin) {
            members = std::move(candidate);
            margin = new_margin;
        }
    }
    return {Ensemble(std::move(members)), margin};
}

std::string search_report_json_text(const SearchReport& rep, const SearchConfig& cfg) {
    nlohmann::json j;
    j["report_version"] = 1;
    j["command"] = "search";
    j["config"] = {
        {"n", cfg.n},
        {"m", cfg.m},
        {"dim", cfg.dim},
        {"trials", cfg.trials},
        {"base_seed", cfg.base_seed},
        {"tol", cfg.tol},
        {"jitter", cfg.jitter},
    };
    nlohmann::json fams = nlohmann::json::array();
    for (Family f : cfg.families) fams.push_back(family_name(f));
    j["config"]["families"] = std::move(fams);

    nlohmann::json trials = nlohmann::json::array();
    for (const TrialResult& t : rep.trials) {
        trials.push_back({{"trial", t.trial},
                          {"seed", t.seed},
                          {"family", family_name(t.family)},
                          {"n", t.n},
                          {"m", t.m},
                          {"dim", t.dim},
                          {"lhs", t.lhs},
                          {"rhs", t.rhs},
                          {"margin", t.margin}});
    }
    j["trials"] = std::move(trials);
    j["min_margin"] = rep.min_margin;
    j["argmin_trial"] = rep.argmin_trial;
    j["argmin_spec"] = {{"family", family_name(rep.argmin_spec.family)},
                        {"n", rep.argmin_spec.n},
                        {"dim", rep.argmin_spec.dim},
                        {"seed", rep.argmin_spec.seed},
                        {"jitter", rep.argmin_spec.jitter}};
    j["violations"] = rep.violations;
    j["runtime_ms"] = rep.runtime_ms;
    return j.dump(2) + "\n";
}

std::string search_report_csv_text(const SearchReport& rep) {
    std::string out = "trial,seed,family,n,m,dim,lhs,rhs,margin\n";
    for (const TrialResult& t : rep.trials) {
        out += std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' +
               family_name(t.family) + ',' + std::to_string(t.n) + ',' + std::to_string(t.m) +
               ',' + std::to_string(t.dim) + ',' + format_double(t.lhs) + ',' +
               format_double(t.rhs) + ',' + format_double(t.margin) + '\n';
    }
    return out;
}

void write_search_json(const SearchReport& rep, const SearchConfig& cfg,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("write_search_json: cannot open " + path);
    out << search_report_json_text(rep, cfg);
}

void write_search_csv(const SearchReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("write_search_csv: cannot open " + path);
    out << search_report_csv_text(rep);
}

}  // namespace ncamgm
