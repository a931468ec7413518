#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncamgm/conjecture.hpp"
#include "ncamgm/ensemble.hpp"

namespace ncamgm {

struct SearchConfig {
    int n = 3;
    int m = 3;
    int dim = 3;
    int trials = 100;
    std::uint64_t base_seed = 0;
    std::vector<Family> families = {Family::wishart};
    double tol = 1e-9;

    bool refine = false;
    int refine_steps = 200;
    double step_size = 0.01;

    double jitter = 0.0;  // near_uniform / projection_jitter parameter

    // Confirmed violations are serialized here before being reported.
    std::string flag_dir = ".";
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    Family family = Family::wishart;
    int n = 0;
    int m = 0;
    int dim = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

struct SearchReport {
    std::vector<TrialResult> trials;  // in trial-index order, nothing dropped
    double min_margin = 0.0;
    int argmin_trial = -1;
    EnsembleSpec argmin_spec;
    int violations = 0;  // margins below -tol * max(1, lhs), confirmed at
                         // tightened eigensolver tolerance
    long long runtime_ms = 0;
};

// Evaluates check_conjecture on `trials` generated ensembles. Deterministic
// for a fixed config: trial t uses seed base_seed + t and family
// families[t mod |families|].
SearchReport margin_search(const SearchConfig& cfg);

// Greedy descent on the margin: seeded symmetric rank-1 perturbations of
// single members, kept only when the member stays PSD and the margin
// strictly decreases. Returns the locally worst ensemble and its margin.
std::pair<Ensemble, double> refine(const Ensemble& e, const SearchConfig& cfg);

std::string search_report_json_text(const SearchReport& rep, const SearchConfig& cfg);
// CSV columns: trial,seed,family,n,m,dim,lhs,rhs,margin
std::string search_report_csv_text(const SearchReport& rep);

void write_search_json(const SearchReport& rep, const SearchConfig& cfg,
                       const std::string& path);
void write_search_csv(const SearchReport& rep, const std::string& path);

}  // namespace ncamgm
