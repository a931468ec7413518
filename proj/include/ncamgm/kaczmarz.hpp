#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncamgm/matrix.hpp"

namespace ncamgm {

enum class SamplingPolicy { with_replacement, without_replacement };

std::string policy_name(SamplingPolicy p);

// Consistent linear system: rhs is computed from the stored solution at
// construction, so the solution set is nonempty by construction.
struct LinearSystem {
    Matrix rows;                       // r x c
    std::vector<double> rhs;           // r
    std::vector<double> true_solution; // c

    LinearSystem(Matrix rows_in, std::vector<double> solution);
};

LinearSystem make_gaussian_system(int r, int c, std::uint64_t seed);
LinearSystem make_identity_system(int n, std::uint64_t seed);

struct ErrorTrace {
    SamplingPolicy policy = SamplingPolicy::with_replacement;
    std::uint64_t seed = 0;
    int epochs = 0;
    std::vector<double> sq_errors;  // epochs * r + 1 entries, initial error first
};

// Kaczmarz projection steps: with_replacement draws rows uniformly iid,
// without_replacement walks a fresh uniform permutation per epoch.
// Starts from the zero vector unless x0 is given.
ErrorTrace run_kaczmarz(const LinearSystem& sys, SamplingPolicy policy, std::uint64_t seed,
                        int epochs, const std::vector<double>* x0 = nullptr);

struct PolicySummary {
    int epochs = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> final_without;  // per seed, paired
    std::vector<double> final_with;
    double median_without = 0.0;
    double median_with = 0.0;
    double win_rate = 0.0;  // fraction of seeds with without <= with
};

PolicySummary compare_policies(const LinearSystem& sys, std::span<const std::uint64_t> seeds,
                               int epochs);

// CSV columns: policy,seed,step,sq_error
void write_traces_csv(std::span<const ErrorTrace> traces, const std::string& path);

}  // namespace ncamgm
