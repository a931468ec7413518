#include "ncamgm/kaczmarz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ncamgm/errors.hpp"
#include "ncamgm/rng.hpp"

namespace ncamgm {

std::string policy_name(SamplingPolicy p) {
    return p == SamplingPolicy::with_replacement ? "with_replacement" : "without_replacement";
}

LinearSystem::LinearSystem(Matrix rows_in, std::vector<double> solution)
    : rows(std::move(rows_in)), true_solution(std::move(solution)) {
    if (rows.rows() < 1 || rows.cols() < 1)
        throw input_error("LinearSystem: needs at least one row and one column");
    if (true_solution.size() != static_cast<std::size_t>(rows.cols()))
        throw input_error("LinearSystem: solution length must match columns");
    rhs = rows * true_solution;
}

LinearSystem make_gaussian_system(int r, int c, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix rows(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) rows(i, j) = rng.next_normal();
    std::vector<double> solution(c);
    for (double& v : solution) v = rng.next_normal();
    return LinearSystem(std::move(rows), std::move(solution));
}

LinearSystem make_identity_system(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> solution(n);
    for (double& v : solution) v = rng.next_normal();
    return LinearSystem(Matrix::identity(n), std::move(solution));
}

ErrorTrace run_kaczmarz(const LinearSystem& sys, SamplingPolicy policy, std::uint64_t seed,
                        int epochs, const std::vector<double>* x0) {
    if (epochs < 1) throw input_error("run_kaczmarz: epochs must be >= 1");
    const int r = sys.rows.rows();
    const int c = sys.rows.cols();

    std::vector<double> row_sq_norms(r, 0.0);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) row_sq_norms[i] += sys.rows(i, j) * sys.rows(i, j);
        if (row_sq_norms[i] == 0.0)
            throw input_error("run_kaczmarz: row " + std::to_string(i) + " is zero");
    }

    std::vector<double> x(c, 0.0);
    if (x0) {
        if (x0->size() != static_cast<std::size_t>(c))
            throw input_error("run_kaczmarz: x0 length must match columns");
        x = *x0;
    }

    ErrorTrace trace;
    trace.policy = policy;
    trace.seed = seed;
    trace.epochs = epochs;
    trace.sq_errors.reserve(static_cast<std::size_t>(epochs) * r + 1);

    auto sq_error = [&]() {
        double s = 0.0;
        for (int j = 0; j < c; ++j) {
            const double d = x[j] - sys.true_solution[j];
            s += d * d;
        }
        return s;
    };
    trace.sq_errors.push_back(sq_error());

    SplitMix64 rng(seed);
    std::vector<int> order(r);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        if (policy == SamplingPolicy::without_replacement) rng.shuffle(order);
        for (int step = 0; step < r; ++step) {
            const int i = policy == SamplingPolicy::without_replacement
                              ? order[step]
                              : static_cast<int>(rng.next_below(r));
            // Same accumulation order as the rhs construction, so an iterate
            // equal to the stored solution has an exactly zero residual.
            double dot = 0.0;
            for (int j = 0; j < c; ++j) dot += sys.rows(i, j) * x[j];
            const double alpha = (sys.rhs[i] - dot) / row_sq_norms[i];
            for (int j = 0; j < c; ++j) x[j] += alpha * sys.rows(i, j);
            trace.sq_errors.push_back(sq_error());
        }
    }
    return trace;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PolicySummary compare_policies(const LinearSystem& sys, std::span<const std::uint64_t> seeds,
                               int epochs) {
    if (seeds.empty()) throw input_error("compare_policies: needs at least one seed");
    PolicySummary summary;
    summary.epochs = epochs;
    int wins = 0;
    for (std::uint64_t seed : seeds) {
        const ErrorTrace without =
            run_kaczmarz(sys, SamplingPolicy::without_replacement, seed, epochs);
        const ErrorTrace with = run_kaczmarz(sys, SamplingPolicy::with_replacement, seed, epochs);
        summary.seeds.push_back(seed);
        summary.final_without.push_back(without.sq_errors.back());
        summary.final_with.push_back(with.sq_errors.back());
        if (without.sq_errors.back() <= with.sq_errors.back()) ++wins;
    }
    summary.median_without = median(summary.final_without);
    summary.median_with = median(summary.final_with);
    summary.win_rate = static_cast<double>(wins) / static_cast<double>(seeds.size());
    return summary;
}

void write_traces_csv(std::span<const ErrorTrace> traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("write_traces_csv: cannot open " + path);
    out << "policy,seed,step,sq_error\n";
    char buf[64];
    for (const ErrorTrace& t : traces) {
        for (std::size_t s = 0; s < t.sq_errors.size(); ++s) {
            std::snprintf(buf, sizeof(buf), "%.17g", t.sq_errors[s]);
            out << policy_name(t.policy) << ',' << t.seed << ',' << s << ',' << buf << '\n';
        }
    }
}

}  // namespace ncamgm
