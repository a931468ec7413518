#include "ncamgm/conjecture.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ncamgm/errors.hpp"

namespace ncamgm {

std::pair<Ensemble, double> normalize_ensemble(const Ensemble& e) {
    const double scale = op_norm(e.member_sum());
    if (scale == 0.0) throw input_error("normalize_ensemble: all-zero ensemble");
    std::vector<SymMatrix> scaled;
    scaled.reserve(e.size());
    for (const SymMatrix& m : e.members()) scaled.push_back((1.0 / scale) * m);
    return {Ensemble(std::move(scaled)), scale};
}

ConjectureReport check_conjecture(const Ensemble& e, int m, const CheckOptions& opts) {
    if (m < 1) throw input_error("check_conjecture: m must be >= 1");
    if (m > e.size())
        throw input_error("check_conjecture: m > n (m = " + std::to_string(m) +
                          ", n = " + std::to_string(e.size()) + ")");
    const int n = e.size();
    const SumMode mode = (m <= 4) ? SumMode::fast : SumMode::brute;

    ConjectureReport rep;
    rep.m = m;
    rep.n = n;
    rep.form = InequalityForm::norm;
    rep.lhs = op_norm(full_tuple_sum(e, m).value, opts.eig) / std::pow(n, m);
    rep.rhs = op_norm(distinct_tuple_sum(e, m, mode).value, opts.eig) / falling_factorial(n, m);
    rep.margin = rep.lhs - rep.rhs;
    return rep;
}

LoewnerFormReport check_loewner_form(const Ensemble& e, int m, double tol,
                                     const CheckOptions& opts) {
    if (m < 1) throw input_error("check_loewner_form: m must be >= 1");
    if (m > e.size())
        throw input_error("check_loewner_form: m > n (m = " + std::to_string(m) +
                          ", n = " + std::to_string(e.size()) + ")");

    LoewnerFormReport rep;
    const double sum_norm = op_norm(e.member_sum(), opts.eig);
    if (std::abs(sum_norm - 1.0) <= 1e-12) {
        rep.scale = 1.0;
        rep.expectation = permutation_expectation(e, m);
    } else {
        auto [normalized, scale] = normalize_ensemble(e);
        rep.scale = scale;
        rep.expectation = permutation_expectation(normalized, m);
    }

    const double bound = std::pow(static_cast<double>(e.size()), -m);
    SymMatrix bound_mat(e.dim());
    for (int i = 0; i < e.dim(); ++i) bound_mat.set(i, i, bound);
    rep.upper_cert = loewner_le(rep.expectation, bound_mat, tol, opts.eig);
    rep.lower_cert = loewner_le(-1.0 * bound_mat, rep.expectation, tol, opts.eig);
    return rep;
}

namespace {

// Accumulates sum of ||prefix * A_j * ...|| over ordered tuples; distinct_only
// restricts to injective tuples.
void variant_recurse(const std::vector<Matrix>& members, int m, int depth, bool distinct_only,
                     std::vector<bool>& used, std::vector<Matrix>& prefixes, double& acc,
                     const JacobiOptions& eig) {
    if (depth == m) {
        acc += spectral_norm(prefixes[m], eig);
        return;
    }
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (distinct_only && used[j]) continue;
        used[j] = true;
        multiply_into(prefixes[depth], members[j], prefixes[depth + 1]);
        variant_recurse(members, m, depth + 1, distinct_only, used, prefixes, acc, eig);
        used[j] = false;
    }
}

double variant_norm_sum(const Ensemble& e, int m, bool distinct_only, const JacobiOptions& eig) {
    std::vector<bool> used(e.size(), false);
    std::vector<Matrix> prefixes(m + 1);
    prefixes[0] = Matrix::identity(e.dim());
    for (int k = 1; k <= m; ++k) prefixes[k] = Matrix(e.dim(), e.dim());
    std::vector<Matrix> members;
    members.reserve(e.size());
    for (int j = 0; j < e.size(); ++j) members.push_back(e[j].to_matrix());
    double acc = 0.0;
    variant_recurse(members, m, 0, distinct_only, used, prefixes, acc, eig);
    return acc;
}

}  // namespace

ConjectureReport check_variant(const Ensemble& e, int m, const CheckOptions& opts) {
    if (m < 1) throw input_error("check_variant: m must be >= 1");
    if (m > e.size())
        throw input_error("check_variant: m > n (m = " + std::to_string(m) +
                          ", n = " + std::to_string(e.size()) + ")");
    if (e.size() > 9 || m > 4)
        throw input_error("check_variant: full enumeration capped at n <= 9, m <= 4");

    const int n = e.size();
    ConjectureReport rep;
    rep.m = m;
    rep.n = n;
    rep.form = InequalityForm::variant;
    rep.lhs = variant_norm_sum(e, m, false, opts.eig) / std::pow(n, m);
    rep.rhs = variant_norm_sum(e, m, true, opts.eig) / falling_factorial(n, m);
    rep.margin = rep.lhs - rep.rhs;
    return rep;
}

}  // namespace ncamgm
