#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncamgm/rng.hpp"
#include "ncamgm/symsum.hpp"

namespace ncamgm::testing {

namespace {

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // size dim-1
};

// Householder similarity reduction to tridiagonal form. Written with full
// matrix products for clarity; test inputs are tiny.
Tridiagonal householder_tridiagonalize(const SymMatrix& m) {
    const int n = m.dim();
    Matrix a = m.to_matrix();
    for (int k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (int i = k + 1; i < n; ++i) norm2 += a(i, k) * a(i, k);
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) continue;

        const double x0 = a(k + 1, k);
        const double alpha = x0 >= 0.0 ? -norm : norm;
        std::vector<double> v(n, 0.0);
        v[k + 1] = x0 - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;

        Matrix p = Matrix::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) p(i, j) -= 2.0 * v[i] * v[j] / vnorm2;
        a = p * a * p;
    }
    Tridiagonal t;
    t.diag.resize(n);
    t.off.resize(n > 1 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) t.diag[i] = a(i, i);
    for (int i = 0; i + 1 < n; ++i) t.off[i] = a(i, i + 1);
    return t;
}

// Number of eigenvalues strictly below x, by the sign count of the LDL^T
// pivots of (T - x I).
int sturm_count_below(const Tridiagonal& t, double x) {
    int count = 0;
    double d = 1.0;
    const int n = static_cast<int>(t.diag.size());
    for (int i = 0; i < n; ++i) {
        const double off2 = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1];
        d = (t.diag[i] - x) - off2 / d;
        if (d == 0.0) d = -std::numeric_limits<double>::min();
        if (d < 0.0) ++count;
    }
    return count;
}

}  // namespace

std::vector<double> sturm_bisection_eigenvalues(const SymMatrix& m) {
    const Tridiagonal t = householder_tridiagonalize(m);
    const int n = static_cast<int>(t.diag.size());

    double lo = t.diag[0], hi = t.diag[0];
    for (int i = 0; i < n; ++i) {
        const double radius = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                              (i + 1 < n ? std::abs(t.off[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    lo -= 1e-8;
    hi += 1e-8;

    std::vector<double> eigs(n);
    for (int k = 0; k < n; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            if (b - a <= 1e-13 * std::max({1.0, std::abs(a), std::abs(b)})) break;
            const double mid = 0.5 * (a + b);
            if (sturm_count_below(t, mid) >= k + 1)
                b = mid;
            else
                a = mid;
        }
        eigs[k] = 0.5 * (a + b);
    }
    return eigs;
}

namespace {

void enumerate_tuples(const Ensemble& e, int m, bool distinct, std::vector<int>& idx,
                      std::vector<bool>& used, Matrix& acc) {
    if (static_cast<int>(idx.size()) == m) {
        Matrix prod = e[idx[0]].to_matrix();
        for (std::size_t k = 1; k < idx.size(); ++k) prod = prod * e[idx[k]].to_matrix();
        acc += prod;
        return;
    }
    for (int j = 0; j < e.size(); ++j) {
        if (distinct && used[j]) continue;
        used[j] = true;
        idx.push_back(j);
        enumerate_tuples(e, m, distinct, idx, used, acc);
        idx.pop_back();
        used[j] = false;
    }
}

}  // namespace

Matrix brute_full_tuple_sum_raw(const Ensemble& e, int m) {
    Matrix acc(e.dim(), e.dim());
    std::vector<int> idx;
    std::vector<bool> used(e.size(), false);
    enumerate_tuples(e, m, false, idx, used, acc);
    return acc;
}

Matrix brute_permutation_expectation_raw(const Ensemble& e, int m) {
    Matrix acc(e.dim(), e.dim());
    std::vector<int> idx;
    std::vector<bool> used(e.size(), false);
    enumerate_tuples(e, m, true, idx, used, acc);
    acc *= 1.0 / falling_factorial(e.size(), m);
    return acc;
}

SymMatrix psd_sqrt_checked(const SymMatrix& c) {
    const SymMatrix root =
        spectral_transform(c, [](double x) { return std::sqrt(std::max(x, 0.0)); });
    const SymMatrix square(root * root);
    const double res = (square - c).frobenius_norm() / std::max(1.0, c.frobenius_norm());
    if (res > 1e-11) throw std::runtime_error("psd_sqrt_checked: square does not reproduce input");
    return root;
}

SymMatrix random_symmetric(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) m.set(i, j, 2.0 * rng.next_double() - 1.0);
    return m;
}

SymMatrix random_psd(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.next_normal();
    SymMatrix w(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += g(i, k) * g(j, k);
            w.set(i, j, s);
        }
    return w;
}

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) { return (a - b).max_abs(); }

double rel_diff(const SymMatrix& a, const SymMatrix& b) {
    const double den = std::max(a.frobenius_norm(), b.frobenius_norm());
    const double num = (a - b).frobenius_norm();
    return den == 0.0 ? num : num / den;
}

}  // namespace ncamgm::testing
