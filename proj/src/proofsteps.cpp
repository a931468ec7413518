#include "ncamgm/proofsteps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "ncamgm/conjecture.hpp"
#include "ncamgm/errors.hpp"
#include "ncamgm/rng.hpp"
#include "ncamgm/symsum.hpp"

namespace ncamgm {

double ChainReport::worst_min_eig() const {
    double w = std::numeric_limits<double>::infinity();
    for (const ChainStep& s : step_certificates) w = std::min(w, s.cert.min_eig);
    return w;
}

double ChainReport::max_residual() const {
    double w = 0.0;
    for (const IdentityResidual& r : identity_residuals) w = std::max(w, r.residual);
    return w;
}

namespace {

// Residual relative to the expression scale, floored at 1. The callers all
// work on normalized inputs (members bounded by the identity), so expressions
// are O(1) and the floor stops rounding junk from inflating the ratio when
// both sides vanish.
double scaled_residual(const SymMatrix& p, const SymMatrix& q) {
    const double num = (p - q).frobenius_norm();
    return num / std::max({1.0, p.frobenius_norm(), q.frobenius_norm()});
}

// Average of term(i1, i2, i3) over all 6 orderings of {0, 1, 2}.
SymMatrix perm_expect3(int dim, const std::function<Matrix(int, int, int)>& term) {
    static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                         {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Matrix acc(dim, dim);
    for (const auto& p : kPerms) acc += term(p[0], p[1], p[2]);
    acc *= 1.0 / 6.0;
    return SymMatrix(acc);
}

SymMatrix scaled_identity(int dim, double v) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, v);
    return m;
}

}  // namespace

std::pair<SymMatrix, LoewnerCertificate> lemma1_gap(const SymMatrix& a, const SymMatrix& b,
                                                    const SymMatrix& c) {
    if (a.dim() != b.dim() || a.dim() != c.dim())
        throw input_error("lemma1_gap: dimension mismatch");
    const LoewnerCertificate c_psd = psd_certificate(c);
    if (!c_psd.holds)
        throw precondition_error("lemma1_gap: C is not PSD (min eigenvalue " +
                                 std::to_string(c_psd.min_eig) + ")");

    const Matrix am = a.to_matrix();
    const Matrix bm = b.to_matrix();
    const Matrix cm = c.to_matrix();
    const SymMatrix gap(am * cm * am + bm * cm * bm - am * cm * bm - bm * cm * am);

    // Same matrix as the rank-factorized form (A-B)C(A-B). Residual is
    // relative to the scale of the triple products that build both sides.
    const SymMatrix factored = sandwich(a - b, c);
    const double ab = a.frobenius_norm() + b.frobenius_norm();
    const double scale = std::max(1.0, ab * ab * c.frobenius_norm());
    const double res = (gap - factored).frobenius_norm() / scale;
    if (res > 1e-11)
        throw numerical_error("lemma1_gap: expansion does not match (A-B)C(A-B)", res);

    return {gap, psd_certificate(gap)};
}

LoewnerCertificate lemma2_check(const SymMatrix& a, const SymMatrix& b, const SymMatrix& c,
                                double tol) {
    const LoewnerCertificate pre = loewner_le(a, b, tol);
    if (!pre.holds)
        throw precondition_error("lemma2_check: A <= B does not hold (min eigenvalue " +
                                 std::to_string(pre.min_eig) + ")");
    return loewner_le(sandwich(c, a), sandwich(c, b), tol);
}

ChainReport chain_check(const Ensemble& e, ChainDirection direction, double tol) {
    if (e.size() != 3) throw input_error("chain_check: ensemble must have exactly 3 members");
    const int d = e.dim();

    ChainReport rep;
    const double sum_norm = op_norm(e.member_sum());
    const Ensemble* triple = &e;
    Ensemble scaled = e;
    if (sum_norm > 1.0 + 1e-12) {
        scaled = normalize_ensemble(e).first;
        rep.scale = sum_norm;
        triple = &scaled;
    }
    const Ensemble& t = *triple;
    const Matrix id = Matrix::identity(d);

    auto member = [&](int i) { return t[i].to_matrix(); };

    const SymMatrix e_prod = perm_expect3(
        d, [&](int i1, int i2, int i3) { return member(i1) * member(i2) * member(i3); });
    const SymMatrix quarter_id = scaled_identity(d, 4.0 / 27.0);
    const SymMatrix endpoint_id = scaled_identity(d, 1.0 / 27.0);

    if (direction == ChainDirection::upper) {
        const SymMatrix e_plus = perm_expect3(d, [&](int i1, int i2, int i3) {
            const Matrix outer = member(i1) + member(i3);
            return outer * member(i2) * outer;
        });
        const SymMatrix e_plus_comp = perm_expect3(d, [&](int i1, int /*i2*/, int i3) {
            const Matrix outer = member(i1) + member(i3);
            return outer * (id - outer) * outer;
        });
        rep.step_certificates.push_back(
            {"pairing_bound", loewner_le(e_prod, SymMatrix(0.25 * e_plus.to_matrix()), tol)});
        rep.step_certificates.push_back(
            {"middle_complement_bound", loewner_le(e_plus, e_plus_comp, tol)});
        rep.step_certificates.push_back(
            {"cubic_scalar_bound", loewner_le(e_plus_comp, quarter_id, tol)});
        rep.step_certificates.push_back({"endpoint", loewner_le(e_prod, endpoint_id, tol)});
    } else {
        const SymMatrix e_minus = perm_expect3(d, [&](int i1, int i2, int i3) {
            const Matrix outer = member(i1) - member(i3);
            return outer * member(i2) * outer;
        });
        rep.step_certificates.push_back(
            {"pairing_bound",
             loewner_le(SymMatrix(-1.0 * e_prod.to_matrix()),
                        SymMatrix(0.25 * e_minus.to_matrix()), tol)});
        rep.step_certificates.push_back(
            {"difference_quadratic_bound", loewner_le(e_minus, quarter_id, tol)});
        rep.step_certificates.push_back(
            {"endpoint", loewner_le(SymMatrix(-1.0 * endpoint_id.to_matrix()), e_prod, tol)});
    }

    // The 6-ordering average must agree with the scaled distinct-tuple sum.
    rep.identity_residuals.push_back(
        {"permutation_expectation_consistency", scaled_residual(e_prod, permutation_expectation(t, 3))});

    rep.all_hold = true;
    for (const ChainStep& s : rep.step_certificates) rep.all_hold &= s.cert.holds;
    for (const IdentityResidual& r : rep.identity_residuals)
        rep.all_hold &= r.residual <= rep.residual_threshold;
    return rep;
}

ShiftResult shift_to_identity_partition(const Ensemble& e) {
    if (e.size() != 3)
        throw input_error("shift_to_identity_partition: ensemble must have exactly 3 members");
    const int d = e.dim();
    const SymMatrix sum = e.member_sum();
    const SymMatrix id = SymMatrix::identity(d);
    const LoewnerCertificate below_id = loewner_le(sum, id, default_loewner_tol(sum, id));
    if (!below_id.holds)
        throw precondition_error(
            "shift_to_identity_partition: sum of members is not <= I (min eigenvalue " +
            std::to_string(below_id.min_eig) + ")");

    const SymMatrix shift = (1.0 / 3.0) * (id - sum);
    std::vector<SymMatrix> shifted;
    shifted.reserve(3);
    for (const SymMatrix& m : e.members()) shifted.push_back(m + shift);

    ShiftResult out{Ensemble(std::move(shifted)), LoewnerCertificate{}, 0.0};
    out.sum_residual = (out.shifted.member_sum() - id).frobenius_norm() / std::sqrt(d);

    auto diff_form = [&](const Ensemble& t) {
        return perm_expect3(d, [&](int i1, int i2, int i3) {
            const Matrix outer = t[i1].to_matrix() - t[i3].to_matrix();
            return outer * t[i2].to_matrix() * outer;
        });
    };
    const SymMatrix before = diff_form(e);
    const SymMatrix after = diff_form(out.shifted);
    out.monotonicity = loewner_le(before, after, default_loewner_tol(before, after));
    return out;
}

Lower4Report lower4_identity_check(const Ensemble& e, double tol) {
    if (e.size() != 3)
        throw input_error("lower4_identity_check: ensemble must have exactly 3 members");
    const int d = e.dim();
    const SymMatrix id = SymMatrix::identity(d);
    const double partition_gap = op_norm(e.member_sum() - id);
    if (partition_gap > 1e-10)
        throw precondition_error(
            "lower4_identity_check: members must sum to the identity (gap " +
            std::to_string(partition_gap) + ")");

    const Matrix idm = Matrix::identity(d);
    auto member = [&](int i) { return e[i].to_matrix(); };

    const SymMatrix l1 = perm_expect3(d, [&](int i1, int i2, int i3) {
        const Matrix outer = member(i1) - member(i3);
        return outer * member(i2) * outer;
    });
    const SymMatrix l2 = perm_expect3(d, [&](int i1, int i2, int i3) {
        const Matrix x = member(i1), y = member(i2), z = member(i3);
        const Matrix outer = x + z;
        return 2.0 * (x * y * x) + 2.0 * (z * y * z) - outer * y * outer;
    });
    const SymMatrix l3 = perm_expect3(d, [&](int i1, int i2, int i3) {
        const Matrix x = member(i1), y = member(i2), z = member(i3);
        const Matrix inner = x + z;
        return 2.0 * (y * inner * y) - inner * y * inner;
    });
    const SymMatrix l4 = perm_expect3(d, [&](int /*i1*/, int i2, int /*i3*/) {
        const Matrix y = member(i2);
        const Matrix comp = idm - y;
        return 2.0 * (y * comp * y) - comp * y * comp;
    });

    const double cubic_coeffs[] = {0.0, -1.0, 4.0, -3.0};
    const double shifted_cubic_coeffs[] = {0.0, -13.0 / 9.0, 4.0, -3.0};
    SymMatrix l5(d);
    SymMatrix shifted_cubic_mean(d);
    for (const SymMatrix& a : e.members()) {
        l5 += matrix_poly(a, cubic_coeffs);
        shifted_cubic_mean += matrix_poly(a, shifted_cubic_coeffs);
    }
    l5 *= 1.0 / 3.0;
    shifted_cubic_mean *= 1.0 / 3.0;
    const SymMatrix l6 = scaled_identity(d, 4.0 / 27.0) + shifted_cubic_mean;

    // Exchangeability primitive the rewrites lean on: E[XYX] == E[YXY].
    const SymMatrix xyx = perm_expect3(
        d, [&](int i1, int i2, int) { return member(i1) * member(i2) * member(i1); });
    const SymMatrix yxy = perm_expect3(
        d, [&](int i1, int i2, int) { return member(i2) * member(i1) * member(i2); });

    Lower4Report rep;
    rep.links.push_back({"expand_square", scaled_residual(l1, l2)});
    rep.links.push_back({"swap_middle", scaled_residual(l2, l3)});
    rep.links.push_back({"substitute_complement", scaled_residual(l3, l4)});
    rep.links.push_back({"collect_cubic", scaled_residual(l4, l5)});
    rep.links.push_back({"split_mean", scaled_residual(l5, l6)});
    rep.links.push_back({"exchangeability", scaled_residual(xyx, yxy)});
    rep.links.push_back({"end_to_end", scaled_residual(l1, l6)});

    const SymMatrix zero(d);
    for (int i = 0; i < 3; ++i) {
        rep.cubic_certificates.push_back(
            {"cubic_nonpositive_member_" + std::to_string(i),
             loewner_le(matrix_poly(e[i], shifted_cubic_coeffs), zero, tol)});
    }

    rep.max_residual = 0.0;
    for (const IdentityResidual& r : rep.links) rep.max_residual = std::max(rep.max_residual, r.residual);
    rep.all_hold = rep.max_residual <= 1e-10;
    for (const ChainStep& s : rep.cubic_certificates) rep.all_hold &= s.cert.holds;
    return rep;
}

namespace {

double poly_eval(std::span<const double> c, double x) {
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
    return v;
}

int poly_degree(std::span<const double> c) {
    for (std::size_t j = c.size(); j-- > 0;)
        if (c[j] != 0.0) return static_cast<int>(j);
    return -1;
}

std::vector<double> poly_derivative(std::span<const double> c) {
    std::vector<double> d;
    for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
    return d;
}

double bisect_root(std::span<const double> c, double lo, double hi) {
    double flo = poly_eval(c, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)})) return mid;
        const double fmid = poly_eval(c, mid);
        if (fmid == 0.0) return mid;
        if ((flo < 0.0) != (fmid < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

// All real roots of the polynomial inside [lo, hi]: between consecutive
// critical points the polynomial is monotonic, so sign changes bracket
// exactly one root each.
std::vector<double> poly_roots_in(std::span<const double> c, double lo, double hi) {
    const int deg = poly_degree(c);
    std::vector<double> roots;
    if (deg <= 0) return roots;
    if (deg == 1) {
        const double r = -c[0] / c[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    const std::vector<double> deriv = poly_derivative(c);
    std::vector<double> pts = poly_roots_in(deriv, lo, hi);
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double fa = poly_eval(c, a);
        const double fb = poly_eval(c, b);
        if (fa == 0.0) roots.push_back(a);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
            roots.push_back(bisect_root(c, a, b));
    }
    if (poly_eval(c, hi) == 0.0) roots.push_back(hi);

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) { return std::abs(x - y) <= 1e-13; }),
                roots.end());
    return roots;
}

}  // namespace

ScalarBoundResult scalar_poly_max(std::span<const double> coeffs, double lo, double hi) {
    if (!(lo < hi)) throw input_error("scalar_poly_max: interval must satisfy lo < hi");
    if (poly_degree(coeffs) > 6) throw input_error("scalar_poly_max: degree must be <= 6");

    std::vector<double> candidates = poly_roots_in(poly_derivative(coeffs), lo, hi);
    candidates.push_back(lo);
    candidates.push_back(hi);
    std::sort(candidates.begin(), candidates.end());

    ScalarBoundResult out;
    out.interval = {lo, hi};
    out.max_value = -std::numeric_limits<double>::infinity();
    for (double x : candidates) {
        const double v = poly_eval(coeffs, x);
        if (v > out.max_value) {
            out.max_value = v;
            out.argmax = x;
        }
    }
    return out;
}

BlockAggregateReport block_aggregate_identity(const Ensemble& e, int k, int n0, int m,
                                              double tol, std::uint64_t sample_seed,
                                              int sample_count) {
    if (k < 1 || n0 < 1 || m < 1)
        throw input_error("block_aggregate_identity: k, n0, m must be >= 1");
    if (e.size() != k * n0)
        throw input_error("block_aggregate_identity: n must equal k*n0 (n = " +
                          std::to_string(e.size()) + ", k*n0 = " + std::to_string(k * n0) + ")");
    if (m > n0)
        throw input_error("block_aggregate_identity: m must be <= n0 for the inner expectation");

    BlockAggregateReport rep;
    rep.k = k;
    rep.n0 = n0;
    rep.m = m;

    const double sum_norm = op_norm(e.member_sum());
    const Ensemble* input = &e;
    Ensemble scaled = e;
    if (std::abs(sum_norm - 1.0) > 1e-12) {
        scaled = normalize_ensemble(e).first;
        rep.scale = sum_norm;
        input = &scaled;
    }
    const Ensemble& t = *input;
    const int n = t.size();
    const int d = t.dim();

    const SymMatrix lhs = permutation_expectation(t, m);

    rep.worst_upper.min_eig = std::numeric_limits<double>::infinity();
    rep.worst_lower.min_eig = std::numeric_limits<double>::infinity();

    SymMatrix acc(d);
    auto process_ordering = [&](const std::vector<int>& order) {
        std::vector<SymMatrix> blocks;
        blocks.reserve(n0);
        for (int l = 0; l < n0; ++l) {
            SymMatrix s(d);
            for (int j = 0; j < k; ++j) s += t[order[l * k + j]];
            blocks.push_back(std::move(s));
        }
        const Ensemble block_ensemble(std::move(blocks));
        const LoewnerFormReport inner = check_loewner_form(block_ensemble, m, tol);
        acc += inner.expectation;
        if (inner.upper_cert.min_eig < rep.worst_upper.min_eig) rep.worst_upper = inner.upper_cert;
        if (inner.lower_cert.min_eig < rep.worst_lower.min_eig) rep.worst_lower = inner.lower_cert;
        ++rep.outer_permutations;
    };

    if (n <= 8) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        do {
            process_ordering(order);
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        // n! is out of reach; the residual becomes a sampled estimate.
        rep.sampled = true;
        SplitMix64 rng(sample_seed);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (int s = 0; s < sample_count; ++s) {
            rng.shuffle(order);
            process_ordering(order);
        }
    }

    acc *= 1.0 / (static_cast<double>(rep.outer_permutations) * std::pow(k, m));
    rep.residual = scaled_residual(lhs, acc);
    return rep;
}

}  // namespace ncamgm
