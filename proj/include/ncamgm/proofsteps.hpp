#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncamgm/ensemble.hpp"
#include "ncamgm/linalg.hpp"

namespace ncamgm {

struct ChainStep {
    std::string label;
    LoewnerCertificate cert;
};

struct IdentityResidual {
    std::string label;
    double residual;  // relative Frobenius residual
};

// One verified inequality chain: ordered Loewner certificates plus the exact
// identities that connect them.
struct ChainReport {
    std::vector<ChainStep> step_certificates;
    std::vector<IdentityResidual> identity_residuals;
    bool all_hold = false;
    double scale = 1.0;  // normalization applied to the input triple (1 if none)
    double residual_threshold = 1e-10;

    double worst_min_eig() const;
    double max_residual() const;
};

enum class ChainDirection { upper, lower };

// G = ACA + BCB - ACB - BCA (symmetrized) with its PSD certificate.
// A, B symmetric, C PSD; also cross-checks G == (A-B)C(A-B).
std::pair<SymMatrix, LoewnerCertificate> lemma1_gap(const SymMatrix& a, const SymMatrix& b,
                                                    const SymMatrix& c);

// Given A <= B (verified), certificate for CAC <= CBC.
LoewnerCertificate lemma2_check(const SymMatrix& a, const SymMatrix& b, const SymMatrix& c,
                                double tol);

// Verifies the three-factor product chain for a triple, link by link, with
// expectations taken exactly over all 6 orderings.
//   upper: E[XYZ] <= (1/4)E[(X+Z)Y(X+Z)] <= E[(X+Z)(I-X-Z)(X+Z)] <= (4/27)I,
//          endpoint E[XYZ] <= (1/27)I.
//   lower: -E[XYZ] <= (1/4)E[(X-Z)Y(X-Z)], E[(X-Z)Y(X-Z)] <= (4/27)I,
//          endpoint -(1/27)I <= E[XYZ].
// Requires sum A_i <= I; rescales and records the scale otherwise.
ChainReport chain_check(const Ensemble& e, ChainDirection direction, double tol = 1e-10);

struct ShiftResult {
    Ensemble shifted;                // {A_i + D}, D = (I - sum A_i)/3
    LoewnerCertificate monotonicity; // E[(X-Z)Y(X-Z)] <= shifted counterpart
    double sum_residual;             // || sum shifted - I ||_F / sqrt(dim)
};

// Requires sum A_i <= I (within tolerance). The shifted triple sums to the
// identity; shifting only grows the middle factor of the difference form.
ShiftResult shift_to_identity_partition(const Ensemble& e);

// For a partition of identity, re-derives E[(X-Z)Y(X-Z)] through its equality
// rewrites down to (4/27)I + E[-(13/9)Y + 4Y^2 - 3Y^3], reporting each link's
// relative residual and the PSD certificate of the final cubic bound.
struct Lower4Report {
    double max_residual = 0.0;
    std::vector<IdentityResidual> links;
    std::vector<ChainStep> cubic_certificates;  // -(13/9)A + 4A^2 - 3A^3 <= 0
    bool all_hold = false;
};

Lower4Report lower4_identity_check(const Ensemble& e, double tol = 1e-10);

struct ScalarBoundResult {
    double max_value = 0.0;
    double argmax = 0.0;
    std::pair<double, double> interval{0.0, 0.0};
};

// Exact maximum of sum_j coeffs[j] x^j over [lo, hi]: bisection-isolated
// derivative roots plus endpoint comparison. Degree <= 6.
ScalarBoundResult scalar_poly_max(std::span<const double> coeffs, double lo, double hi);

struct BlockAggregateReport {
    double residual = 0.0;           // relative residual of the block-averaging identity
    LoewnerCertificate worst_upper;  // worst inner upper certificate over outer orderings
    LoewnerCertificate worst_lower;
    long long outer_permutations = 0;
    bool sampled = false;  // true when n! was subsampled (n > 8); residual is then an estimate
    double scale = 1.0;
    int k = 1;
    int n0 = 1;
    int m = 1;
};

// For n = k*n0: checks that the permutation expectation of m-fold products
// equals 1/k^m times the doubly-averaged block-sum expectation, and applies
// the two-sided Loewner check to every block-sum ensemble along the way.
BlockAggregateReport block_aggregate_identity(const Ensemble& e, int k, int n0, int m,
                                              double tol = 1e-9,
                                              std::uint64_t sample_seed = 0,
                                              int sample_count = 2000);

}  // namespace ncamgm
