#pragma once

#include <utility>

#include "ncamgm/ensemble.hpp"
#include "ncamgm/linalg.hpp"
#include "ncamgm/symsum.hpp"

namespace ncamgm {

enum class InequalityForm { norm, variant };

// Both sides of one instance of the averaged-product inequality.
// margin >= 0 means the instance satisfies it; no pass/fail is embedded here,
// callers compare the margin against their own tolerance.
struct ConjectureReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs - rhs, exactly as computed
    int m = 0;
    int n = 0;
    double scale = 1.0;  // normalization factor applied (1 if none)
    InequalityForm form = InequalityForm::norm;
};

// Two-sided Loewner comparison of the permutation expectation against
// +-(1/n^m) I, evaluated after normalizing ||sum_j A_j|| to 1.
struct LoewnerFormReport {
    LoewnerCertificate upper_cert;  // E[...] <= (1/n^m) I
    LoewnerCertificate lower_cert;  // -(1/n^m) I <= E[...]
    SymMatrix expectation;
    double scale = 1.0;  // ||sum A_j|| of the input (1 if already normalized)
};

struct CheckOptions {
    JacobiOptions eig;
};

// Scales the ensemble so that ||sum_j A_j|| = 1; returns the scaled ensemble
// and the norm that was divided out. All-zero ensembles are rejected.
std::pair<Ensemble, double> normalize_ensemble(const Ensemble& e);

// Norm form: lhs = ||full tuple sum|| / n^m,
//            rhs = (n-m)!/n! * ||distinct tuple sum||.
ConjectureReport check_conjecture(const Ensemble& e, int m, const CheckOptions& opts = {});

// Loewner form on the normalized ensemble. If ||sum A_j|| differs from 1 by
// more than 1e-12 the ensemble is rescaled internally and the scale recorded.
LoewnerFormReport check_loewner_form(const Ensemble& e, int m, double tol,
                                     const CheckOptions& opts = {});

// Variant with the norms inside the sums:
//   lhs = (1/n^m) sum over all tuples of ||A_{j1} ... A_{jm}||,
//   rhs = (n-m)!/n! * the same sum over all-distinct tuples.
// Full enumeration: n <= 9 and m <= 4.
ConjectureReport check_variant(const Ensemble& e, int m, const CheckOptions& opts = {});

}  // namespace ncamgm
