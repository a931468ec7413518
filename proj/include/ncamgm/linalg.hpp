#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ncamgm/matrix.hpp"

namespace ncamgm {

// Dense real symmetric matrix. Storage is the full square, kept exactly
// symmetric: every mutation writes both triangles, and construction from
// general data symmetrizes via (M + M^T)/2.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim);                              // zero matrix
    SymMatrix(int dim, const std::vector<double>& row_major); // symmetrizes
    explicit SymMatrix(const Matrix& m);                      // symmetrizes

    static SymMatrix identity(int dim);
    static SymMatrix diagonal(const std::vector<double>& d);

    int dim() const noexcept { return dim_; }

    double operator()(int i, int j) const {
        return e_[static_cast<std::size_t>(i) * dim_ + j];
    }
    // Writes both (i,j) and (j,i).
    void set(int i, int j, double v) {
        e_[static_cast<std::size_t>(i) * dim_ + j] = v;
        e_[static_cast<std::size_t>(j) * dim_ + i] = v;
    }

    const std::vector<double>& entries() const noexcept { return e_; }
    Matrix to_matrix() const;

    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    SymMatrix& operator+=(const SymMatrix& rhs);
    SymMatrix& operator-=(const SymMatrix& rhs);
    SymMatrix& operator*=(double s);

private:
    int dim_ = 0;
    std::vector<double> e_;
};

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator*(double s, SymMatrix m);

// General products of symmetric matrices are not symmetric; they live in
// Matrix until a caller symmetrizes a combination known to be symmetric.
Matrix operator*(const SymMatrix& a, const SymMatrix& b);
Matrix operator*(const SymMatrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const SymMatrix& b);

// Symmetrized triple product sym(x * middle * x); exact-arithmetic symmetric
// since x and middle are symmetric.
SymMatrix sandwich(const SymMatrix& x, const SymMatrix& middle);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    int sweeps_used = 0;
};

struct EigDecomposition {
    Spectrum spectrum;
    Matrix vectors;  // column j pairs with eigenvalues[j]
};

struct LoewnerCertificate {
    double min_eig = 0.0;  // smallest eigenvalue of the compared difference
    double tol = 0.0;      // absolute threshold applied
    bool holds = false;    // min_eig >= -tol
};

struct JacobiOptions {
    double rel_tol = 1e-13;  // stop when offdiag Frobenius <= rel_tol * ||M||_F
    int max_sweeps = 100;
};

// Cyclic Jacobi eigenvalues. Throws numerical_error with the relative
// off-diagonal residual if the sweep budget is exhausted.
Spectrum eig_sym(const SymMatrix& m, const JacobiOptions& opts = {});
EigDecomposition eig_sym_vectors(const SymMatrix& m, const JacobiOptions& opts = {});

// max |lambda| over the spectrum.
double op_norm(const SymMatrix& m, const JacobiOptions& opts = {});

// Largest singular value of a general square matrix, via sym(M^T M).
double spectral_norm(const Matrix& m, const JacobiOptions& opts = {});

// 1e-9 * max(1, ||A|| + ||B||): absolute threshold scaled to the operands.
double default_loewner_tol(const SymMatrix& a, const SymMatrix& b);

// Certificate for A <= B in the Loewner order: min eigenvalue of B - A.
LoewnerCertificate loewner_le(const SymMatrix& a, const SymMatrix& b, double tol,
                              const JacobiOptions& opts = {});
LoewnerCertificate loewner_le(const SymMatrix& a, const SymMatrix& b);

// PSD test: loewner_le(0, m, tol).
LoewnerCertificate psd_certificate(const SymMatrix& m, double tol,
                                   const JacobiOptions& opts = {});
LoewnerCertificate psd_certificate(const SymMatrix& m);

// sum_j coeffs[j] * M^j, result symmetrized.
SymMatrix matrix_poly(const SymMatrix& m, std::span<const double> coeffs);

// V f(Lambda) V^T for the eigendecomposition of m.
SymMatrix spectral_transform(const SymMatrix& m, const std::function<double(double)>& f);

}  // namespace ncamgm
