#include "ncamgm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ncamgm/errors.hpp"

namespace ncamgm {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw input_error("SymMatrix: dim must be >= 1");
    e_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

SymMatrix::SymMatrix(int dim, const std::vector<double>& row_major) : SymMatrix(dim) {
    if (row_major.size() != static_cast<std::size_t>(dim) * dim)
        throw input_error("SymMatrix: entry count does not match dim*dim");
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = 0.5 * (row_major[static_cast<std::size_t>(i) * dim + j] +
                                    row_major[static_cast<std::size_t>(j) * dim + i]);
            set(i, j, v);
        }
}

SymMatrix::SymMatrix(const Matrix& m) : SymMatrix(m.rows()) {
    if (m.rows() != m.cols()) throw input_error("SymMatrix: matrix not square");
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) set(i, j, 0.5 * (m(i, j) + m(j, i)));
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
    return m;
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : e_) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : e_) m = std::max(m, std::abs(v));
    return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
    if (dim_ != rhs.dim_) throw input_error("SymMatrix +=: dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += rhs.e_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
    if (dim_ != rhs.dim_) throw input_error("SymMatrix -=: dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= rhs.e_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : e_) v *= s;
    return *this;
}

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) {
    lhs += rhs;
    return lhs;
}

SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) {
    lhs -= rhs;
    return lhs;
}

SymMatrix operator*(double s, SymMatrix m) {
    m *= s;
    return m;
}

Matrix operator*(const SymMatrix& a, const SymMatrix& b) {
    return a.to_matrix() * b.to_matrix();
}

Matrix operator*(const SymMatrix& a, const Matrix& b) { return a.to_matrix() * b; }

Matrix operator*(const Matrix& a, const SymMatrix& b) { return a * b.to_matrix(); }

SymMatrix sandwich(const SymMatrix& x, const SymMatrix& middle) {
    return SymMatrix(x * (middle * x));
}

namespace {

double offdiag_frobenius(const std::vector<double>& a, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = a[static_cast<std::size_t>(i) * d + j];
            s += 2.0 * v * v;
        }
    return std::sqrt(s);
}

// One cyclic sweep of two-sided Jacobi rotations over all (p, q) pairs.
void jacobi_sweep(std::vector<double>& a, int d, Matrix* v) {
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * d + j];
    };
    for (int p = 0; p < d - 1; ++p) {
        for (int q = p + 1; q < d; ++q) {
            const double apq = at(p, q);
            if (apq == 0.0) continue;
            const double app = at(p, p);
            const double aqq = at(q, q);
            const double theta = (aqq - app) / (2.0 * apq);
            const double t =
                (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            at(p, p) = app - t * apq;
            at(q, q) = aqq + t * apq;
            at(p, q) = at(q, p) = 0.0;
            for (int i = 0; i < d; ++i) {
                if (i == p || i == q) continue;
                const double aip = at(i, p);
                const double aiq = at(i, q);
                at(i, p) = at(p, i) = c * aip - s * aiq;
                at(i, q) = at(q, i) = s * aip + c * aiq;
            }
            if (v) {
                for (int i = 0; i < d; ++i) {
                    const double vip = (*v)(i, p);
                    const double viq = (*v)(i, q);
                    (*v)(i, p) = c * vip - s * viq;
                    (*v)(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

EigDecomposition jacobi_eig(const SymMatrix& m, bool want_vectors, const JacobiOptions& opts) {
    const int d = m.dim();
    std::vector<double> a = m.entries();
    Matrix v;
    if (want_vectors) v = Matrix::identity(d);

    const double fro = m.frobenius_norm();
    const double threshold = opts.rel_tol * fro;

    int sweeps = 0;
    double off = offdiag_frobenius(a, d);
    while (off > threshold) {
        if (sweeps >= opts.max_sweeps) {
            throw numerical_error(
                "eig_sym: Jacobi iteration did not converge in " +
                    std::to_string(opts.max_sweeps) + " sweeps",
                fro > 0.0 ? off / fro : off);
        }
        jacobi_sweep(a, d, want_vectors ? &v : nullptr);
        ++sweeps;
        off = offdiag_frobenius(a, d);
    }

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a[static_cast<std::size_t>(x) * d + x] < a[static_cast<std::size_t>(y) * d + y];
    });

    EigDecomposition out;
    out.spectrum.eigenvalues.resize(d);
    out.spectrum.sweeps_used = sweeps;
    for (int j = 0; j < d; ++j)
        out.spectrum.eigenvalues[j] = a[static_cast<std::size_t>(order[j]) * d + order[j]];
    if (want_vectors) {
        out.vectors = Matrix(d, d);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

}  // namespace

Spectrum eig_sym(const SymMatrix& m, const JacobiOptions& opts) {
    return jacobi_eig(m, false, opts).spectrum;
}

EigDecomposition eig_sym_vectors(const SymMatrix& m, const JacobiOptions& opts) {
    return jacobi_eig(m, true, opts);
}

double op_norm(const SymMatrix& m, const JacobiOptions& opts) {
    const Spectrum s = eig_sym(m, opts);
    return std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
}

double spectral_norm(const Matrix& m, const JacobiOptions& opts) {
    if (m.rows() != m.cols()) throw input_error("spectral_norm: matrix not square");
    const SymMatrix mtm(m.transpose() * m);
    const Spectrum s = eig_sym(mtm, opts);
    return std::sqrt(std::max(s.eigenvalues.back(), 0.0));
}

double default_loewner_tol(const SymMatrix& a, const SymMatrix& b) {
    return 1e-9 * std::max(1.0, op_norm(a) + op_norm(b));
}

LoewnerCertificate loewner_le(const SymMatrix& a, const SymMatrix& b, double tol,
                              const JacobiOptions& opts) {
    if (a.dim() != b.dim()) throw input_error("loewner_le: dimension mismatch");
    if (tol < 0.0) throw input_error("loewner_le: tol must be >= 0");
    const SymMatrix diff = b - a;
    LoewnerCertificate cert;
    cert.min_eig = eig_sym(diff, opts).eigenvalues.front();
    cert.tol = tol;
    cert.holds = cert.min_eig >= -tol;
    return cert;
}

LoewnerCertificate loewner_le(const SymMatrix& a, const SymMatrix& b) {
    return loewner_le(a, b, default_loewner_tol(a, b));
}

LoewnerCertificate psd_certificate(const SymMatrix& m, double tol, const JacobiOptions& opts) {
    return loewner_le(SymMatrix(m.dim()), m, tol, opts);
}

LoewnerCertificate psd_certificate(const SymMatrix& m) {
    return loewner_le(SymMatrix(m.dim()), m);
}

SymMatrix matrix_poly(const SymMatrix& m, std::span<const double> coeffs) {
    if (coeffs.empty()) return SymMatrix(m.dim());
    const int d = m.dim();
    Matrix acc(d, d);
    for (int i = 0; i < d; ++i) acc(i, i) = coeffs[0];
    Matrix power = Matrix::identity(d);
    Matrix scratch(d, d);
    const Matrix base = m.to_matrix();
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
        multiply_into(power, base, scratch);
        std::swap(power, scratch);
        if (coeffs[j] == 0.0) continue;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) acc(i, k) += coeffs[j] * power(i, k);
    }
    return SymMatrix(acc);
}

SymMatrix spectral_transform(const SymMatrix& m, const std::function<double(double)>& f) {
    const EigDecomposition eig = eig_sym_vectors(m);
    const int d = m.dim();
    std::vector<double> fv(d);
    for (int k = 0; k < d; ++k) fv[k] = f(eig.spectrum.eigenvalues[k]);
    SymMatrix out(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += fv[k] * eig.vectors(i, k) * eig.vectors(j, k);
            out.set(i, j, s);
        }
    return out;
}

}  // namespace ncamgm
