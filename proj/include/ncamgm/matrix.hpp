#pragma once

#include <cstddef>
#include <vector>

namespace ncamgm {

// Dense row-major real matrix. Used for general (possibly non-symmetric)
// intermediates such as ordered products and eigenvector bundles.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);  // zero-filled

    static Matrix identity(int n);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    double& operator()(int i, int j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transpose() const;
    double frobenius_norm() const;
    double max_abs() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix m);
std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

// out = a * b without allocating; out must not alias a or b.
void multiply_into(const Matrix& a, const Matrix& b, Matrix& out);

}  // namespace ncamgm
