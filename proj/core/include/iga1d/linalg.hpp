#pragma once

#include <cstddef>
#include <vector>

namespace iga1d {

/// Dense row-major matrix for desk-scale problems (n up to a few thousand).
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    Matrix transpose() const;
    double max_abs() const;
    /// max_i sum_j |a_ij|
    double inf_norm() const;
    bool is_symmetric(double rel_tol) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

struct DiagonalMatrix {
    std::vector<double> diag;

    int size() const { return static_cast<int>(diag.size()); }
};

Matrix operator*(const Matrix& A, const Matrix& B);
Matrix operator+(const Matrix& A, const Matrix& B);
Matrix operator-(const Matrix& A, const Matrix& B);
std::vector<double> operator*(const Matrix& A, const std::vector<double>& x);
std::vector<double> operator*(const DiagonalMatrix& D, const std::vector<double>& x);
Matrix operator*(const DiagonalMatrix& D, const Matrix& A);

/// LU factorization with partial pivoting; reusable for repeated solves.
class LuFactor {
public:
    explicit LuFactor(const Matrix& A);

    std::vector<double> solve(const std::vector<double>& b) const;
    Matrix solve(const Matrix& B) const;

private:
    int n_;
    Matrix lu_;
    std::vector<int> piv_;
};

/// Solves A x = b by LU with partial pivoting. Throws numerical_error on an
/// exact zero pivot.
std::vector<double> lu_solve(const Matrix& A, const std::vector<double>& b);

/// Dense inverse via LU. Throws numerical_error if singular.
Matrix invert(const Matrix& A);

/// Lower Cholesky factor of an SPD matrix. Throws numerical_error if the
/// matrix is not positive definite.
Matrix cholesky(const Matrix& A);

struct EigenResult {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // column k pairs with eigenvalues[k]
};

/// Solves K phi = lambda M phi for symmetric K and SPD M (dense or diagonal)
/// by Cholesky reduction to a standard symmetric problem and cyclic Jacobi
/// sweeps. Eigenvectors come back M-orthonormal, eigenvalues ascending.
EigenResult sym_generalized_eig(const Matrix& K, const Matrix& M);
EigenResult sym_generalized_eig(const Matrix& K, const DiagonalMatrix& M);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi.
EigenResult sym_eig(const Matrix& A);

/// Spectral condition number sigma_max/sigma_min from the eigenvalues of
/// A^T A. Returns +inf when sigma_min underflows to zero.
double condition_number_2(const Matrix& A);

/// Max |i-j| over entries with |a_ij| > tol * max|a|.
int bandwidth(const Matrix& A, double tol);

}  // namespace iga1d
