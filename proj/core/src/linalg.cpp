#include "iga1d/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "iga1d/errors.hpp"

namespace iga1d {

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Matrix Matrix::transpose() const {
    Matrix T(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

double Matrix::inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

bool Matrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) return false;
    const double scale = max_abs();
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
}

Matrix operator*(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows(), B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int k = 0; k < A.cols(); ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols(); ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Matrix operator+(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) + B(i, j);
    return C;
}

Matrix operator-(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) - B(i, j);
    return C;
}

std::vector<double> operator*(const Matrix& A, const std::vector<double>& x) {
    std::vector<double> y(A.rows(), 0.0);
    for (int i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols(); ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> operator*(const DiagonalMatrix& D, const std::vector<double>& x) {
    std::vector<double> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = D.diag[i] * x[i];
    return y;
}

Matrix operator*(const DiagonalMatrix& D, const Matrix& A) {
    Matrix C(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C(i, j) = D.diag[i] * A(i, j);
    return C;
}

LuFactor::LuFactor(const Matrix& A) : n_(A.rows()), lu_(A), piv_(A.rows()) {
    if (A.rows() != A.cols()) throw numerical_error("lu: matrix must be square");
    std::iota(piv_.begin(), piv_.end(), 0);
    for (int k = 0; k < n_; ++k) {
        int pk = k;
        double pmax = std::fabs(lu_(k, k));
        for (int i = k + 1; i < n_; ++i) {
            if (std::fabs(lu_(i, k)) > pmax) {
                pmax = std::fabs(lu_(i, k));
                pk = i;
            }
        }
        if (pmax == 0.0) throw numerical_error("lu: singular matrix (zero pivot)");
        if (pk != k) {
            for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(pk, j));
            std::swap(piv_[k], piv_[pk]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n_; ++i) {
            const double l = lu_(i, k) * inv;
            lu_(i, k) = l;
            if (l == 0.0) continue;
            for (int j = k + 1; j < n_; ++j) lu_(i, j) -= l * lu_(k, j);
        }
    }
}

std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != n_) throw numerical_error("lu_solve: size mismatch");
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = b[piv_[i]];
    for (int i = 1; i < n_; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Matrix LuFactor::solve(const Matrix& B) const {
    Matrix X(n_, B.cols());
    std::vector<double> col(n_);
    for (int j = 0; j < B.cols(); ++j) {
        for (int i = 0; i < n_; ++i) col[i] = B(i, j);
        const auto x = solve(col);
        for (int i = 0; i < n_; ++i) X(i, j) = x[i];
    }
    return X;
}

std::vector<double> lu_solve(const Matrix& A, const std::vector<double>& b) {
    return LuFactor(A).solve(b);
}

Matrix invert(const Matrix& A) {
    return LuFactor(A).solve(Matrix::identity(A.rows()));
}

Matrix cholesky(const Matrix& A) {
    const int n = A.rows();
    Matrix L(n, n);
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= 0.0) throw numerical_error("cholesky: matrix not positive definite");
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

namespace {

// Cyclic Jacobi on a symmetric matrix. Sweeps until the off-diagonal
// Frobenius norm drops below 1e-12 * ||A||_F, at most 50 sweeps.
void jacobi(Matrix& A, Matrix& Q) {
    const int n = A.rows();
    Q = Matrix::identity(n);
    double fro = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro += A(i, j) * A(i, j);
    fro = std::sqrt(fro);
    const double thresh = 1e-12 * fro;

    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
        if (std::sqrt(off) <= thresh) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = A(p, p), aqq = A(q, q);
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = A(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = A(p, k) = akp - s * (akq + tau * akp);
                    A(k, q) = A(q, k) = akq + s * (akp - tau * akq);
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = Q(k, p), qkq = Q(k, q);
                    Q(k, p) = qkp - s * (qkq + tau * qkp);
                    Q(k, q) = qkq + s * (qkp - tau * qkq);
                }
            }
        }
    }
}

EigenResult sorted_eig(Matrix A) {
    const int n = A.rows();
    Matrix Q;
    jacobi(A, Q);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) < A(b, b); });
    EigenResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        r.eigenvalues[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i) r.eigenvectors(i, k) = Q(i, order[k]);
    }
    return r;
}

// Solves L X = B for lower-triangular L, column by column.
Matrix forward_solve(const Matrix& L, const Matrix& B) {
    const int n = L.rows();
    Matrix X(B);
    for (int j = 0; j < B.cols(); ++j) {
        for (int i = 0; i < n; ++i) {
            double s = X(i, j);
            for (int k = 0; k < i; ++k) s -= L(i, k) * X(k, j);
            X(i, j) = s / L(i, i);
        }
    }
    return X;
}

// Solves L^T X = B.
Matrix backward_solve_t(const Matrix& L, const Matrix& B) {
    const int n = L.rows();
    Matrix X(B);
    for (int j = 0; j < B.cols(); ++j) {
        for (int i = n - 1; i >= 0; --i) {
            double s = X(i, j);
            for (int k = i + 1; k < n; ++k) s -= L(k, i) * X(k, j);
            X(i, j) = s / L(i, i);
        }
    }
    return X;
}

}  // namespace

EigenResult sym_eig(const Matrix& A) {
    return sorted_eig(A);
}

EigenResult sym_generalized_eig(const Matrix& K, const Matrix& M) {
    if (!K.is_symmetric(1e-10)) throw numerical_error("sym_generalized_eig: K not symmetric");
    const Matrix L = cholesky(M);
    // C = L^-1 K L^-T
    const Matrix Y = forward_solve(L, K);
    const Matrix C = forward_solve(L, Y.transpose()).transpose();
    // enforce symmetry lost to roundoff
    Matrix Cs(C.rows(), C.cols());
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < C.cols(); ++j) Cs(i, j) = 0.5 * (C(i, j) + C(j, i));
    EigenResult r = sorted_eig(Cs);
    r.eigenvectors = backward_solve_t(L, r.eigenvectors);
    return r;
}

EigenResult sym_generalized_eig(const Matrix& K, const DiagonalMatrix& M) {
    const int n = M.size();
    Matrix Md(n, n);
    for (int i = 0; i < n; ++i) {
        if (M.diag[i] <= 0.0)
            throw numerical_error("sym_generalized_eig: diagonal mass not positive definite");
        Md(i, i) = M.diag[i];
    }
    return sym_generalized_eig(K, Md);
}

double condition_number_2(const Matrix& A) {
    const Matrix AtA = A.transpose() * A;
    const auto eig = sorted_eig(AtA);
    const double lmax = std::max(eig.eigenvalues.back(), 0.0);
    const double lmin = std::max(eig.eigenvalues.front(), 0.0);
    if (lmin == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(lmax / lmin);
}

int bandwidth(const Matrix& A, double tol) {
    const double cutoff = tol * A.max_abs();
    int bw = 0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (std::fabs(A(i, j)) > cutoff) bw = std::max(bw, std::abs(i - j));
    return bw;
}

}  // namespace iga1d
