#include "iga1d/lumping.hpp"

#include <cmath>

#include "iga1d/errors.hpp"

namespace iga1d {

DiagonalMatrix row_sum_lump(const Matrix& M) {
    const int n = M.rows();
    DiagonalMatrix D;
    D.diag.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += M(i, j);
        if (s <= 0.0) throw numerical_error("row_sum_lump: non-positive lumped mass entry");
        D.diag[i] = s;
    }
    return D;
}

double diagonal_mass_fraction(const Matrix& M) {
    double diag = 0.0, total = 0.0;
    for (int i = 0; i < M.rows(); ++i) {
        diag += M(i, i);
        for (int j = 0; j < M.cols(); ++j) total += M(i, j);
    }
    return diag / total;
}

bool is_diagonal(const Matrix& M, double tol) {
    double dmax = 0.0;
    for (int i = 0; i < M.rows(); ++i) dmax = std::max(dmax, std::fabs(M(i, i)));
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (i != j && std::fabs(M(i, j)) > tol * dmax) return false;
    return true;
}

bool is_diagonally_dominant(const Matrix& M) {
    for (int i = 0; i < M.rows(); ++i) {
        double off = 0.0;
        for (int j = 0; j < M.cols(); ++j)
            if (j != i) off += std::fabs(M(i, j));
        if (!(M(i, i) > off)) return false;
    }
    return true;
}

}  // namespace iga1d
