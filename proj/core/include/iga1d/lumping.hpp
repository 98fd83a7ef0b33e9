#pragma once

#include "iga1d/linalg.hpp"

namespace iga1d {

/// Row-sum lumping d_i = sum_j m_ij. Total mass is preserved. Throws
/// numerical_error on a non-positive lumped entry (CDM with such a mass is
/// meaningless).
DiagonalMatrix row_sum_lump(const Matrix& M);

/// Share of the total mass sitting on the main diagonal, sum m_ii / sum m_ij.
double diagonal_mass_fraction(const Matrix& M);

/// True iff every off-diagonal magnitude is at most tol times the largest
/// diagonal magnitude.
bool is_diagonal(const Matrix& M, double tol);

/// m_ii > sum_{j != i} |m_ij| for every row.
bool is_diagonally_dominant(const Matrix& M);

}  // namespace iga1d
