#pragma once

#include "muonlab/matrix.hpp"

namespace muonlab {

/// Thin SVD of an m x n matrix (m >= n): a = u * diag(s) * v^T with
/// orthonormal columns in u (m x r) and v (n x r), singular values strictly
/// positive and non-increasing. r is the numerical rank after truncating
/// values below rank_tol * s_max.
struct SvdFactors {
  Matrix u;
  std::vector<double> s;
  Matrix v;
  std::size_t rank;
};

inline constexpr double kDefaultRankTol = 1e-12;

/// One-sided Jacobi SVD. Requires rows >= cols and a nonzero input;
/// an all-zero matrix raises NumericError (callers decide the fallback).
SvdFactors svd(const Matrix& a, double rank_tol = kDefaultRankTol);

/// Sum of singular values.
double nuclear_norm(const Matrix& a);

}  // namespace muonlab
