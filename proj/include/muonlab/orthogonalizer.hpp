#pragma once

#include "muonlab/matrix.hpp"
#include "muonlab/svd.hpp"

namespace muonlab {

enum class OrthKind { ExactSvd, NewtonSchulz5 };

/// Newton-Schulz quintic coefficients; defaults are the standard ones.
struct NsCoefficients {
  double a = 3.4445;
  double b = -4.7750;
  double c = 2.0315;
};

struct OrthMethod {
  OrthKind kind = OrthKind::ExactSvd;
  NsCoefficients ns_coeffs{};
  int ns_steps = 5;

  void validate() const {
    if (ns_steps < 1) {
      throw std::invalid_argument("OrthMethod: ns_steps must be >= 1");
    }
  }
};

struct OrthResult {
  Matrix o;
  bool degenerate = false;  // input was all-zero; o is the zero matrix
  OrthKind used = OrthKind::ExactSvd;
};

/// Polar factor U V^T from the SVD of c. For rank-deficient c returns the
/// truncated factor U_r V_r^T, so ||o||_F^2 = rank(c) <= n. An all-zero c
/// yields the zero matrix with degenerate = true.
OrthResult orthogonalize_exact(const Matrix& c,
                               double rank_tol = kDefaultRankTol);

/// Quintic Newton-Schulz iteration: X_0 = c/||c||_F, then ns_steps
/// applications of X <- aX + b(XX^T)X + c(XX^T)^2 X.
OrthResult newton_schulz5(const Matrix& c, const OrthMethod& method);

/// Evaluates the iteration's action on a single singular value: the scalar
/// fixed-point map g(x) = a x + b x^3 + c x^5 applied `steps` times.
double ns_scalar_iterate(double x, const NsCoefficients& coeffs, int steps);

/// Dispatch on method.kind.
OrthResult orthogonalize(const Matrix& c, const OrthMethod& method);

}  // namespace muonlab
