#include "muonlab/orthogonalizer.hpp"

namespace muonlab {

OrthResult orthogonalize_exact(const Matrix& c, double rank_tol) {
  if (c.rows() < c.cols()) {
    throw DimensionError("orthogonalize_exact: requires rows >= cols");
  }
  if (frobenius_norm(c) == 0.0) {
    return {Matrix(c.rows(), c.cols()), true, OrthKind::ExactSvd};
  }
  const SvdFactors f = svd(c, rank_tol);
  return {matmul_bt(f.u, f.v), false, OrthKind::ExactSvd};
}

OrthResult newton_schulz5(const Matrix& c, const OrthMethod& method) {
  method.validate();
  if (c.rows() < c.cols()) {
    throw DimensionError("newton_schulz5: requires rows >= cols");
  }
  const double norm = frobenius_norm(c);
  if (norm == 0.0) {
    return {Matrix(c.rows(), c.cols()), true, OrthKind::NewtonSchulz5};
  }
  if (!c.all_finite()) {
    throw NumericError("newton_schulz5: input contains non-finite entries");
  }

  const std::size_t n = c.cols();
  const auto& [ca, cb, cc] = method.ns_coeffs;

  Matrix x = c * (1.0 / norm);
  for (int step = 0; step < method.ns_steps; ++step) {
    // (XX^T)X = X(X^T X) and (XX^T)^2 X = X(X^T X)^2, so work with the
    // smaller n x n Gram matrix.
    const Matrix g = matmul_at(x, x);
    Matrix poly = matmul(g, g) * cc;
    poly += g * cb;
    for (std::size_t i = 0; i < n; ++i) poly(i, i) += ca;
    x = matmul(x, poly);
    if (!x.all_finite()) {
      throw NumericError("newton_schulz5: iteration overflowed");
    }
  }
  return {std::move(x), false, OrthKind::NewtonSchulz5};
}

double ns_scalar_iterate(double x, const NsCoefficients& coeffs, int steps) {
  for (int k = 0; k < steps; ++k) {
    const double x2 = x * x;
    x = coeffs.a * x + coeffs.b * x2 * x + coeffs.c * x2 * x2 * x;
  }
  return x;
}

OrthResult orthogonalize(const Matrix& c, const OrthMethod& method) {
  switch (method.kind) {
    case OrthKind::ExactSvd:
      return orthogonalize_exact(c);
    case OrthKind::NewtonSchulz5:
      return newton_schulz5(c, method);
  }
  throw std::invalid_argument("orthogonalize: unknown method kind");
}

}  // namespace muonlab
