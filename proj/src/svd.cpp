#include "muonlab/svd.hpp"

#include <algorithm>
#include <numeric>

namespace muonlab {

namespace {

// Sweep limit for the Jacobi rotations; desk-scale matrices converge in a
// handful of sweeps.
constexpr int kMaxSweeps = 60;
constexpr double kConvergenceTol = 1e-14;

}  // namespace

SvdFactors svd(const Matrix& a, double rank_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw DimensionError("svd: requires rows >= cols");
  }
  if (!a.all_finite()) {
    throw NumericError("svd: input contains non-finite entries");
  }

  const double input_norm = frobenius_norm(a);
  if (input_norm == 0.0) {
    throw NumericError("svd: degenerate all-zero input");
  }

  // One-sided Jacobi: orthogonalize the columns of a working copy of `a`
  // by plane rotations, accumulating them into v.
  Matrix u = a;
  Matrix v = Matrix::identity(n);

  const double off_tol = kConvergenceTol * input_norm * input_norm;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          app += u(k, p) * u(k, p);
          aqq += u(k, q) * u(k, q);
          apq += u(k, p) * u(k, q);
        }
        if (std::abs(apq) <= off_tol ||
            std::abs(apq) <= kConvergenceTol * std::sqrt(app * aqq)) {
          continue;
        }
        converged = false;

        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0)
                             ? 1.0 / (zeta + std::sqrt(1.0 + zeta * zeta))
                             : -1.0 / (-zeta + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        for (std::size_t k = 0; k < m; ++k) {
          const double up = u(k, p);
          const double uq = u(k, q);
          u(k, p) = c * up - s * uq;
          u(k, q) = s * up + c * uq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vp = v(k, p);
          const double vq = v(k, q);
          v(k, p) = c * vp - s * vq;
          v(k, q) = s * vp + c * vq;
        }
      }
    }
    if (converged) break;
  }

  // Column norms are the singular values; sort descending.
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += u(k, j) * u(k, j);
    sigma[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  const double s_max = sigma[order[0]];
  const double cutoff = rank_tol * s_max;
  std::size_t r = 0;
  while (r < n && sigma[order[r]] > cutoff) ++r;
  if (r == 0) {
    throw NumericError("svd: numerically zero input after truncation");
  }

  SvdFactors out{Matrix(m, r), std::vector<double>(r), Matrix(n, r), r};
  for (std::size_t jj = 0; jj < r; ++jj) {
    const std::size_t j = order[jj];
    out.s[jj] = sigma[j];
    const double inv = 1.0 / sigma[j];
    for (std::size_t k = 0; k < m; ++k) out.u(k, jj) = u(k, j) * inv;
    for (std::size_t k = 0; k < n; ++k) out.v(k, jj) = v(k, j);
  }
  return out;
}

double nuclear_norm(const Matrix& a) {
  if (frobenius_norm(a) == 0.0) return 0.0;
  const bool wide = a.rows() < a.cols();
  const SvdFactors f = svd(wide ? a.transpose() : a);
  double acc = 0.0;
  for (double s : f.s) acc += s;
  return acc;
}

}  // namespace muonlab
