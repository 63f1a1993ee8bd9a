#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "muonlab/matrix.hpp"
#include "muonlab/rng.hpp"

namespace muonlab {

enum class ProblemKind { NoisyQuadratic, FiniteSumLeastSquares, TwoLayerNet };

/// A stochastic objective with known constants, so every theoretical bound
/// is computable without estimation. Oracles are immutable after
/// construction; gradient calls are pure given (w, stream).
class ProblemOracle {
 public:
  virtual ~ProblemOracle() = default;

  virtual ProblemKind kind() const = 0;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;

  /// Smoothness constant of Assumption 1.
  virtual double lipschitz() const = 0;
  /// Per-sample gradient variance cap of Assumption 2(ii). For the
  /// finite-sum problems this is certified on the declared operating
  /// region, not globally.
  virtual double sigma2() const = 0;
  virtual const Matrix& w_star() const = 0;
  virtual double f_star() const = 0;
  /// 0 for additive-noise problems (unbounded sample supply).
  virtual std::size_t n_samples() const = 0;

  virtual double loss(const Matrix& w) const = 0;
  virtual Matrix full_gradient(const Matrix& w) const = 0;

  /// Mean of `batch` per-sample stochastic gradients. The stream key fully
  /// determines the draw; the harness derives one stream per (run, step).
  virtual Matrix minibatch_gradient(const Matrix& w, long batch,
                                    std::uint64_t stream_seed) const = 0;

  void check_shape(const Matrix& w) const {
    if (w.rows() != rows() || w.cols() != cols()) {
      throw DimensionError("ProblemOracle: parameter shape mismatch");
    }
  }
};

/// f(W) = 1/2 ||A (W - W*)||_F^2 with diagonal A given by `spectrum`
/// (length m), plus Gaussian gradient noise with E||E||_F^2 = sigma2 per
/// sample. L = max(spectrum)^2, f* = 0, constants exact by construction.
std::unique_ptr<ProblemOracle> make_noisy_quadratic(
    std::size_t m, std::size_t n, std::vector<double> spectrum, double sigma2,
    Matrix w_star);

/// Convenience: isotropic spectrum (A = scale * I) and a w_star drawn from
/// the given seed with the requested Frobenius norm.
std::unique_ptr<ProblemOracle> make_noisy_quadratic_simple(
    std::size_t m, std::size_t n, double scale, double sigma2,
    double wstar_norm, std::uint64_t seed);

/// f_i(W) = 1/2 ||x_i^T W - y_i^T||_2^2 with y_i = W*^T x_i; exact
/// minibatching by sampling indices without replacement each step.
/// sigma2 is certified on the ball of radius region_radius around W*.
std::unique_ptr<ProblemOracle> make_finite_sum_least_squares(
    std::size_t m, std::size_t n, std::size_t n_samples, double region_radius,
    std::uint64_t seed);

/// Teacher-student one-hidden-layer tanh network; only the input weight
/// matrix trains. Constants L and sigma2 are numerically estimated on the
/// declared region (this problem exists for qualitative nonconvex curves).
std::unique_ptr<ProblemOracle> make_two_layer_net(std::size_t m, std::size_t n,
                                                  std::size_t n_samples,
                                                  double region_radius,
                                                  std::uint64_t seed);

struct ProblemConfig {
  ProblemKind kind = ProblemKind::NoisyQuadratic;
  std::size_t m = 16;
  std::size_t n = 8;
  double sigma2 = 1.0;
  std::vector<double> spectrum;  // empty => isotropic with scale 1
  double wstar_norm = 1.0;
  std::size_t n_samples = 256;
  double region_radius = 10.0;
  std::uint64_t seed = 0;
};

std::unique_ptr<ProblemOracle> make_problem(const ProblemConfig& cfg);

ProblemKind problem_kind_from_string(const std::string& s);
std::string to_string(ProblemKind kind);

/// Monte-Carlo audit of Assumptions 1-2 plus the 1/b variance law; every
/// experiment runs on an audited oracle.
struct AssumptionAudit {
  bool smoothness_ok = false;
  bool unbiased_ok = false;
  bool variance_ok = false;
  bool minimizer_ok = false;
  double worst_smoothness_ratio = 0.0;  // max ||dg||/(L ||dW||) observed
  double max_sample_variance = 0.0;
  double bias_norm = 0.0;

  bool all_ok() const {
    return smoothness_ok && unbiased_ok && variance_ok && minimizer_ok;
  }
};

AssumptionAudit audit_problem(const ProblemOracle& p, int trials,
                              std::uint64_t seed);

}  // namespace muonlab
