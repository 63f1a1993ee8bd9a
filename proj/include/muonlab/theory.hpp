#pragma once

#include <string>
#include <vector>

#include "muonlab/matrix.hpp"

namespace muonlab {

enum class MuonVariant { NoNesterovNoWd, NesterovNoWd, NoNesterovWd, NesterovWd };

MuonVariant variant_from(bool nesterov, bool weight_decay);
std::string to_string(MuonVariant v);

class StabilityConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleBatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every symbol appearing in the convergence theorems and norm-bound
/// propositions. `delta` stores the unsquared norm ||M_0 - grad f(W_0)||_F;
/// the bound expressions use both powers.
struct BoundConstants {
  double L = 1.0;
  double sigma2 = 0.0;
  std::size_t n = 1;
  double f_w0 = 0.0;
  double w0_norm = 0.0;
  double wstar_norm = 0.0;
  double delta = 0.0;
  double eta = 0.01;
  double lambda = 0.0;
  double beta = 0.95;
  /// Optional lower bound on f used to tighten the 1/T transient; the
  /// stated bound uses 0 (i.e. the plain f(W_0)/(eta T) form).
  double f_lower_bound = 0.0;

  double beta_bar() const { return (2.0 * beta + 1.0) * (1.0 - beta) / 2.0; }
  double nu() const {
    return std::sqrt(2.0 * (1.0 - beta) * static_cast<double>(n));
  }
  double gamma() const { return L * eta / (1.0 - beta); }
  double rho() const { return (1.0 + 2.0 * (1.0 + L * eta) * lambda) / 2.0; }
  double d0() const {
    return L * (w0_norm + std::sqrt(static_cast<double>(n)) / lambda +
                wstar_norm);
  }

  void require_stability() const {
    if (!(lambda > 0.0) || eta > 1.0 / lambda) {
      throw StabilityConditionError(
          "bound requires lambda > 0 and eta <= 1/lambda");
    }
  }
};

/// ||W_t||_F bound under weight decay with eta <= 1/lambda.
double param_norm_bound(const BoundConstants& c, long t);

/// ||grad f(W_t)||_F bound; implements the proof's L sqrt(n)/lambda form
/// (the displayed statement drops the sqrt(n); both coincide at n = 1).
double grad_norm_bound(const BoundConstants& c, long t);

/// Bound on the running average (1/T) sum ||grad f(W_t)||_F, weight-decay
/// setting.
double avg_grad_bound_corollary(const BoundConstants& c, long T);

/// Per-step bound on E||M_t - grad f(W_t)||_F^2.
double momentum_tracking_bound(const BoundConstants& c, long t, long b);

/// Full right-hand side of the matching convergence theorem, split into
/// named terms plus the X/T + Y/b + sublinear(b) + Z ledger. The
/// sqrt(sigma2/b) terms sit outside the batch-size model, so they are kept
/// in a separate field rather than folded into Y.
struct BoundBreakdown {
  MuonVariant variant;
  std::vector<std::pair<std::string, double>> terms;  // evaluated at (T, b)
  double x = 0.0;          // coefficient of 1/T
  double y = 0.0;          // coefficient of 1/b
  double sublinear = 0.0;  // the sqrt(sigma2/b) contribution at this b
  double z = 0.0;          // batch/step independent remainder
  double total = 0.0;

  double recompose(long T, long b) const {
    return x / static_cast<double>(T) + y / static_cast<double>(b) +
           sublinear + z;
  }
};

BoundBreakdown theorem_bound(const BoundConstants& c, MuonVariant variant,
                             long T, long b);

/// (X, Y, epsilon) batch-size model: T(b), T(b)*b and the critical batch.
struct ComplexityModel {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // reported, excluded from the threshold
  double epsilon = 1.0;

  void validate() const {
    if (!(x > 0.0) || !(y > 0.0) || !(epsilon > 0.0)) {
      throw std::invalid_argument(
          "ComplexityModel: X, Y, epsilon must be > 0");
    }
  }
};

/// T(b) = X b / (eps b - Y); defined only for b > Y/eps.
double steps_needed(const ComplexityModel& m, long b);

/// T(b) * b = X b^2 / (eps b - Y).
double sfo_complexity(const ComplexityModel& m, long b);

/// b* = 2Y / eps.
double critical_batch(const ComplexityModel& m);

/// b* with Y taken from the matching theorem's 1/b coefficient.
double critical_batch_muon(const BoundConstants& c, MuonVariant variant,
                           double epsilon);

}  // namespace muonlab
