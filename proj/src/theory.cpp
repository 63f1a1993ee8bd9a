#include "muonlab/theory.hpp"

#include <cmath>

namespace muonlab {

MuonVariant variant_from(bool nesterov, bool weight_decay) {
  if (nesterov) {
    return weight_decay ? MuonVariant::NesterovWd : MuonVariant::NesterovNoWd;
  }
  return weight_decay ? MuonVariant::NoNesterovWd
                      : MuonVariant::NoNesterovNoWd;
}

std::string to_string(MuonVariant v) {
  switch (v) {
    case MuonVariant::NoNesterovNoWd:
      return "no_nesterov_no_wd";
    case MuonVariant::NesterovNoWd:
      return "nesterov_no_wd";
    case MuonVariant::NoNesterovWd:
      return "no_nesterov_wd";
    case MuonVariant::NesterovWd:
      return "nesterov_wd";
  }
  return "unknown";
}

double param_norm_bound(const BoundConstants& c, long t) {
  c.require_stability();
  const double sqrt_n = std::sqrt(static_cast<double>(c.n));
  const double tail = sqrt_n / c.lambda;
  const double decay = 1.0 - c.eta * c.lambda;
  if (decay <= 0.0) return tail;  // eta == 1/lambda
  return std::pow(decay, static_cast<double>(t)) * c.w0_norm + tail;
}

double grad_norm_bound(const BoundConstants& c, long t) {
  c.require_stability();
  const double sqrt_n = std::sqrt(static_cast<double>(c.n));
  const double tail = c.L * sqrt_n / c.lambda + c.L * c.wstar_norm;
  const double decay = 1.0 - c.eta * c.lambda;
  if (decay <= 0.0) return tail;
  return c.L * std::pow(decay, static_cast<double>(t)) * c.w0_norm + tail;
}

double avg_grad_bound_corollary(const BoundConstants& c, long T) {
  c.require_stability();
  if (T < 1) throw std::invalid_argument("avg_grad_bound: T must be >= 1");
  const double sqrt_n = std::sqrt(static_cast<double>(c.n));
  const double tail = c.L * sqrt_n / c.lambda + c.L * c.wstar_norm;
  const double decay = 1.0 - c.eta * c.lambda;
  if (decay <= 0.0) return tail;
  return c.L * c.w0_norm / (c.eta * c.lambda * static_cast<double>(T)) + tail;
}

double momentum_tracking_bound(const BoundConstants& c, long t, long b) {
  if (b < 1) throw std::invalid_argument("momentum_tracking_bound: b >= 1");
  const double n = static_cast<double>(c.n);
  const double one_minus = 1.0 - c.beta;
  const double transient =
      std::pow((1.0 + c.beta) / 2.0, static_cast<double>(t)) * c.delta *
      c.delta;
  const double drift =
      4.0 * c.L * c.L * c.eta * c.eta * n / (one_minus * one_minus);
  const double variance = 2.0 * one_minus * c.sigma2 / static_cast<double>(b);
  return transient + drift + variance;
}

BoundBreakdown theorem_bound(const BoundConstants& c, MuonVariant variant,
                             long T, long b) {
  if (T < 1 || b < 1) {
    throw std::invalid_argument("theorem_bound: T, b must be >= 1");
  }
  const bool nesterov = variant == MuonVariant::NesterovNoWd ||
                        variant == MuonVariant::NesterovWd;
  const bool wd = variant == MuonVariant::NoNesterovWd ||
                  variant == MuonVariant::NesterovWd;
  if (wd) c.require_stability();

  const double n = static_cast<double>(c.n);
  const double one_minus = 1.0 - c.beta;
  const double Td = static_cast<double>(T);
  const double bd = static_cast<double>(b);
  const double gamma = c.gamma();
  const double nu = c.nu();

  BoundBreakdown out;
  out.variant = variant;

  // --- 1/T transients ---
  double x_coeff = (c.f_w0 - c.f_lower_bound) / c.eta;
  if (wd) x_coeff += c.rho() * c.w0_norm * c.w0_norm / c.eta;
  const double momentum_factor = nesterov ? c.beta : 1.0;
  const double momentum_transient =
      momentum_factor *
      (c.delta * c.delta + 2.0 * std::sqrt(2.0 * n) * c.delta) / one_minus;
  x_coeff += momentum_transient;
  out.x = x_coeff;
  out.terms.emplace_back("descent_transient",
                         (c.f_w0 - c.f_lower_bound) / (c.eta * Td));
  if (wd) {
    out.terms.emplace_back("decay_transient",
                           c.rho() * c.w0_norm * c.w0_norm / (c.eta * Td));
  }
  out.terms.emplace_back("momentum_transient", momentum_transient / Td);

  // --- 1/b variance ---
  double y_over_sigma2 = nesterov ? c.beta_bar() : one_minus;
  if (wd) y_over_sigma2 += c.lambda / 2.0;
  out.y = y_over_sigma2 * c.sigma2;
  out.terms.emplace_back("variance", out.y / bd);

  // --- sqrt(sigma2/b) (outside the batch-size model) ---
  const double nu_factor = nesterov ? c.beta * nu : nu;
  out.sublinear = nu_factor * std::sqrt(c.sigma2 / bd);
  out.terms.emplace_back("variance_sublinear", out.sublinear);

  // --- residual n-terms ---
  const double drift_factor = nesterov ? c.beta : 1.0;
  double z = 2.0 * gamma * drift_factor * n * (1.0 + gamma);
  out.terms.emplace_back("momentum_drift",
                         2.0 * gamma * drift_factor * n * (1.0 + gamma));
  if (wd) {
    const double step_floor = (1.0 + c.L * c.eta) * n;
    const double decay_floor = c.rho() * n / c.lambda;
    const double grad_floor = c.lambda * c.d0() * c.d0() / 2.0;
    z += step_floor + decay_floor + grad_floor;
    out.terms.emplace_back("step_floor", step_floor);
    out.terms.emplace_back("decay_floor", decay_floor);
    out.terms.emplace_back("grad_floor", grad_floor);
  } else {
    const double step_floor = (1.0 + c.L * c.eta) * n / 2.0;
    z += step_floor;
    out.terms.emplace_back("step_floor", step_floor);
  }
  out.z = z;

  double total = 0.0;
  for (const auto& [name, value] : out.terms) total += value;
  out.total = total;
  return out;
}

double steps_needed(const ComplexityModel& m, long b) {
  m.validate();
  const double bd = static_cast<double>(b);
  if (!(bd > m.y / m.epsilon)) {
    throw InfeasibleBatchError("steps_needed: requires b > Y/epsilon");
  }
  return m.x * bd / (m.epsilon * bd - m.y);
}

double sfo_complexity(const ComplexityModel& m, long b) {
  return steps_needed(m, b) * static_cast<double>(b);
}

double critical_batch(const ComplexityModel& m) {
  if (!(m.epsilon > 0.0)) {
    throw std::invalid_argument("critical_batch: epsilon must be > 0");
  }
  return 2.0 * m.y / m.epsilon;
}

double critical_batch_muon(const BoundConstants& c, MuonVariant variant,
                           double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("critical_batch_muon: epsilon must be > 0");
  }
  const bool nesterov = variant == MuonVariant::NesterovNoWd ||
                        variant == MuonVariant::NesterovWd;
  const bool wd = variant == MuonVariant::NoNesterovWd ||
                  variant == MuonVariant::NesterovWd;
  double y_over_sigma2 = nesterov ? c.beta_bar() : (1.0 - c.beta);
  if (wd) y_over_sigma2 += c.lambda / 2.0;
  return 2.0 * y_over_sigma2 * c.sigma2 / epsilon;
}

}  // namespace muonlab
