#include "muonlab/optimizer.hpp"

namespace muonlab {

MuonStepResult muon_step(const Matrix& w, const Matrix& grad,
                         const MuonConfig& cfg, const MuonState& state) {
  cfg.validate();
  if (!w.same_shape(grad) || !w.same_shape(state.momentum)) {
    throw DimensionError("muon_step: w, grad, momentum shapes must agree");
  }
  if (!grad.all_finite()) {
    throw NumericError("muon_step: gradient contains non-finite entries");
  }

  // M_t := beta M_{t-1} + (1 - beta) g_t
  Matrix momentum = state.momentum * cfg.beta + grad * (1.0 - cfg.beta);

  // C_t := beta M_t + (1 - beta) g_t  (Nesterov) or M_t otherwise
  Matrix c = cfg.nesterov ? momentum * cfg.beta + grad * (1.0 - cfg.beta)
                          : momentum;

  const OrthResult orth = orthogonalize(c, cfg.orth);

  Matrix w_next = cfg.weight_decay ? w * (1.0 - cfg.eta * cfg.lambda) : w;
  w_next -= orth.o * cfg.eta;
  if (!w_next.all_finite()) {
    throw NumericError("muon_step: parameter update overflowed");
  }

  const double update_norm = frobenius_norm(w_next - w);
  MuonState next{std::move(momentum), state.step_count + 1, orth.degenerate};
  return {std::move(w_next), std::move(next), update_norm, orth.degenerate};
}

BaselineStepResult baseline_step(const Matrix& w, const Matrix& grad,
                                 const BaselineConfig& cfg,
                                 const BaselineState& state) {
  cfg.validate();
  if (!w.same_shape(grad)) {
    throw DimensionError("baseline_step: shapes must agree");
  }
  if (!grad.all_finite()) {
    throw NumericError("baseline_step: gradient contains non-finite entries");
  }

  BaselineState next = state;
  next.step_count = state.step_count + 1;
  Matrix w_next = w;

  switch (cfg.kind) {
    case BaselineKind::MomentumSgd: {
      // Coupled weight decay, heavy-ball momentum (textbook SGD).
      Matrix g = grad;
      if (cfg.lambda > 0.0) g += w * cfg.lambda;
      next.buf1 = state.buf1 * cfg.momentum_or_beta1 + g;
      w_next -= next.buf1 * cfg.eta;
      break;
    }
    case BaselineKind::AdamW: {
      // Decoupled decay first, then the adaptive step with bias correction.
      if (cfg.lambda > 0.0) w_next *= (1.0 - cfg.eta * cfg.lambda);
      const double b1 = cfg.momentum_or_beta1;
      const double b2 = cfg.beta2;
      next.buf1 = state.buf1 * b1 + grad * (1.0 - b1);
      next.buf2 = state.buf2;
      for (std::size_t i = 0; i < grad.rows(); ++i) {
        for (std::size_t j = 0; j < grad.cols(); ++j) {
          next.buf2(i, j) =
              b2 * state.buf2(i, j) + (1.0 - b2) * grad(i, j) * grad(i, j);
        }
      }
      const long t = next.step_count;
      const double bc1 = 1.0 - std::pow(b1, t);
      const double bc2 = 1.0 - std::pow(b2, t);
      for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
          const double mhat = next.buf1(i, j) / bc1;
          const double vhat = next.buf2(i, j) / bc2;
          w_next(i, j) -= cfg.eta * mhat / (std::sqrt(vhat) + cfg.eps);
        }
      }
      break;
    }
  }

  if (!w_next.all_finite()) {
    throw NumericError("baseline_step: parameter update overflowed");
  }
  const double update_norm = frobenius_norm(w_next - w);
  return {std::move(w_next), std::move(next), update_norm};
}

double scaled_lr(double base_eta, long batch, LrScaling rule,
                 long reference_batch) {
  if (batch < 1 || reference_batch < 1) {
    throw std::invalid_argument("scaled_lr: batch sizes must be >= 1");
  }
  const double ratio =
      static_cast<double>(batch) / static_cast<double>(reference_batch);
  switch (rule) {
    case LrScaling::Fixed:
      return base_eta;
    case LrScaling::Sqrt:
      return base_eta * std::sqrt(ratio);
    case LrScaling::Linear:
      return base_eta * ratio;
  }
  throw std::invalid_argument("scaled_lr: unknown rule");
}

}  // namespace muonlab
