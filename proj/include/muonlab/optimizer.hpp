#pragma once

#include "muonlab/matrix.hpp"
#include "muonlab/orthogonalizer.hpp"

namespace muonlab {

struct MuonConfig {
  double eta = 0.01;
  double lambda = 0.0;
  double beta = 0.95;
  bool nesterov = true;
  bool weight_decay = false;
  OrthMethod orth{};

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("MuonConfig: eta must be > 0");
    if (!(beta >= 0.0 && beta < 1.0)) {
      throw std::invalid_argument("MuonConfig: beta must be in [0, 1)");
    }
    if (lambda < 0.0) {
      throw std::invalid_argument("MuonConfig: lambda must be >= 0");
    }
    if (weight_decay && !(lambda > 0.0)) {
      throw std::invalid_argument(
          "MuonConfig: weight_decay requires lambda > 0");
    }
    orth.validate();
  }

  // eta <= 1/lambda; intentionally violable (the stability sweep crosses it),
  // so callers record rather than enforce.
  bool stability_ok() const {
    return !weight_decay || eta <= 1.0 / lambda;
  }
};

struct MuonState {
  Matrix momentum;  // M_t; initialized to zero (M_{-1} := 0)
  long step_count = 0;
  bool last_degenerate = false;

  static MuonState zero(std::size_t rows, std::size_t cols) {
    return {Matrix(rows, cols), 0, false};
  }
};

struct MuonStepResult {
  Matrix w;
  MuonState state;
  double update_norm = 0.0;
  bool degenerate = false;
};

/// One Muon update. Pure: inputs are untouched, the new parameter and state
/// are returned.
MuonStepResult muon_step(const Matrix& w, const Matrix& grad,
                         const MuonConfig& cfg, const MuonState& state);

// --- Baselines (standard Momentum-SGD and AdamW, for comparisons only) ---

enum class BaselineKind { MomentumSgd, AdamW };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::MomentumSgd;
  double eta = 0.01;
  double momentum_or_beta1 = 0.9;
  double beta2 = 0.999;  // AdamW only
  double eps = 1e-8;     // AdamW only
  double lambda = 0.0;

  void validate() const {
    if (!(eta > 0.0)) {
      throw std::invalid_argument("BaselineConfig: eta must be > 0");
    }
    if (!(momentum_or_beta1 >= 0.0 && momentum_or_beta1 < 1.0)) {
      throw std::invalid_argument(
          "BaselineConfig: momentum/beta1 must be in [0, 1)");
    }
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("BaselineConfig: beta2 must be in [0, 1)");
    }
    if (!(eps > 0.0)) {
      throw std::invalid_argument("BaselineConfig: eps must be > 0");
    }
    if (lambda < 0.0) {
      throw std::invalid_argument("BaselineConfig: lambda must be >= 0");
    }
  }
};

struct BaselineState {
  Matrix buf1;  // momentum buffer / first moment
  Matrix buf2;  // second moment (AdamW)
  long step_count = 0;

  static BaselineState zero(std::size_t rows, std::size_t cols) {
    return {Matrix(rows, cols), Matrix(rows, cols), 0};
  }
};

struct BaselineStepResult {
  Matrix w;
  BaselineState state;
  double update_norm = 0.0;
};

BaselineStepResult baseline_step(const Matrix& w, const Matrix& grad,
                                 const BaselineConfig& cfg,
                                 const BaselineState& state);

enum class LrScaling { Fixed, Sqrt, Linear };

/// Batch-size learning-rate scaling relative to a reference batch.
double scaled_lr(double base_eta, long batch, LrScaling rule,
                 long reference_batch);

}  // namespace muonlab
