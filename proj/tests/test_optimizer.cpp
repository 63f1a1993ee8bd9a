#include "doctest.h"

#include <cmath>

#include "muonlab/optimizer.hpp"
#include "muonlab/rng.hpp"

using namespace muonlab;

namespace {

Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, 0, 4);
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = rng.next_normal();
  }
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  MuonConfig cfg;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eta = 0.1;
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.beta = 0.9;
  cfg.weight_decay = true;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lambda = 0.1;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.stability_ok());
  cfg.eta = 20.0;  // > 1/lambda
  CHECK_FALSE(cfg.stability_ok());
}

TEST_CASE("first muon step orthogonalizes the gradient direction") {
  const Matrix w0 = random_matrix(8, 4, 1);
  const Matrix g = random_matrix(8, 4, 2);

  MuonConfig cfg;
  cfg.eta = 0.5;
  cfg.beta = 0.9;
  cfg.nesterov = true;
  cfg.weight_decay = false;

  const MuonState s0 = MuonState::zero(8, 4);
  const auto res = muon_step(w0, g, cfg, s0);

  // M_0 = 0.1 g; C_0 = 0.19 g; scale invariance makes O_0 = polar(g).
  CHECK(frobenius_norm(res.state.momentum - g * 0.1) < 1e-12);
  const Matrix expected = w0 - orthogonalize_exact(g).o * cfg.eta;
  CHECK(frobenius_norm(res.w - expected) < 1e-10);
  CHECK(res.state.step_count == 1);
}

TEST_CASE("nesterov off means c equals the momentum buffer") {
  const Matrix w0 = random_matrix(6, 3, 3);
  const Matrix g1 = random_matrix(6, 3, 4);
  const Matrix g2 = random_matrix(6, 3, 5);

  MuonConfig cfg;
  cfg.eta = 0.1;
  cfg.beta = 0.8;
  cfg.nesterov = false;

  auto r1 = muon_step(w0, g1, cfg, MuonState::zero(6, 3));
  auto r2 = muon_step(r1.w, g2, cfg, r1.state);
  const Matrix m2 = g1 * (0.2 * 0.8) + g2 * 0.2;
  CHECK(frobenius_norm(r2.state.momentum - m2) < 1e-12);
  const Matrix expected = r1.w - orthogonalize_exact(m2).o * cfg.eta;
  CHECK(frobenius_norm(r2.w - expected) < 1e-10);
}

TEST_CASE("zero gradient at the first step decays the parameters") {
  const Matrix w0 = random_matrix(5, 2, 6);
  MuonConfig cfg;
  cfg.eta = 2.0;
  cfg.lambda = 0.1;
  cfg.weight_decay = true;
  cfg.beta = 0.9;

  const auto res = muon_step(w0, Matrix(5, 2), cfg, MuonState::zero(5, 2));
  CHECK(res.degenerate);
  CHECK(frobenius_norm(res.w - w0 * (1.0 - 0.2)) < 1e-12);
}

TEST_CASE("eta equals 1/lambda collapses the decay factor") {
  const Matrix w0 = random_matrix(6, 4, 7);
  MuonConfig cfg;
  cfg.eta = 10.0;
  cfg.lambda = 0.1;
  cfg.weight_decay = true;
  cfg.beta = 0.0;

  const Matrix g = random_matrix(6, 4, 8);
  const auto res = muon_step(w0, g, cfg, MuonState::zero(6, 4));
  // (1 - eta lambda) = 0, so W_1 = -eta O_0 and ||W_1||_F = eta sqrt(n).
  CHECK(frobenius_norm(res.w) ==
        doctest::Approx(10.0 * 2.0).epsilon(1e-10));  // sqrt(4) = 2
  CHECK(frobenius_norm(res.w) <= std::sqrt(4.0) / cfg.lambda + 1e-9);
}

TEST_CASE("update norm is eta sqrt(n) without weight decay") {
  const Matrix w0 = random_matrix(9, 5, 9);
  MuonConfig cfg;
  cfg.eta = 0.3;
  cfg.beta = 0.9;
  cfg.weight_decay = false;
  const Matrix g = random_matrix(9, 5, 10);
  const auto res = muon_step(w0, g, cfg, MuonState::zero(9, 5));
  CHECK(res.update_norm == doctest::Approx(0.3 * std::sqrt(5.0)).epsilon(1e-10));
}

TEST_CASE("muon step rejects bad inputs") {
  MuonConfig cfg;
  CHECK_THROWS_AS(muon_step(Matrix(3, 2), Matrix(2, 2), cfg,
                            MuonState::zero(3, 2)),
                  DimensionError);
  Matrix bad(3, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(muon_step(Matrix(3, 2), bad, cfg, MuonState::zero(3, 2)),
                  NumericError);
}

TEST_CASE("vanilla sgd corner of the momentum baseline") {
  BaselineConfig cfg;
  cfg.kind = BaselineKind::MomentumSgd;
  cfg.eta = 0.5;
  cfg.momentum_or_beta1 = 0.0;
  cfg.lambda = 0.0;
  const Matrix w0 = random_matrix(4, 2, 11);
  const Matrix g = random_matrix(4, 2, 12);
  const auto res = baseline_step(w0, g, cfg, BaselineState::zero(4, 2));
  CHECK(frobenius_norm(res.w - (w0 - g * 0.5)) < 1e-12);
}

TEST_CASE("momentum sgd two-step hand trace") {
  BaselineConfig cfg;
  cfg.kind = BaselineKind::MomentumSgd;
  cfg.eta = 0.1;
  cfg.momentum_or_beta1 = 0.9;
  cfg.lambda = 0.0;
  const Matrix w0(2, 2, {1, 0, 0, 1});
  const Matrix g(2, 2, {1, 1, 1, 1});
  auto r1 = baseline_step(w0, g, cfg, BaselineState::zero(2, 2));
  auto r2 = baseline_step(r1.w, g, cfg, r1.state);
  // buf1 = g; buf2 = 0.9 g + g = 1.9 g; W2 = W0 - 0.1 g - 0.19 g
  CHECK(r2.w(0, 0) == doctest::Approx(1.0 - 0.29).epsilon(1e-12));
  CHECK(r2.w(0, 1) == doctest::Approx(-0.29).epsilon(1e-12));
}

TEST_CASE("adamw with zero gradient is pure decay") {
  BaselineConfig cfg;
  cfg.kind = BaselineKind::AdamW;
  cfg.eta = 0.1;
  cfg.lambda = 0.5;
  const Matrix w0 = random_matrix(4, 2, 13);
  Matrix w = w0;
  BaselineState st = BaselineState::zero(4, 2);
  for (int t = 0; t < 5; ++t) {
    auto res = baseline_step(w, Matrix(4, 2), cfg, st);
    w = std::move(res.w);
    st = std::move(res.state);
  }
  CHECK(frobenius_norm(w - w0 * std::pow(1.0 - 0.05, 5)) < 1e-12);
}

TEST_CASE("learning rate scaling rules") {
  CHECK(scaled_lr(0.01, 512, LrScaling::Sqrt, 512) == doctest::Approx(0.01));
  CHECK(scaled_lr(0.01, 2048, LrScaling::Sqrt, 512) == doctest::Approx(0.02));
  CHECK(scaled_lr(0.01, 2048, LrScaling::Linear, 512) == doctest::Approx(0.04));
  CHECK_THROWS_AS(scaled_lr(0.01, 0, LrScaling::Sqrt, 512),
                  std::invalid_argument);
}

TEST_CASE("steps are deterministic") {
  const Matrix w0 = random_matrix(8, 4, 14);
  const Matrix g = random_matrix(8, 4, 15);
  MuonConfig cfg;
  cfg.beta = 0.95;
  const auto a = muon_step(w0, g, cfg, MuonState::zero(8, 4));
  const auto b = muon_step(w0, g, cfg, MuonState::zero(8, 4));
  CHECK(frobenius_norm(a.w - b.w) == 0.0);
}
