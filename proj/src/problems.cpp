#include "muonlab/problems.hpp"

#include <algorithm>
#include <cmath>

#include "muonlab/svd.hpp"

namespace muonlab {

namespace {

Matrix random_matrix(std::size_t m, std::size_t n, Rng& rng) {
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = rng.next_normal();
  }
  return out;
}

Matrix random_with_norm(std::size_t m, std::size_t n, double target_norm,
                        Rng& rng) {
  Matrix out = random_matrix(m, n, rng);
  const double norm = frobenius_norm(out);
  if (norm > 0.0 && target_norm > 0.0) {
    out *= target_norm / norm;
  } else {
    out = Matrix(m, n);
  }
  return out;
}

// b distinct indices in [0, n_total) by partial Fisher-Yates.
std::vector<std::size_t> sample_without_replacement(std::size_t n_total,
                                                    long b, Rng& rng) {
  std::vector<std::size_t> idx(n_total);
  for (std::size_t i = 0; i < n_total; ++i) idx[i] = i;
  for (long k = 0; k < b; ++k) {
    const std::size_t j =
        k + static_cast<std::size_t>(rng.next_below(n_total - k));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(b));
  return idx;
}

class NoisyQuadratic final : public ProblemOracle {
 public:
  NoisyQuadratic(std::size_t m, std::size_t n, std::vector<double> spectrum,
                 double sigma2, Matrix w_star)
      : m_(m), n_(n), spectrum_(std::move(spectrum)), sigma2_(sigma2),
        w_star_(std::move(w_star)) {
    if (m < n) throw DimensionError("NoisyQuadratic: requires m >= n");
    if (spectrum_.size() != m) {
      throw std::invalid_argument("NoisyQuadratic: spectrum length must be m");
    }
    if (w_star_.rows() != m || w_star_.cols() != n) {
      throw DimensionError("NoisyQuadratic: w_star shape mismatch");
    }
    if (sigma2_ < 0.0) {
      throw std::invalid_argument("NoisyQuadratic: sigma2 must be >= 0");
    }
    double lmax = 0.0;
    for (double s : spectrum_) lmax = std::max(lmax, s * s);
    lipschitz_ = lmax;
  }

  ProblemKind kind() const override { return ProblemKind::NoisyQuadratic; }
  std::size_t rows() const override { return m_; }
  std::size_t cols() const override { return n_; }
  double lipschitz() const override { return lipschitz_; }
  double sigma2() const override { return sigma2_; }
  const Matrix& w_star() const override { return w_star_; }
  double f_star() const override { return 0.0; }
  std::size_t n_samples() const override { return 0; }

  double loss(const Matrix& w) const override {
    check_shape(w);
    double acc = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = spectrum_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        const double d = a * (w(i, j) - w_star_(i, j));
        acc += d * d;
      }
    }
    return 0.5 * acc;
  }

  Matrix full_gradient(const Matrix& w) const override {
    check_shape(w);
    Matrix g(m_, n_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double a2 = spectrum_[i] * spectrum_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        g(i, j) = a2 * (w(i, j) - w_star_(i, j));
      }
    }
    return g;
  }

  Matrix minibatch_gradient(const Matrix& w, long batch,
                            std::uint64_t stream_seed) const override {
    if (batch < 1) {
      throw std::invalid_argument("minibatch_gradient: batch must be >= 1");
    }
    Matrix g = full_gradient(w);
    if (sigma2_ == 0.0) return g;
    // Averaging b i.i.d. noise draws is equivalent to a single draw with
    // per-entry variance sigma2/(m n b): E||E||_F^2 = sigma2/b (Lemma-1
    // rate, exact here).
    Rng rng = Rng::for_stream(stream_seed, 0, 0x6e6f697379ULL);
    const double sd = std::sqrt(sigma2_ / (static_cast<double>(m_ * n_) *
                                           static_cast<double>(batch)));
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) g(i, j) += sd * rng.next_normal();
    }
    return g;
  }

 private:
  std::size_t m_, n_;
  std::vector<double> spectrum_;
  double sigma2_;
  Matrix w_star_;
  double lipschitz_;
};

class FiniteSumLeastSquares final : public ProblemOracle {
 public:
  FiniteSumLeastSquares(std::size_t m, std::size_t n, std::size_t n_samples,
                        double region_radius, std::uint64_t seed)
      : m_(m), n_(n), n_samples_(n_samples), w_star_(m, n) {
    if (m < n) throw DimensionError("FiniteSumLeastSquares: requires m >= n");
    if (n_samples < m) {
      throw std::invalid_argument(
          "FiniteSumLeastSquares: needs n_samples >= m");
    }
    Rng rng = Rng::for_stream(seed, 0, 0x6c73716eULL);
    x_ = random_matrix(n_samples, m, rng);  // row i = x_i^T
    x_ *= 1.0 / std::sqrt(static_cast<double>(m));
    w_star_ = random_with_norm(m, n, 1.0, rng);
    // Targets y_i = W*^T x_i, so W* is the exact global minimizer.
    y_ = matmul(x_, w_star_);  // N x n, row i = y_i^T

    // L = lambda_max(H), H = (1/N) sum x_i x_i^T = X^T X / N.
    const SvdFactors xf = svd(x_);
    lipschitz_ = xf.s[0] * xf.s[0] / static_cast<double>(n_samples);

    // Certify sigma2 on the operating region: the per-sample deviation is
    // (x_i x_i^T - H)(W - W*), linear in W - W*, so the worst case over the
    // radius-R ball is R^2 * max_D (1/N) sum ||(x_i x_i^T - H) D||_F^2 over
    // unit D. Bound it by sampled directions with a safety margin.
    double worst = 0.0;
    for (int trial = 0; trial < 64; ++trial) {
      Matrix d = random_with_norm(m, n, 1.0, rng);
      double acc = 0.0;
      const Matrix hd = hessian_apply(d);
      for (std::size_t i = 0; i < n_samples_; ++i) {
        // (x_i x_i^T) d = x_i (x_i^T d)
        double diff2 = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          double xi_d = 0.0;
          for (std::size_t k = 0; k < m_; ++k) xi_d += x_(i, k) * d(k, j);
          for (std::size_t k = 0; k < m_; ++k) {
            const double e = x_(i, k) * xi_d - hd(k, j);
            diff2 += e * e;
          }
        }
        acc += diff2;
      }
      worst = std::max(worst, acc / static_cast<double>(n_samples_));
    }
    region_radius_ = region_radius;
    sigma2_ = 2.0 * worst * region_radius * region_radius;
  }

  ProblemKind kind() const override {
    return ProblemKind::FiniteSumLeastSquares;
  }
  std::size_t rows() const override { return m_; }
  std::size_t cols() const override { return n_; }
  double lipschitz() const override { return lipschitz_; }
  double sigma2() const override { return sigma2_; }
  const Matrix& w_star() const override { return w_star_; }
  double f_star() const override { return 0.0; }
  std::size_t n_samples() const override { return n_samples_; }

  double loss(const Matrix& w) const override {
    check_shape(w);
    const Matrix r = matmul(x_, w) - y_;
    return 0.5 * frobenius_inner(r, r) / static_cast<double>(n_samples_);
  }

  Matrix full_gradient(const Matrix& w) const override {
    check_shape(w);
    const Matrix r = matmul(x_, w) - y_;  // N x n
    Matrix g = matmul_at(x_, r);
    g *= 1.0 / static_cast<double>(n_samples_);
    return g;
  }

  Matrix minibatch_gradient(const Matrix& w, long batch,
                            std::uint64_t stream_seed) const override {
    check_shape(w);
    if (batch < 1 || static_cast<std::size_t>(batch) > n_samples_) {
      throw std::invalid_argument("minibatch_gradient: batch out of range");
    }
    Rng rng = Rng::for_stream(stream_seed, 0, 0x6273616dULL);
    const auto idx = sample_without_replacement(n_samples_, batch, rng);
    Matrix g(m_, n_);
    for (std::size_t i : idx) {
      // grad_i = x_i (x_i^T W - y_i^T)
      for (std::size_t j = 0; j < n_; ++j) {
        double r = -y_(i, j);
        for (std::size_t k = 0; k < m_; ++k) r += x_(i, k) * w(k, j);
        for (std::size_t k = 0; k < m_; ++k) g(k, j) += x_(i, k) * r;
      }
    }
    g *= 1.0 / static_cast<double>(batch);
    return g;
  }

 private:
  Matrix hessian_apply(const Matrix& d) const {
    Matrix hd = matmul_at(x_, matmul(x_, d));
    hd *= 1.0 / static_cast<double>(n_samples_);
    return hd;
  }

  std::size_t m_, n_, n_samples_;
  Matrix x_;  // N x m
  Matrix y_;  // N x n
  Matrix w_star_;
  double lipschitz_ = 0.0;
  double sigma2_ = 0.0;
  double region_radius_ = 0.0;
};

class TwoLayerNet final : public ProblemOracle {
 public:
  TwoLayerNet(std::size_t m, std::size_t n, std::size_t n_samples,
              double region_radius, std::uint64_t seed)
      : m_(m), n_(n), n_samples_(n_samples), w_star_(m, n), out_w_(n) {
    if (m < n) throw DimensionError("TwoLayerNet: requires m >= n");
    Rng rng = Rng::for_stream(seed, 0, 0x6e6574ULL);
    x_ = random_matrix(n_samples, m, rng);
    x_ *= 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t j = 0; j < n; ++j) out_w_[j] = rng.next_normal();
    w_star_ = random_with_norm(m, n, 1.0, rng);
    targets_.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      targets_[i] = predict(w_star_, i);
    }

    // L and sigma2 are estimated on the region (qualitative problem).
    double worst_ratio = 0.0;
    double worst_var = 0.0;
    for (int trial = 0; trial < 48; ++trial) {
      Matrix wa = w_star_ + random_with_norm(m, n, region_radius *
                                                       rng.next_uniform(),
                                             rng);
      Matrix wb = w_star_ + random_with_norm(m, n, region_radius *
                                                       rng.next_uniform(),
                                             rng);
      const double dw = frobenius_norm(wa - wb);
      if (dw > 1e-9) {
        const double dg =
            frobenius_norm(full_gradient_impl(wa) - full_gradient_impl(wb));
        worst_ratio = std::max(worst_ratio, dg / dw);
      }
      const Matrix mean = full_gradient_impl(wa);
      double var = 0.0;
      for (std::size_t i = 0; i < n_samples_; ++i) {
        var += squared_distance(sample_gradient(wa, i), mean);
      }
      worst_var = std::max(worst_var, var / static_cast<double>(n_samples_));
    }
    lipschitz_ = 1.5 * worst_ratio;
    sigma2_ = 1.5 * worst_var;
  }

  ProblemKind kind() const override { return ProblemKind::TwoLayerNet; }
  std::size_t rows() const override { return m_; }
  std::size_t cols() const override { return n_; }
  double lipschitz() const override { return lipschitz_; }
  double sigma2() const override { return sigma2_; }
  const Matrix& w_star() const override { return w_star_; }
  double f_star() const override { return 0.0; }
  std::size_t n_samples() const override { return n_samples_; }

  double loss(const Matrix& w) const override {
    check_shape(w);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_samples_; ++i) {
      const double e = predict(w, i) - targets_[i];
      acc += e * e;
    }
    return 0.5 * acc / static_cast<double>(n_samples_);
  }

  Matrix full_gradient(const Matrix& w) const override {
    check_shape(w);
    return full_gradient_impl(w);
  }

  Matrix minibatch_gradient(const Matrix& w, long batch,
                            std::uint64_t stream_seed) const override {
    check_shape(w);
    if (batch < 1 || static_cast<std::size_t>(batch) > n_samples_) {
      throw std::invalid_argument("minibatch_gradient: batch out of range");
    }
    Rng rng = Rng::for_stream(stream_seed, 0, 0x746c6eULL);
    const auto idx = sample_without_replacement(n_samples_, batch, rng);
    Matrix g(m_, n_);
    for (std::size_t i : idx) g += sample_gradient(w, i);
    g *= 1.0 / static_cast<double>(batch);
    return g;
  }

 private:
  double predict(const Matrix& w, std::size_t i) const {
    double out = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      double z = 0.0;
      for (std::size_t k = 0; k < m_; ++k) z += x_(i, k) * w(k, j);
      out += out_w_[j] * std::tanh(z);
    }
    return out;
  }

  // Backprop through the single hidden tanh layer:
  // grad_i = (pred - y) * x_i (u .* sech^2(z))^T
  Matrix sample_gradient(const Matrix& w, std::size_t i) const {
    std::vector<double> z(n_);
    double pred = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      double zj = 0.0;
      for (std::size_t k = 0; k < m_; ++k) zj += x_(i, k) * w(k, j);
      z[j] = zj;
      pred += out_w_[j] * std::tanh(zj);
    }
    const double err = pred - targets_[i];
    Matrix g(m_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double th = std::tanh(z[j]);
      const double back = err * out_w_[j] * (1.0 - th * th);
      for (std::size_t k = 0; k < m_; ++k) g(k, j) = back * x_(i, k);
    }
    return g;
  }

  Matrix full_gradient_impl(const Matrix& w) const {
    Matrix g(m_, n_);
    for (std::size_t i = 0; i < n_samples_; ++i) g += sample_gradient(w, i);
    g *= 1.0 / static_cast<double>(n_samples_);
    return g;
  }

  static double squared_distance(const Matrix& a, const Matrix& b) {
    const Matrix d = a - b;
    return frobenius_inner(d, d);
  }

  std::size_t m_, n_, n_samples_;
  Matrix x_;
  Matrix w_star_;
  std::vector<double> out_w_;
  std::vector<double> targets_;
  double lipschitz_ = 0.0;
  double sigma2_ = 0.0;
};

}  // namespace

std::unique_ptr<ProblemOracle> make_noisy_quadratic(
    std::size_t m, std::size_t n, std::vector<double> spectrum, double sigma2,
    Matrix w_star) {
  return std::make_unique<NoisyQuadratic>(m, n, std::move(spectrum), sigma2,
                                          std::move(w_star));
}

std::unique_ptr<ProblemOracle> make_noisy_quadratic_simple(
    std::size_t m, std::size_t n, double scale, double sigma2,
    double wstar_norm, std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, 0, 0x7773746172ULL);
  Matrix w_star = random_with_norm(m, n, wstar_norm, rng);
  return make_noisy_quadratic(m, n, std::vector<double>(m, scale), sigma2,
                              std::move(w_star));
}

std::unique_ptr<ProblemOracle> make_finite_sum_least_squares(
    std::size_t m, std::size_t n, std::size_t n_samples, double region_radius,
    std::uint64_t seed) {
  return std::make_unique<FiniteSumLeastSquares>(m, n, n_samples,
                                                 region_radius, seed);
}

std::unique_ptr<ProblemOracle> make_two_layer_net(std::size_t m, std::size_t n,
                                                  std::size_t n_samples,
                                                  double region_radius,
                                                  std::uint64_t seed) {
  return std::make_unique<TwoLayerNet>(m, n, n_samples, region_radius, seed);
}

std::unique_ptr<ProblemOracle> make_problem(const ProblemConfig& cfg) {
  switch (cfg.kind) {
    case ProblemKind::NoisyQuadratic: {
      if (!cfg.spectrum.empty()) {
        Rng rng = Rng::for_stream(cfg.seed, 0, 0x7773746172ULL);
        Matrix w_star = random_with_norm(cfg.m, cfg.n, cfg.wstar_norm, rng);
        return make_noisy_quadratic(cfg.m, cfg.n, cfg.spectrum, cfg.sigma2,
                                    std::move(w_star));
      }
      return make_noisy_quadratic_simple(cfg.m, cfg.n, 1.0, cfg.sigma2,
                                         cfg.wstar_norm, cfg.seed);
    }
    case ProblemKind::FiniteSumLeastSquares:
      return make_finite_sum_least_squares(cfg.m, cfg.n, cfg.n_samples,
                                           cfg.region_radius, cfg.seed);
    case ProblemKind::TwoLayerNet:
      return make_two_layer_net(cfg.m, cfg.n, cfg.n_samples,
                                cfg.region_radius, cfg.seed);
  }
  throw std::invalid_argument("make_problem: unknown kind");
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "noisy_quadratic") return ProblemKind::NoisyQuadratic;
  if (s == "finite_sum_least_squares") {
    return ProblemKind::FiniteSumLeastSquares;
  }
  if (s == "two_layer_net") return ProblemKind::TwoLayerNet;
  throw std::invalid_argument("unknown problem kind: " + s);
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::NoisyQuadratic:
      return "noisy_quadratic";
    case ProblemKind::FiniteSumLeastSquares:
      return "finite_sum_least_squares";
    case ProblemKind::TwoLayerNet:
      return "two_layer_net";
  }
  return "unknown";
}

AssumptionAudit audit_problem(const ProblemOracle& p, int trials,
                              std::uint64_t seed) {
  AssumptionAudit out;
  Rng rng = Rng::for_stream(seed, 0, 0x6175646974ULL);
  const std::size_t m = p.rows();
  const std::size_t n = p.cols();
  const double radius = 2.0;

  // Smoothness on random pairs near the minimizer.
  double worst_ratio = 0.0;
  for (int t = 0; t < trials; ++t) {
    Matrix wa = p.w_star() + random_with_norm(m, n, radius * rng.next_uniform(), rng);
    Matrix wb = p.w_star() + random_with_norm(m, n, radius * rng.next_uniform(), rng);
    const double dw = frobenius_norm(wa - wb);
    if (dw < 1e-9) continue;
    const double dg =
        frobenius_norm(p.full_gradient(wa) - p.full_gradient(wb));
    worst_ratio = std::max(worst_ratio, dg / (p.lipschitz() * dw));
  }
  out.worst_smoothness_ratio = worst_ratio;
  out.smoothness_ok = worst_ratio <= 1.0 + 1e-8;

  // Unbiasedness and variance cap via Monte Carlo at a random point.
  Matrix w = p.w_star() + random_with_norm(m, n, radius, rng);
  const Matrix mean_grad = p.full_gradient(w);
  const int draws = std::max(trials * 40, 2000);
  Matrix acc(m, n);
  double var_acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    const Matrix g = p.minibatch_gradient(w, 1, rng.next_u64());
    acc += g;
    const Matrix dev = g - mean_grad;
    var_acc += frobenius_inner(dev, dev);
  }
  acc *= 1.0 / draws;
  out.bias_norm = frobenius_norm(acc - mean_grad);
  out.max_sample_variance = var_acc / draws;
  // 4-sigma style CI on the mean deviation.
  const double ci =
      4.0 * std::sqrt(out.max_sample_variance / draws) + 1e-12;
  out.unbiased_ok = out.bias_norm <= ci;
  out.variance_ok = out.max_sample_variance <= p.sigma2() * 1.02 + 1e-12;

  out.minimizer_ok = frobenius_norm(p.full_gradient(p.w_star())) <= 1e-10;
  return out;
}

}  // namespace muonlab
