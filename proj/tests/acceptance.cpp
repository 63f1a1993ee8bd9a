// End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "muonlab/harness.hpp"
#include "muonlab/orthogonalizer.hpp"
#include "muonlab/problems.hpp"
#include "muonlab/rng.hpp"
#include "muonlab/svd.hpp"
#include "muonlab/theory.hpp"

using namespace muonlab;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << idx << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, 0, 0xACC);
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = rng.next_normal();
  }
  return out;
}

Matrix random_orthonormal(std::size_t m, std::size_t n, std::uint64_t seed) {
  const SvdFactors f = svd(random_matrix(m, n, seed));
  return matmul_bt(f.u, f.v);
}

// Matrix with prescribed singular values and random singular subspaces.
Matrix with_spectrum(std::size_t m, std::size_t n,
                     const std::vector<double>& s, std::uint64_t seed) {
  const Matrix u = random_orthonormal(m, n, seed * 2 + 1);
  const Matrix v = random_orthonormal(n, n, seed * 2 + 2);
  Matrix us = u;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) us(i, j) *= s[j];
  }
  return matmul_bt(us, v);
}

Matrix normalized_w0(const ProblemOracle& p, double norm, std::uint64_t seed) {
  Matrix w = random_matrix(p.rows(), p.cols(), seed + 9000);
  w *= norm / frobenius_norm(w);
  return w;
}

// --- criterion 1 ---

void criterion_table3() {
  bool ok = true;
  std::ostringstream detail;
  const double expected[] = {0.1, 0.145, 0.2, 0.245};
  const MuonVariant variants[] = {
      MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
      MuonVariant::NoNesterovWd, MuonVariant::NesterovWd};

  BoundConstants c;
  c.beta = 0.95;
  c.lambda = 0.1;
  c.sigma2 = 1.0;
  for (int i = 0; i < 4; ++i) {
    const double got = critical_batch_muon(c, variants[i], 1.0);
    if (std::abs(got - expected[i]) > 1e-12) ok = false;
  }
  // scaling in sigma2 / epsilon
  c.sigma2 = 2.0;
  for (int i = 0; i < 4; ++i) {
    const double got = critical_batch_muon(c, variants[i], 0.01);
    if (std::abs(got - expected[i] * 200.0) > 1e-9) ok = false;
  }
  report(1, "critical batch coefficients at beta=0.95, lambda=0.1", ok);
}

// --- criterion 2 ---

void criterion_orth_band() {
  bool ok = true;
  std::ostringstream detail;
  OrthMethod ns;
  ns.kind = OrthKind::NewtonSchulz5;

  const std::pair<std::size_t, std::size_t> shapes[] = {
      {8, 4}, {16, 8}, {64, 32}};
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 200 && ok; ++trial) {
    const auto [m, n] = shapes[trial % 3];
    Rng rng = Rng::for_stream(42, trial, 0xBA2D);
    // spectrum in [0.3, 1]: normalized singular values stay >= 0.05 at n=32
    std::vector<double> s(n);
    for (double& v : s) v = 0.3 + 0.7 * rng.next_uniform();
    const Matrix c = with_spectrum(m, n, s, trial);

    const Matrix approx = newton_schulz5(c, ns).o;
    const Matrix exact = orthogonalize_exact(c).o;
    const double dist = frobenius_norm(approx - exact);
    const double band = 0.35 * std::sqrt(static_cast<double>(n));
    worst = std::max(worst, dist / band);
    if (dist > band) {
      ok = false;
      detail << "trial " << trial << " dist " << dist << " > " << band;
    }
  }

  // scalar-quintic oracle vs matrix iteration on isotropic inputs
  for (std::uint64_t seed = 0; seed < 5 && ok; ++seed) {
    const std::size_t n = 4;
    const Matrix q = random_orthonormal(16, n, 7000 + seed);
    const Matrix x5 = newton_schulz5(q, ns).o;
    const double expected = ns_scalar_iterate(
        1.0 / std::sqrt(static_cast<double>(n)), ns.ns_coeffs, ns.ns_steps);
    const SvdFactors f = svd(x5);
    for (double sv : f.s) {
      if (std::abs(sv - expected) > 1e-9) {
        ok = false;
        detail << "isotropic seed " << seed << " sv " << sv;
      }
    }
  }
  if (ok) detail << "worst band fraction " << worst;
  report(2, "newton-schulz within band of exact polar factor", ok,
         detail.str());
}

// --- criterion 3 ---

void criterion_prop_bounds() {
  bool ok = true;
  std::ostringstream detail;
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, 1.0, 1.0, 77);
  const double lambda = 0.1;
  const double etas[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  const double betas[] = {0.9, 0.95};

  int runs = 0;
  for (double eta : etas) {
    for (double beta : betas) {
      MuonConfig cfg;
      cfg.eta = eta;
      cfg.lambda = lambda;
      cfg.beta = beta;
      cfg.weight_decay = true;
      cfg.nesterov = true;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RunOptions opts;
        opts.batch = 4;
        opts.max_steps = 60;
        opts.seed = seed;
        opts.assertions.prop1_param_bound = true;
        opts.assertions.prop2_grad_bound = true;
        try {
          const RunResult res = run_training(*p, OptimizerSpec{cfg}, opts);
          ++runs;
          if (res.status != RunStatus::Completed) {
            ok = false;
            detail << "run eta=" << eta << " seed=" << seed << " status "
                   << static_cast<int>(res.status);
          }
          // at eta = 1/lambda the hard cap sqrt(n)/lambda holds from t >= 1
          if (eta == 10.0) {
            const double cap = std::sqrt(4.0) / lambda;
            for (std::size_t t = 1; t < res.records.size(); ++t) {
              if (res.records[t].param_norm > cap + 1e-9) ok = false;
            }
            if (frobenius_norm(res.final_w) > cap + 1e-9) ok = false;
          }
        } catch (const std::exception& e) {
          ok = false;
          detail << "eta=" << eta << " beta=" << beta << " seed=" << seed
                 << ": " << e.what();
        }
      }
    }
  }
  if (ok) detail << runs << " runs, zero violations";
  report(3, "proposition 1/2 norm bounds along trajectories", ok,
         detail.str());
}

// --- criterion 4 ---

void criterion_stability() {
  bool ok = true;
  std::ostringstream detail;
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, 0.0, 1.0, 5);

  struct Setup {
    double lambda;
    std::vector<double> grid;
  };
  const Setup setups[] = {{0.0625, {4.0, 8.0, 16.0, 24.0, 32.0}},
                          {0.125, {2.0, 4.0, 8.0, 12.0, 16.0}}};
  for (const Setup& setup : setups) {
    MuonConfig base;
    base.beta = 0.9;
    const auto pts = stability_sweep(*p, base, setup.lambda, setup.grid, 10, 1,
                                     {0, 1, 2, 3, 4}, 1e5);
    // best point among eta <= 1/lambda must be the largest such eta
    const double threshold = 1.0 / setup.lambda;
    std::size_t best_stable = 0;
    std::size_t last_stable = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].eta > threshold + 1e-12) continue;
      last_stable = i;
      if (pts[i].mean_final_grad_norm <
          pts[best_stable].mean_final_grad_norm) {
        best_stable = i;
      }
    }
    if (best_stable != last_stable) {
      ok = false;
      detail << "lambda=" << setup.lambda << " best stable eta "
             << pts[best_stable].eta << " != " << pts[last_stable].eta;
    }
    for (const StabilityPoint& pt : pts) {
      if (pt.eta <= threshold + 1e-12) continue;
      const bool worse = pt.diverged_runs == pt.total_runs ||
                         pt.mean_final_grad_norm >
                             pts[last_stable].mean_final_grad_norm;
      if (!worse) {
        ok = false;
        detail << "lambda=" << setup.lambda << " eta=" << pt.eta
               << " not worse (" << pt.mean_final_grad_norm << " vs "
               << pts[last_stable].mean_final_grad_norm << ")";
      }
    }
  }
  report(4, "stability threshold at eta = 1/lambda", ok, detail.str());
}

// --- criterion 5 ---

void criterion_variance_law() {
  const double sigma2 = 2.0;
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, sigma2, 1.0, 13);
  const Matrix w = normalized_w0(*p, 3.0, 1);
  const Matrix mean = p->full_gradient(w);

  Rng rng = Rng::for_stream(555, 0, 0x1E44A);
  const long batches[] = {1, 4, 16, 64};
  std::vector<double> log_b, log_v;
  for (long b : batches) {
    double acc = 0.0;
    const int draws = 6000;
    for (int d = 0; d < draws; ++d) {
      const Matrix g = p->minibatch_gradient(w, b, rng.next_u64());
      const Matrix dev = g - mean;
      acc += frobenius_inner(dev, dev);
    }
    log_b.push_back(std::log(static_cast<double>(b)));
    log_v.push_back(std::log(acc / draws));
  }

  // least squares line log V = a + s log b
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = 4.0;
  for (int i = 0; i < 4; ++i) {
    sx += log_b[i];
    sy += log_v[i];
    sxx += log_b[i] * log_b[i];
    sxy += log_b[i] * log_v[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const double sigma2_hat = std::exp(intercept);

  std::ostringstream detail;
  detail << "slope " << slope << ", intercept sigma2 " << sigma2_hat;
  const bool ok = std::abs(slope - (-1.0)) <= 0.1 &&
                  std::abs(sigma2_hat / sigma2 - 1.0) <= 0.1;
  report(5, "minibatch variance follows sigma2/b", ok, detail.str());
}

// --- criterion 6 ---

void criterion_theorem_bound() {
  bool ok = true;
  std::ostringstream detail;
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, 1.0, 1.0, 21);
  const long batch = 16;

  const MuonVariant variants[] = {
      MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
      MuonVariant::NoNesterovWd, MuonVariant::NesterovWd};
  for (MuonVariant v : variants) {
    const bool nesterov =
        v == MuonVariant::NesterovNoWd || v == MuonVariant::NesterovWd;
    const bool wd =
        v == MuonVariant::NoNesterovWd || v == MuonVariant::NesterovWd;

    MuonConfig cfg;
    cfg.eta = 0.05;
    cfg.beta = 0.9;
    cfg.nesterov = nesterov;
    cfg.weight_decay = wd;
    cfg.lambda = wd ? 0.1 : 0.0;

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Matrix w0 = normalized_w0(*p, 5.0, seed);

      BoundConstants c;
      c.L = p->lipschitz();
      c.sigma2 = p->sigma2();
      c.n = p->cols();
      c.f_w0 = p->loss(w0);
      c.w0_norm = frobenius_norm(w0);
      c.wstar_norm = frobenius_norm(p->w_star());
      c.delta = frobenius_norm(p->full_gradient(w0));  // M_0 = 0
      c.eta = cfg.eta;
      c.lambda = cfg.lambda;
      c.beta = cfg.beta;

      for (long T : {100L, 1000L}) {
        RunOptions opts;
        opts.batch = batch;
        opts.max_steps = T;
        opts.seed = seed;
        opts.w0 = w0;
        const RunResult res = run_training(*p, OptimizerSpec{cfg}, opts);
        double avg = 0.0;
        for (const RunRecord& r : res.records) avg += r.grad_norm;
        avg /= static_cast<double>(res.records.size());

        const double bound = theorem_bound(c, v, T, batch).total;
        if (avg > bound) {
          ok = false;
          detail << to_string(v) << " T=" << T << " seed=" << seed << " avg "
                 << avg << " > bound " << bound << "; ";
        }
      }
    }
  }
  report(6, "theorem bound never violated (one-sided)", ok, detail.str());
}

// --- criterion 7 ---

void criterion_fit_roundtrip() {
  bool ok = true;
  std::ostringstream detail;

  // exact round trip
  const ComplexityModel truth{400.0, 5.0, 0.0, 0.2};
  std::vector<SweepRecord> clean;
  for (long b : {32L, 48L, 64L, 96L, 128L, 192L}) {
    SweepRecord rec;
    rec.batch = b;
    rec.reached = true;
    rec.mean_steps = steps_needed(truth, b);
    clean.push_back(rec);
  }
  const ComplexityModel fit0 = fit_complexity_model(clean, truth.epsilon);
  if (std::abs(fit0.x / truth.x - 1.0) > 1e-6 ||
      std::abs(fit0.y / truth.y - 1.0) > 1e-6) {
    ok = false;
    detail << "exact fit off: X " << fit0.x << " Y " << fit0.y << "; ";
  }

  // 5% multiplicative noise: Y within 15%
  Rng rng = Rng::for_stream(2024, 0, 0xF17);
  std::vector<SweepRecord> noisy = clean;
  for (SweepRecord& rec : noisy) {
    rec.mean_steps *= 1.0 + 0.05 * (2.0 * rng.next_uniform() - 1.0);
  }
  const ComplexityModel fit1 = fit_complexity_model(noisy, truth.epsilon);
  if (std::abs(fit1.y / truth.y - 1.0) > 0.15) {
    ok = false;
    detail << "noisy Y " << fit1.y << " vs " << truth.y << "; ";
  }

  // empirical: predicted b* within one grid step of the measured SFO argmin
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, 4.0, 0.0, 31);
  MuonConfig cfg;
  cfg.eta = 0.01;
  cfg.beta = 0.9;
  cfg.nesterov = true;
  cfg.weight_decay = false;

  BatchSweepOptions opts;
  opts.batch_grid = {1, 2, 4, 8, 16, 32};
  opts.target = 0.2;
  opts.metric = ThresholdMetric::GradNorm;
  opts.seeds = {0, 1, 2, 3, 4};
  opts.max_steps = 8000;
  opts.lr_rule = LrScaling::Fixed;
  opts.w0_norm = 2.0;
  const auto sweep = batch_sweep(*p, OptimizerSpec{cfg}, opts);
  const auto argmin = sfo_argmin(sweep);
  if (!argmin) {
    ok = false;
    detail << "no batch reached the target; ";
  } else {
    const ComplexityModel fit2 = fit_complexity_model(sweep, 1.0);
    const double pred = critical_batch(fit2);
    const std::size_t j = *argmin;
    const double lo =
        static_cast<double>(opts.batch_grid[j > 0 ? j - 1 : 0]);
    const double hi = static_cast<double>(
        opts.batch_grid[std::min(j + 1, opts.batch_grid.size() - 1)]);
    detail << "pred b* " << pred << ", empirical " << sweep[j].batch;
    if (pred < lo || pred > hi) ok = false;
  }
  report(7, "complexity model fit round trip and b* prediction", ok,
         detail.str());
}

// --- criterion 8 ---

void criterion_beta_trend() {
  bool ok = true;
  std::ostringstream detail;
  auto p = make_noisy_quadratic_simple(8, 4, 1.0, 4.0, 0.0, 31);

  const std::vector<long> grid = {1, 2, 4, 8, 16, 32};
  auto grid_index = [&](long b) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == b) return i;
    }
    return grid.size();
  };

  const MuonVariant variants[] = {
      MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
      MuonVariant::NoNesterovWd, MuonVariant::NesterovWd};
  for (MuonVariant v : variants) {
    const bool nesterov =
        v == MuonVariant::NesterovNoWd || v == MuonVariant::NesterovWd;
    const bool wd =
        v == MuonVariant::NoNesterovWd || v == MuonVariant::NesterovWd;

    std::size_t prev_idx = grid.size();
    for (double beta : {0.7, 0.9, 0.95}) {
      MuonConfig cfg;
      cfg.eta = 0.002;
      cfg.beta = beta;
      cfg.nesterov = nesterov;
      cfg.weight_decay = wd;
      cfg.lambda = wd ? 0.01 : 0.0;

      BatchSweepOptions opts;
      opts.batch_grid = grid;
      opts.target = 0.25;
      opts.metric = ThresholdMetric::GradNorm;
      opts.seeds = {0, 1, 2, 3, 4};
      opts.max_steps = 8000;
      opts.lr_rule = LrScaling::Fixed;
      opts.w0_norm = 2.0;
      const auto sweep = batch_sweep(*p, OptimizerSpec{cfg}, opts);
      const auto argmin = sfo_argmin(sweep);
      if (!argmin) {
        ok = false;
        detail << to_string(v) << " beta=" << beta << " no feasible batch; ";
        continue;
      }
      const std::size_t idx = grid_index(sweep[*argmin].batch);
      if (prev_idx != grid.size() && idx > prev_idx + 1) {
        ok = false;
        detail << to_string(v) << " b* rose " << grid[prev_idx] << " -> "
               << grid[idx] << " at beta=" << beta << "; ";
      }
      prev_idx = std::min(idx, prev_idx);
    }
  }
  report(8, "empirical critical batch non-increasing in beta", ok,
         detail.str());
}

// --- criterion 9 ---

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void criterion_determinism() {
  auto p = make_noisy_quadratic_simple(6, 4, 1.0, 1.0, 1.0, 3);
  MuonConfig cfg;
  cfg.eta = 0.1;
  cfg.lambda = 0.1;
  cfg.weight_decay = true;
  RunOptions opts;
  opts.batch = 4;
  opts.max_steps = 50;
  opts.seed = 99;

  const std::string p1 = "acceptance_run_a.csv";
  const std::string p2 = "acceptance_run_b.csv";
  write_run_csv(run_training(*p, OptimizerSpec{cfg}, opts).records, p1);
  write_run_csv(run_training(*p, OptimizerSpec{cfg}, opts).records, p2);
  const bool ok = slurp(p1) == slurp(p2) && !slurp(p1).empty();
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  report(9, "repeated runs emit byte-identical csv", ok);
}

}  // namespace

int main() {
  criterion_table3();
  criterion_orth_band();
  criterion_prop_bounds();
  criterion_stability();
  criterion_variance_law();
  criterion_theorem_bound();
  criterion_fit_roundtrip();
  criterion_beta_trend();
  criterion_determinism();
  if (g_failures > 0) {
    std::cout << g_failures << " criteria failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
