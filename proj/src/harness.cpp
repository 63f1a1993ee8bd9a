#include "muonlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace muonlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Matrix deterministic_w0(const ProblemOracle& problem, std::uint64_t seed,
                        double norm) {
  Rng rng = Rng::for_stream(seed, 0, 0x7730ULL);
  Matrix w(problem.rows(), problem.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = rng.next_normal();
  }
  const double f = frobenius_norm(w);
  if (f > 0.0 && norm > 0.0) w *= norm / f;
  return w;
}

}  // namespace

std::string describe(const OptimizerSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* muon = std::get_if<MuonConfig>(&spec)) {
    os << "muon;eta=" << muon->eta << ";lambda=" << muon->lambda
       << ";beta=" << muon->beta << ";nesterov=" << muon->nesterov
       << ";wd=" << muon->weight_decay << ";orth="
       << (muon->orth.kind == OrthKind::ExactSvd ? "svd" : "ns5")
       << ";ns_steps=" << muon->orth.ns_steps;
  } else {
    const auto& bl = std::get<BaselineConfig>(spec);
    os << (bl.kind == BaselineKind::MomentumSgd ? "momentum_sgd" : "adamw")
       << ";eta=" << bl.eta << ";m=" << bl.momentum_or_beta1
       << ";beta2=" << bl.beta2 << ";eps=" << bl.eps
       << ";lambda=" << bl.lambda;
  }
  return os.str();
}

std::uint64_t config_fingerprint(const OptimizerSpec& spec) {
  const std::string s = describe(spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunResult run_training(const ProblemOracle& problem, const OptimizerSpec& spec,
                       const RunOptions& opts) {
  if (opts.batch < 1 || opts.max_steps < 0) {
    throw std::invalid_argument("run_training: invalid batch or step count");
  }
  const bool is_muon = std::holds_alternative<MuonConfig>(spec);
  if (is_muon) std::get<MuonConfig>(spec).validate();
  else std::get<BaselineConfig>(spec).validate();

  const std::uint64_t fp = config_fingerprint(spec);
  Matrix w = opts.w0 ? *opts.w0
                     : deterministic_w0(problem, opts.seed, opts.w0_norm);
  problem.check_shape(w);

  // Bound constants for the online Prop-1/Prop-2 assertions.
  BoundConstants bc;
  const bool asserting =
      opts.assertions.prop1_param_bound || opts.assertions.prop2_grad_bound;
  if (asserting) {
    if (!is_muon) {
      throw std::invalid_argument(
          "run_training: norm-bound assertions apply to Muon only");
    }
    const auto& mc = std::get<MuonConfig>(spec);
    if (!mc.weight_decay || !mc.stability_ok()) {
      throw StabilityConditionError(
          "run_training: assertions require weight decay with eta <= "
          "1/lambda");
    }
    bc.L = problem.lipschitz();
    bc.n = problem.cols();
    bc.eta = mc.eta;
    bc.lambda = mc.lambda;
    bc.beta = mc.beta;
    bc.w0_norm = frobenius_norm(w);
    bc.wstar_norm = frobenius_norm(problem.w_star());
  }

  RunResult out{{}, RunStatus::Completed, "", w};
  out.records.reserve(static_cast<std::size_t>(opts.max_steps));

  MuonState muon_state = MuonState::zero(w.rows(), w.cols());
  BaselineState bl_state = BaselineState::zero(w.rows(), w.cols());

  const auto t_start = std::chrono::steady_clock::now();
  for (long t = 0; t < opts.max_steps; ++t) {
    const std::uint64_t grad_stream =
        Rng::for_stream(opts.seed, static_cast<std::uint64_t>(t), fp)
            .next_u64();
    RunRecord rec;
    rec.step = t;
    rec.seed = opts.seed;
    rec.config_hash = fp;
    rec.loss = problem.loss(w);
    const Matrix full_grad = problem.full_gradient(w);
    rec.grad_norm = frobenius_norm(full_grad);
    rec.param_norm = frobenius_norm(w);

    try {
      const Matrix grad =
          problem.minibatch_gradient(w, opts.batch, grad_stream);
      if (is_muon) {
        auto res = muon_step(w, grad, std::get<MuonConfig>(spec), muon_state);
        rec.momentum_error = frobenius_norm(res.state.momentum - full_grad);
        rec.update_norm = res.update_norm;
        rec.degenerate = res.degenerate;
        w = std::move(res.w);
        muon_state = std::move(res.state);
      } else {
        auto res =
            baseline_step(w, grad, std::get<BaselineConfig>(spec), bl_state);
        rec.update_norm = res.update_norm;
        w = std::move(res.w);
        bl_state = std::move(res.state);
      }
    } catch (const NumericError& e) {
      rec.elapsed_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
      out.records.push_back(rec);
      out.status = RunStatus::Diverged;
      out.message = e.what();
      out.final_w = w;
      return out;
    }

    rec.elapsed_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    out.records.push_back(rec);

    if (asserting) {
      const long tn = t + 1;  // bounds checked on the post-step iterate
      if (opts.assertions.prop1_param_bound) {
        const double bound = param_norm_bound(bc, tn);
        if (frobenius_norm(w) > bound * (1.0 + 1e-12) + 1e-12) {
          const std::string msg =
              "parameter norm bound violated at step " + std::to_string(tn);
          if (opts.assertions.hard_fail) throw BoundViolationError(msg);
          out.status = RunStatus::BoundViolation;
          out.message = msg;
        }
      }
      if (opts.assertions.prop2_grad_bound) {
        const double bound = grad_norm_bound(bc, tn);
        const double gn = frobenius_norm(problem.full_gradient(w));
        if (gn > bound * (1.0 + 1e-12) + 1e-12) {
          const std::string msg =
              "gradient norm bound violated at step " + std::to_string(tn);
          if (opts.assertions.hard_fail) throw BoundViolationError(msg);
          out.status = RunStatus::BoundViolation;
          out.message = msg;
        }
      }
    }
  }
  out.final_w = w;
  return out;
}

std::optional<long> steps_to_threshold(const std::vector<RunRecord>& records,
                                       ThresholdMetric metric, double target) {
  for (const RunRecord& r : records) {
    const double v =
        metric == ThresholdMetric::Loss ? r.loss : r.grad_norm;
    if (v <= target) return r.step;
  }
  return std::nullopt;
}

std::vector<StabilityPoint> stability_sweep(
    const ProblemOracle& problem, MuonConfig base_cfg, double lambda,
    const std::vector<double>& eta_grid, long steps, long batch,
    const std::vector<std::uint64_t>& seeds, double w0_norm) {
  std::vector<StabilityPoint> out;
  for (double eta : eta_grid) {
    MuonConfig cfg = base_cfg;
    cfg.eta = eta;
    cfg.lambda = lambda;
    cfg.weight_decay = true;

    StabilityPoint pt;
    pt.eta = eta;
    pt.at_threshold = std::abs(eta * lambda - 1.0) <= 1e-12;
    double grad_acc = 0.0;
    double loss_acc = 0.0;
    for (std::uint64_t seed : seeds) {
      RunOptions opts;
      opts.batch = batch;
      opts.max_steps = steps;
      opts.seed = seed;
      opts.w0_norm = w0_norm;
      const RunResult res = run_training(problem, cfg, opts);
      ++pt.total_runs;
      if (res.status == RunStatus::Diverged) {
        ++pt.diverged_runs;
        // Diverged runs report the last finite metrics observed.
      }
      const RunRecord& last = res.records.back();
      grad_acc += frobenius_norm(problem.full_gradient(res.final_w));
      loss_acc += last.loss;
    }
    pt.mean_final_grad_norm = grad_acc / static_cast<double>(pt.total_runs);
    pt.mean_final_loss = loss_acc / static_cast<double>(pt.total_runs);
    out.push_back(pt);
  }
  return out;
}

std::vector<SweepRecord> batch_sweep(const ProblemOracle& problem,
                                     const OptimizerSpec& base_spec,
                                     const BatchSweepOptions& opts) {
  if (!std::is_sorted(opts.batch_grid.begin(), opts.batch_grid.end())) {
    throw std::invalid_argument("batch_sweep: grid must be sorted ascending");
  }
  std::vector<SweepRecord> out;
  for (long b : opts.batch_grid) {
    OptimizerSpec spec = base_spec;
    if (auto* muon = std::get_if<MuonConfig>(&spec)) {
      muon->eta = scaled_lr(muon->eta, b, opts.lr_rule, opts.reference_batch);
    } else {
      auto& bl = std::get<BaselineConfig>(spec);
      bl.eta = scaled_lr(bl.eta, b, opts.lr_rule, opts.reference_batch);
    }

    SweepRecord rec;
    rec.batch = b;
    rec.threshold = opts.target;
    std::vector<double> hits;
    for (std::uint64_t seed : opts.seeds) {
      RunOptions ro;
      ro.batch = b;
      ro.max_steps = opts.max_steps;
      ro.seed = seed;
      ro.w0_norm = opts.w0_norm;
      const RunResult res = run_training(problem, spec, ro);
      ++rec.total_runs;
      const auto t_hat =
          steps_to_threshold(res.records, opts.metric, opts.target);
      if (t_hat) {
        ++rec.reached_count;
        hits.push_back(static_cast<double>(*t_hat));
      }
    }
    if (!hits.empty()) {
      rec.reached = true;
      double mean = 0.0;
      for (double h : hits) mean += h;
      mean /= static_cast<double>(hits.size());
      double var = 0.0;
      for (double h : hits) var += (h - mean) * (h - mean);
      rec.mean_steps = mean;
      rec.stddev_steps =
          hits.size() > 1 ? std::sqrt(var / static_cast<double>(hits.size() - 1))
                          : 0.0;
      rec.sfo = mean * static_cast<double>(b);
    }
    out.push_back(rec);
  }
  return out;
}

std::optional<std::size_t> sfo_argmin(const std::vector<SweepRecord>& sweep) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!sweep[i].reached) continue;
    if (!best || sweep[i].sfo < sweep[*best].sfo) best = i;
  }
  return best;
}

ComplexityModel fit_complexity_model(const std::vector<SweepRecord>& sweep,
                                     double epsilon, double* r2) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("fit_complexity_model: epsilon must be > 0");
  }
  std::vector<double> xs, ys;  // x = 1/b, y = 1/T
  for (const SweepRecord& rec : sweep) {
    if (!rec.reached || rec.mean_steps <= 0.0) continue;
    xs.push_back(1.0 / static_cast<double>(rec.batch));
    ys.push_back(1.0 / rec.mean_steps);
  }
  if (xs.size() < 2) {
    throw FitError("fit_complexity_model: need >= 2 feasible grid points");
  }

  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) {
    throw FitError("fit_complexity_model: degenerate abscissae");
  }
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  // 1/T = eps/X - (Y/X) (1/b)
  if (!(intercept > 0.0)) {
    throw FitError("fit_complexity_model: non-positive intercept (all T "
                   "equal or model infeasible)");
  }
  ComplexityModel model;
  model.epsilon = epsilon;
  model.x = epsilon / intercept;
  model.y = -slope * model.x;
  model.z = 0.0;
  if (!(model.y > 0.0)) {
    throw FitError("fit_complexity_model: fitted Y is not positive");
  }

  if (r2) {
    const double mean_y = sy / n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double pred = intercept + slope * xs[i];
      ss_res += (ys[i] - pred) * (ys[i] - pred);
      ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    *r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return model;
}

std::vector<BetaSweepRow> beta_sweep(const ProblemOracle& problem,
                                     const BetaSweepOptions& opts) {
  std::vector<BetaSweepRow> out;
  for (MuonVariant variant : opts.variants) {
    const bool nesterov = variant == MuonVariant::NesterovNoWd ||
                          variant == MuonVariant::NesterovWd;
    const bool wd = variant == MuonVariant::NoNesterovWd ||
                    variant == MuonVariant::NesterovWd;
    for (double beta : opts.beta_grid) {
      MuonConfig cfg;
      cfg.eta = opts.base_eta;
      cfg.beta = beta;
      cfg.nesterov = nesterov;
      cfg.weight_decay = wd;
      cfg.lambda = wd ? opts.lambda : 0.0;
      cfg.orth.kind = OrthKind::ExactSvd;

      BetaSweepRow row;
      row.beta = beta;
      row.variant = variant;

      BoundConstants bc;
      bc.sigma2 = problem.sigma2();
      bc.beta = beta;
      bc.lambda = opts.lambda;
      row.predicted_cbs = critical_batch_muon(bc, variant, opts.epsilon);

      const auto sweep = batch_sweep(problem, cfg, opts.batch_opts);
      if (const auto idx = sfo_argmin(sweep)) {
        row.empirical_cbs = sweep[*idx].batch;
      }
      out.push_back(row);
    }
  }
  return out;
}

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows,
              const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) f << ',';
    f << header[i];
  }
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) f << ',';
      f << row[i];
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

void write_run_csv(const std::vector<RunRecord>& records,
                   const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const RunRecord& r : records) {
    rows.push_back({std::to_string(r.step), fmt(r.loss), fmt(r.grad_norm),
                    fmt(r.param_norm), fmt(r.momentum_error),
                    fmt(r.update_norm), r.degenerate ? "1" : "0",
                    std::to_string(r.seed), std::to_string(r.config_hash)});
  }
  emit_csv({"step", "loss", "grad_norm", "param_norm", "momentum_error",
            "update_norm", "degenerate", "seed", "config_hash"},
           rows, path);
}

void write_sweep_csv(const std::vector<SweepRecord>& sweep,
                     const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const SweepRecord& r : sweep) {
    rows.push_back({std::to_string(r.batch),
                    r.reached ? fmt(r.mean_steps) : "not_reached",
                    fmt(r.stddev_steps), r.reached ? fmt(r.sfo) : "not_reached",
                    fmt(r.threshold), std::to_string(r.reached_count),
                    std::to_string(r.total_runs)});
  }
  emit_csv({"batch", "mean_steps", "stddev_steps", "sfo", "threshold",
            "reached_count", "total_runs"},
           rows, path);
}

void write_bound_csv(const BoundBreakdown& breakdown,
                     const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, value] : breakdown.terms) {
    rows.push_back({name, fmt(value)});
  }
  rows.push_back({"X", fmt(breakdown.x)});
  rows.push_back({"Y", fmt(breakdown.y)});
  rows.push_back({"sublinear", fmt(breakdown.sublinear)});
  rows.push_back({"Z", fmt(breakdown.z)});
  rows.push_back({"total", fmt(breakdown.total)});
  emit_csv({"term", "value"}, rows, path);
}

void emit_svg_plot(const PlotSpec& spec, const std::string& path) {
  constexpr double width = 720.0, height = 480.0;
  constexpr double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : spec.series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (spec.log_x && s.xs[i] <= 0.0) continue;
      if (spec.log_y && s.ys[i] <= 0.0) continue;
      xmin = std::min(xmin, tx(s.xs[i]));
      xmax = std::max(xmax, tx(s.xs[i]));
      ymin = std::min(ymin, ty(s.ys[i]));
      ymax = std::max(ymax, ty(s.ys[i]));
    }
  }
  if (spec.vline) {
    xmin = std::min(xmin, tx(*spec.vline));
    xmax = std::max(xmax, tx(*spec.vline));
  }
  if (xmin > xmax) { xmin = 0.0; xmax = 1.0; }
  if (ymin > ymax) { ymin = 0.0; ymax = 1.0; }
  if (xmax - xmin < 1e-12) { xmax = xmin + 1.0; }
  if (ymax - ymin < 1e-12) { ymax = ymin + 1.0; }

  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) {
    return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph;
  };

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ofstream f(path);
  if (!f) throw std::runtime_error("emit_svg_plot: cannot open " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
    << "font-size=\"15\">" << spec.title << "</text>\n";
  f << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
    << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label
    << (spec.log_x ? " (log)" : "") << "</text>\n";
  f << "<text x=\"16\" y=\"" << height / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << height / 2 << ")\">" << spec.y_label << (spec.log_y ? " (log)" : "")
    << "</text>\n";
  f << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
    << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  if (spec.vline) {
    f << "<line x1=\"" << px(*spec.vline) << "\" y1=\"" << mt << "\" x2=\""
      << px(*spec.vline) << "\" y2=\"" << mt + ph
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }

  int color_idx = 0;
  double legend_y = mt + 14.0;
  for (const PlotSeries& s : spec.series) {
    const char* color = colors[color_idx % 8];
    ++color_idx;
    f << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (spec.log_x && s.xs[i] <= 0.0) continue;
      if (spec.log_y && s.ys[i] <= 0.0) continue;
      f << px(s.xs[i]) << ',' << py(s.ys[i]) << ' ';
    }
    f << "\"/>\n";
    f << "<text x=\"" << ml + pw - 6 << "\" y=\"" << legend_y
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
      << s.name << "</text>\n";
    legend_y += 14.0;
  }
  f << "</svg>\n";
  if (!f) throw std::runtime_error("emit_svg_plot: write failed for " + path);
}

}  // namespace muonlab
