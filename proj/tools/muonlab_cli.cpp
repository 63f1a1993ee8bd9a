// muonlab command-line front end.
//
// Exit codes: 0 success, 1 validation error, 2 assertion failure (a bound or
// oracle check did not hold), 3 I/O error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "muonlab/harness.hpp"
#include "muonlab/orthogonalizer.hpp"
#include "muonlab/problems.hpp"
#include "muonlab/svd.hpp"
#include "muonlab/theory.hpp"

using json = nlohmann::json;
using namespace muonlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitIo = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json default_config() {
  return json{
      {"problem",
       {{"kind", "noisy_quadratic"},
        {"m", 16},
        {"n", 8},
        {"sigma2", 1.0},
        {"spectrum", json::array()},
        {"wstar_norm", 1.0},
        {"n_samples", 256},
        {"region_radius", 10.0},
        {"seed", 0}}},
      {"optimizer",
       {{"name", "muon"},
        {"eta", 0.05},
        {"lambda", 0.1},
        {"beta", 0.95},
        {"nesterov", true},
        {"weight_decay", true},
        {"orth", "svd"},
        {"ns_steps", 5},
        {"beta2", 0.999},
        {"eps", 1e-8}}},
      {"run",
       {{"batch", 16},
        {"steps", 200},
        {"seeds", {0, 1, 2, 3, 4}},
        {"w0_norm", 5.0},
        {"assert_bounds", false}}},
      {"sweep",
       {{"batch_grid", {1, 2, 4, 8, 16, 32}},
        {"eta_grid", json::array()},
        {"beta_grid", {0.7, 0.9, 0.95}},
        {"target", 0.5},
        {"metric", "grad_norm"},
        {"lr_rule", "fixed"},
        {"reference_batch", 16},
        {"max_steps", 4000},
        {"epsilon", 1.0}}}};
}

void merge_checked(json& base, const json& overlay, const std::string& path) {
  for (const auto& [key, value] : overlay.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) {
      throw std::invalid_argument("unknown config key: " + here);
    }
    if (base[key].is_object() && value.is_object()) {
      merge_checked(base[key], value, here);
    } else {
      base[key] = value;
    }
  }
}

void apply_override(json& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must look like key=value: " + kv);
  }
  const std::string dotted = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare strings need no quoting
  }

  json* node = &cfg;
  std::stringstream keys(dotted);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  if (parts.empty()) throw std::invalid_argument("empty override key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) {
      throw std::invalid_argument("unknown config key: " + dotted);
    }
    node = &(*node)[parts[i]];
  }
  if (!node->contains(parts.back())) {
    throw std::invalid_argument("unknown config key: " + dotted);
  }
  (*node)[parts.back()] = value;
}

json load_config(const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  json cfg = default_config();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw IoError("cannot read config file: " + config_path);
    json file_cfg;
    try {
      f >> file_cfg;
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(std::string("config parse error: ") +
                                  e.what());
    }
    merge_checked(cfg, file_cfg, "");
  }
  for (const std::string& kv : overrides) apply_override(cfg, kv);
  return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& out, const json& cfg) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir: " + out);
  std::ofstream snap(dir / "resolved_config.json");
  if (!snap) throw IoError("cannot write resolved config snapshot");
  snap << cfg.dump(2) << "\n";
  if (!snap) throw IoError("failed writing resolved config snapshot");
  return dir;
}

std::unique_ptr<ProblemOracle> build_problem(const json& cfg) {
  const json& p = cfg.at("problem");
  ProblemConfig pc;
  pc.kind = problem_kind_from_string(p.at("kind").get<std::string>());
  pc.m = p.at("m").get<std::size_t>();
  pc.n = p.at("n").get<std::size_t>();
  pc.sigma2 = p.at("sigma2").get<double>();
  pc.spectrum = p.at("spectrum").get<std::vector<double>>();
  pc.wstar_norm = p.at("wstar_norm").get<double>();
  pc.n_samples = p.at("n_samples").get<std::size_t>();
  pc.region_radius = p.at("region_radius").get<double>();
  pc.seed = p.at("seed").get<std::uint64_t>();
  return make_problem(pc);
}

OptimizerSpec build_optimizer(const json& cfg) {
  const json& o = cfg.at("optimizer");
  const std::string name = o.at("name").get<std::string>();
  if (name == "muon") {
    MuonConfig mc;
    mc.eta = o.at("eta").get<double>();
    mc.lambda = o.at("lambda").get<double>();
    mc.beta = o.at("beta").get<double>();
    mc.nesterov = o.at("nesterov").get<bool>();
    mc.weight_decay = o.at("weight_decay").get<bool>();
    const std::string orth = o.at("orth").get<std::string>();
    if (orth == "svd") {
      mc.orth.kind = OrthKind::ExactSvd;
    } else if (orth == "ns5") {
      mc.orth.kind = OrthKind::NewtonSchulz5;
    } else {
      throw std::invalid_argument("optimizer.orth must be svd or ns5");
    }
    mc.orth.ns_steps = o.at("ns_steps").get<int>();
    mc.validate();
    return mc;
  }
  BaselineConfig bc;
  if (name == "momentum_sgd") {
    bc.kind = BaselineKind::MomentumSgd;
  } else if (name == "adamw") {
    bc.kind = BaselineKind::AdamW;
  } else {
    throw std::invalid_argument("optimizer.name must be muon, momentum_sgd "
                                "or adamw");
  }
  bc.eta = o.at("eta").get<double>();
  bc.momentum_or_beta1 = o.at("beta").get<double>();
  bc.beta2 = o.at("beta2").get<double>();
  bc.eps = o.at("eps").get<double>();
  bc.lambda = o.at("lambda").get<double>();
  bc.validate();
  return bc;
}

ThresholdMetric metric_from(const std::string& s) {
  if (s == "loss") return ThresholdMetric::Loss;
  if (s == "grad_norm") return ThresholdMetric::GradNorm;
  throw std::invalid_argument("sweep.metric must be loss or grad_norm");
}

LrScaling lr_rule_from(const std::string& s) {
  if (s == "fixed") return LrScaling::Fixed;
  if (s == "sqrt") return LrScaling::Sqrt;
  if (s == "linear") return LrScaling::Linear;
  throw std::invalid_argument("sweep.lr_rule must be fixed, sqrt or linear");
}

std::vector<std::uint64_t> seeds_from(const json& cfg) {
  return cfg.at("run").at("seeds").get<std::vector<std::uint64_t>>();
}

Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, 0, 0xC11);
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = rng.next_normal();
  }
  return out;
}

// --- subcommand bodies ---

int cmd_predict_cbs(double beta, double lambda, double sigma2,
                    double epsilon) {
  BoundConstants c;
  c.beta = beta;
  c.lambda = lambda;
  c.sigma2 = sigma2;
  const MuonVariant variants[] = {
      MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
      MuonVariant::NoNesterovWd, MuonVariant::NesterovWd};
  for (MuonVariant v : variants) {
    std::cout << to_string(v) << " " << critical_batch_muon(c, v, epsilon)
              << "\n";
  }
  return kExitOk;
}

int cmd_orthcheck(std::size_t m, std::size_t n, int trials,
                  std::uint64_t seed) {
  if (m < n || n == 0) {
    throw std::invalid_argument("orthcheck requires m >= n >= 1");
  }
  OrthMethod ns;
  ns.kind = OrthKind::NewtonSchulz5;
  const double band = 0.35 * std::sqrt(static_cast<double>(n));
  double worst = 0.0;
  double worst_duality = 0.0;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix c = random_matrix(m, n, seed + static_cast<std::uint64_t>(t));
    const Matrix exact = orthogonalize_exact(c).o;
    const Matrix approx = newton_schulz5(c, ns).o;
    const double dist = frobenius_norm(approx - exact);
    worst = std::max(worst, dist);
    if (dist > band) ++failures;

    // exact path must realize the nuclear norm
    const double gap =
        std::abs(frobenius_inner(c, exact) - nuclear_norm(c)) /
        std::max(nuclear_norm(c), 1e-12);
    worst_duality = std::max(worst_duality, gap);
    if (gap > 1e-8) ++failures;
  }
  std::cout << "orthcheck " << m << "x" << n << " trials=" << trials
            << " worst_band_dist=" << worst << " band=" << band
            << " worst_duality_gap=" << worst_duality
            << " failures=" << failures << "\n";
  return failures == 0 ? kExitOk : kExitAssertion;
}

int cmd_train(const json& cfg, const std::string& out, bool assert_bounds) {
  json resolved = cfg;
  resolved["run"]["assert_bounds"] =
      assert_bounds || cfg.at("run").at("assert_bounds").get<bool>();
  const bool asserting = resolved["run"]["assert_bounds"].get<bool>();

  const auto problem = build_problem(resolved);
  const OptimizerSpec spec = build_optimizer(resolved);
  if (asserting) {
    const auto* mc = std::get_if<MuonConfig>(&spec);
    if (!mc || !mc->weight_decay || !mc->stability_ok()) {
      throw std::invalid_argument(
          "--assert-bounds needs muon with weight decay and eta <= 1/lambda");
    }
  }

  const auto dir = prepare_out_dir(out, resolved);
  const json& run = resolved.at("run");
  RunOptions opts;
  opts.batch = run.at("batch").get<long>();
  opts.max_steps = run.at("steps").get<long>();
  opts.seed = seeds_from(resolved).at(0);
  opts.w0_norm = run.at("w0_norm").get<double>();
  opts.assertions.prop1_param_bound = asserting;
  opts.assertions.prop2_grad_bound = asserting;

  const RunResult res = run_training(*problem, spec, opts);
  write_run_csv(res.records, (dir / "run.csv").string());

  PlotSpec plot;
  plot.title = "training loss";
  plot.x_label = "step";
  plot.y_label = "loss";
  plot.log_y = true;
  PlotSeries series;
  series.name = describe(spec).substr(0, 24);
  for (const RunRecord& r : res.records) {
    series.xs.push_back(static_cast<double>(r.step));
    series.ys.push_back(r.loss);
  }
  plot.series.push_back(series);
  emit_svg_plot(plot, (dir / "loss.svg").string());

  const RunRecord& last = res.records.back();
  std::cout << "train status="
            << (res.status == RunStatus::Completed ? "completed"
                : res.status == RunStatus::Diverged ? "diverged"
                                                    : "bound_violation")
            << " steps=" << res.records.size() << " final_loss=" << last.loss
            << " final_grad_norm=" << last.grad_norm << "\n";
  if (res.status == RunStatus::BoundViolation) return kExitAssertion;
  return kExitOk;
}

int cmd_verify_bounds(const json& cfg, const std::string& out) {
  const auto problem = build_problem(cfg);
  const OptimizerSpec spec = build_optimizer(cfg);
  const auto* mc = std::get_if<MuonConfig>(&spec);
  if (!mc) {
    throw std::invalid_argument("verify-bounds applies to the muon optimizer");
  }
  const auto dir = prepare_out_dir(out, cfg);

  const json& run = cfg.at("run");
  const long T = run.at("steps").get<long>();
  const long batch = run.at("batch").get<long>();
  const MuonVariant variant = variant_from(mc->nesterov, mc->weight_decay);

  bool violated = false;
  for (std::uint64_t seed : seeds_from(cfg)) {
    Matrix w0 = random_matrix(problem->rows(), problem->cols(), seed);
    w0 *= run.at("w0_norm").get<double>() / frobenius_norm(w0);

    BoundConstants c;
    c.L = problem->lipschitz();
    c.sigma2 = problem->sigma2();
    c.n = problem->cols();
    c.f_w0 = problem->loss(w0);
    c.w0_norm = frobenius_norm(w0);
    c.wstar_norm = frobenius_norm(problem->w_star());
    c.delta = frobenius_norm(problem->full_gradient(w0));
    c.eta = mc->eta;
    c.lambda = mc->lambda;
    c.beta = mc->beta;

    const BoundBreakdown bb = theorem_bound(c, variant, T, batch);
    if (seed == seeds_from(cfg).front()) {
      write_bound_csv(bb, (dir / "bound.csv").string());
    }

    RunOptions opts;
    opts.batch = batch;
    opts.max_steps = T;
    opts.seed = seed;
    opts.w0 = w0;
    const RunResult res = run_training(*problem, spec, opts);
    double avg = 0.0;
    for (const RunRecord& r : res.records) avg += r.grad_norm;
    avg /= static_cast<double>(res.records.size());

    std::cout << "verify-bounds seed=" << seed << " variant="
              << to_string(variant) << " avg_grad_norm=" << avg
              << " bound=" << bb.total
              << (avg <= bb.total ? " ok" : " VIOLATED") << "\n";
    if (avg > bb.total) violated = true;
  }
  return violated ? kExitAssertion : kExitOk;
}

int cmd_sweep_eta(const json& cfg, const std::string& out) {
  const auto problem = build_problem(cfg);
  const OptimizerSpec spec = build_optimizer(cfg);
  const auto* mc = std::get_if<MuonConfig>(&spec);
  if (!mc) {
    throw std::invalid_argument("sweep-eta applies to the muon optimizer");
  }
  const double lambda = mc->lambda;
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("sweep-eta requires optimizer.lambda > 0");
  }
  const auto dir = prepare_out_dir(out, cfg);

  std::vector<double> grid =
      cfg.at("sweep").at("eta_grid").get<std::vector<double>>();
  if (grid.empty()) {
    for (double f : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
      grid.push_back(f / lambda);
    }
  }
  const json& run = cfg.at("run");
  const auto pts = stability_sweep(*problem, *mc, lambda, grid,
                                   run.at("steps").get<long>(),
                                   run.at("batch").get<long>(),
                                   seeds_from(cfg),
                                   run.at("w0_norm").get<double>());

  std::vector<std::vector<std::string>> rows;
  PlotSeries series{"final grad norm", {}, {}};
  for (const StabilityPoint& pt : pts) {
    std::ostringstream eta_s, grad_s, loss_s;
    eta_s.precision(17);
    grad_s.precision(17);
    loss_s.precision(17);
    eta_s << pt.eta;
    grad_s << pt.mean_final_grad_norm;
    loss_s << pt.mean_final_loss;
    rows.push_back({eta_s.str(), pt.at_threshold ? "1" : "0", grad_s.str(),
                    loss_s.str(), std::to_string(pt.diverged_runs),
                    std::to_string(pt.total_runs)});
    series.xs.push_back(pt.eta);
    series.ys.push_back(pt.mean_final_grad_norm);
    std::cout << "sweep-eta eta=" << pt.eta
              << " mean_final_grad_norm=" << pt.mean_final_grad_norm
              << " diverged=" << pt.diverged_runs << "/" << pt.total_runs
              << (pt.at_threshold ? " (eta = 1/lambda)" : "") << "\n";
  }
  emit_csv({"eta", "at_threshold", "mean_final_grad_norm", "mean_final_loss",
            "diverged_runs", "total_runs"},
           rows, (dir / "stability.csv").string());

  PlotSpec plot;
  plot.title = "stability sweep";
  plot.x_label = "eta";
  plot.y_label = "final grad norm";
  plot.log_y = true;
  plot.vline = 1.0 / lambda;
  plot.series.push_back(series);
  emit_svg_plot(plot, (dir / "stability.svg").string());
  return kExitOk;
}

BatchSweepOptions sweep_options(const json& cfg) {
  const json& s = cfg.at("sweep");
  BatchSweepOptions opts;
  opts.batch_grid = s.at("batch_grid").get<std::vector<long>>();
  opts.target = s.at("target").get<double>();
  opts.metric = metric_from(s.at("metric").get<std::string>());
  opts.seeds = seeds_from(cfg);
  opts.max_steps = s.at("max_steps").get<long>();
  opts.lr_rule = lr_rule_from(s.at("lr_rule").get<std::string>());
  opts.reference_batch = s.at("reference_batch").get<long>();
  opts.w0_norm = cfg.at("run").at("w0_norm").get<double>();
  return opts;
}

int cmd_sweep_batch(const json& cfg, const std::string& out) {
  const auto problem = build_problem(cfg);
  const OptimizerSpec spec = build_optimizer(cfg);
  const auto dir = prepare_out_dir(out, cfg);
  const BatchSweepOptions opts = sweep_options(cfg);

  const auto sweep = batch_sweep(*problem, spec, opts);
  write_sweep_csv(sweep, (dir / "sweep.csv").string());

  PlotSeries series{"sfo", {}, {}};
  for (const SweepRecord& r : sweep) {
    std::cout << "sweep-batch b=" << r.batch;
    if (r.reached) {
      std::cout << " mean_steps=" << r.mean_steps << " sfo=" << r.sfo;
      series.xs.push_back(static_cast<double>(r.batch));
      series.ys.push_back(r.sfo);
    } else {
      std::cout << " not_reached";
    }
    std::cout << "\n";
  }

  const double epsilon = cfg.at("sweep").at("epsilon").get<double>();
  try {
    double r2 = 0.0;
    const ComplexityModel model = fit_complexity_model(sweep, epsilon, &r2);
    const auto argmin = sfo_argmin(sweep);
    std::cout << "fit X=" << model.x << " Y=" << model.y << " R2=" << r2
              << " predicted_b*=" << critical_batch(model);
    if (argmin) std::cout << " empirical_b*=" << sweep[*argmin].batch;
    std::cout << "\n";
  } catch (const FitError& e) {
    std::cout << "fit skipped: " << e.what() << "\n";
  }

  PlotSpec plot;
  plot.title = "sfo complexity vs batch";
  plot.x_label = "batch";
  plot.y_label = "sfo";
  plot.log_x = true;
  plot.log_y = true;
  plot.series.push_back(series);
  emit_svg_plot(plot, (dir / "sfo.svg").string());
  return kExitOk;
}

int cmd_sweep_beta(const json& cfg, const std::string& out) {
  const auto problem = build_problem(cfg);
  const auto dir = prepare_out_dir(out, cfg);

  BetaSweepOptions opts;
  opts.beta_grid = cfg.at("sweep").at("beta_grid").get<std::vector<double>>();
  opts.variants = {MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
                   MuonVariant::NoNesterovWd, MuonVariant::NesterovWd};
  opts.batch_opts = sweep_options(cfg);
  opts.lambda = cfg.at("optimizer").at("lambda").get<double>();
  opts.base_eta = cfg.at("optimizer").at("eta").get<double>();
  opts.epsilon = cfg.at("sweep").at("epsilon").get<double>();

  const auto rows = beta_sweep(*problem, opts);
  std::vector<std::vector<std::string>> csv_rows;
  for (const BetaSweepRow& row : rows) {
    std::ostringstream beta_s, pred_s;
    beta_s.precision(17);
    pred_s.precision(17);
    beta_s << row.beta;
    pred_s << row.predicted_cbs;
    csv_rows.push_back({to_string(row.variant), beta_s.str(), pred_s.str(),
                        row.empirical_cbs ? std::to_string(*row.empirical_cbs)
                                          : "none"});
    std::cout << "sweep-beta " << to_string(row.variant)
              << " beta=" << row.beta << " predicted_b*=" << row.predicted_cbs
              << " empirical_b*=";
    if (row.empirical_cbs) std::cout << *row.empirical_cbs;
    else std::cout << "none";
    std::cout << "\n";
  }
  emit_csv({"variant", "beta", "predicted_cbs", "empirical_cbs"}, csv_rows,
           (dir / "beta_sweep.csv").string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Muon optimizer toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory for artifacts");
  app.add_option("--set", overrides,
                 "dotted config override, e.g. optimizer.eta=0.1");

  auto* orthcheck = app.add_subcommand(
      "orthcheck", "compare Newton-Schulz against the exact polar factor");
  std::size_t oc_m = 16, oc_n = 8;
  int oc_trials = 100;
  std::uint64_t oc_seed = 0;
  orthcheck->add_option("--m", oc_m, "rows");
  orthcheck->add_option("--n", oc_n, "columns");
  orthcheck->add_option("--trials", oc_trials, "number of random matrices");
  orthcheck->add_option("--seed", oc_seed, "rng seed");

  auto* train = app.add_subcommand("train", "run a single training job");
  bool assert_bounds = false;
  train->add_flag("--assert-bounds", assert_bounds,
                  "enforce the norm-bound propositions at every step");

  auto* verify =
      app.add_subcommand("verify-bounds", "check the convergence theorem "
                                          "against measured trajectories");
  auto* sweep_batch =
      app.add_subcommand("sweep-batch", "steps-to-target across batch sizes");
  auto* sweep_beta = app.add_subcommand(
      "sweep-beta", "critical batch size across momentum values");
  auto* sweep_eta = app.add_subcommand(
      "sweep-eta", "stability sweep across learning rates");

  auto* predict = app.add_subcommand(
      "predict-cbs", "closed-form critical batch size for all four variants");
  double pc_beta = 0.95, pc_lambda = 0.1, pc_sigma2 = 1.0, pc_epsilon = 0.01;
  predict->add_option("--beta", pc_beta, "momentum");
  predict->add_option("--lambda", pc_lambda, "weight decay");
  predict->add_option("--sigma2", pc_sigma2, "gradient variance");
  predict->add_option("--epsilon", pc_epsilon, "target accuracy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (predict->parsed()) {
      return cmd_predict_cbs(pc_beta, pc_lambda, pc_sigma2, pc_epsilon);
    }
    if (orthcheck->parsed()) {
      return cmd_orthcheck(oc_m, oc_n, oc_trials, oc_seed);
    }
    const json cfg = load_config(config_path, overrides);
    if (train->parsed()) return cmd_train(cfg, out_dir, assert_bounds);
    if (verify->parsed()) return cmd_verify_bounds(cfg, out_dir);
    if (sweep_batch->parsed()) return cmd_sweep_batch(cfg, out_dir);
    if (sweep_beta->parsed()) return cmd_sweep_beta(cfg, out_dir);
    if (sweep_eta->parsed()) return cmd_sweep_eta(cfg, out_dir);
    std::cerr << "no subcommand\n";
    return kExitValidation;
  } catch (const BoundViolationError& e) {
    std::cerr << "bound violation: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
