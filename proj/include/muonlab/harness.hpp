#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "muonlab/optimizer.hpp"
#include "muonlab/problems.hpp"
#include "muonlab/theory.hpp"

namespace muonlab {

class BoundViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either a Muon configuration or a baseline one.
using OptimizerSpec = std::variant<MuonConfig, BaselineConfig>;

std::string describe(const OptimizerSpec& spec);
/// Stable fingerprint of an optimizer configuration (FNV-1a over the
/// canonical description).
std::uint64_t config_fingerprint(const OptimizerSpec& spec);

struct RunRecord {
  long step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;       // exact, from the oracle
  double param_norm = 0.0;
  double momentum_error = 0.0;  // ||M_t - grad f(W_t)||_F (Muon only)
  double update_norm = 0.0;
  bool degenerate = false;
  double elapsed_s = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

enum class RunStatus { Completed, Diverged, BoundViolation };

struct RunResult {
  std::vector<RunRecord> records;
  RunStatus status = RunStatus::Completed;
  std::string message;
  Matrix final_w;
};

struct RunAssertions {
  bool prop1_param_bound = false;
  bool prop2_grad_bound = false;
  /// When set, a violation raises instead of marking the result.
  bool hard_fail = true;
};

struct RunOptions {
  long batch = 1;
  long max_steps = 100;
  std::uint64_t seed = 0;
  RunAssertions assertions{};
  std::optional<Matrix> w0;  // default: deterministic draw from the seed
  double w0_norm = 5.0;      // used when w0 is not given
};

/// One deterministic trajectory. Identical (problem, spec, opts) replay
/// bit-identically.
RunResult run_training(const ProblemOracle& problem, const OptimizerSpec& spec,
                       const RunOptions& opts);

enum class ThresholdMetric { Loss, GradNorm };

/// First step index whose metric is <= target.
std::optional<long> steps_to_threshold(const std::vector<RunRecord>& records,
                                       ThresholdMetric metric, double target);

struct StabilityPoint {
  double eta = 0.0;
  bool at_threshold = false;  // eta == 1/lambda marker column
  double mean_final_grad_norm = 0.0;
  double mean_final_loss = 0.0;
  int diverged_runs = 0;
  int total_runs = 0;
};

/// Final gradient norm / loss per eta across a grid crossing 1/lambda.
std::vector<StabilityPoint> stability_sweep(const ProblemOracle& problem,
                                            MuonConfig base_cfg, double lambda,
                                            const std::vector<double>& eta_grid,
                                            long steps, long batch,
                                            const std::vector<std::uint64_t>& seeds,
                                            double w0_norm);

struct SweepRecord {
  long batch = 0;
  bool reached = false;          // at least one seed hit the target
  int reached_count = 0;
  int total_runs = 0;
  double mean_steps = 0.0;       // over seeds that reached
  double stddev_steps = 0.0;
  double sfo = 0.0;              // mean_steps * batch
  double threshold = 0.0;
};

struct BatchSweepOptions {
  std::vector<long> batch_grid;
  double target = 0.0;
  ThresholdMetric metric = ThresholdMetric::Loss;
  std::vector<std::uint64_t> seeds;
  long max_steps = 5000;
  LrScaling lr_rule = LrScaling::Sqrt;
  long reference_batch = 16;
  double w0_norm = 5.0;
};

/// Mean steps-to-target and SFO complexity per batch size, learning rate
/// scaled per the rule.
std::vector<SweepRecord> batch_sweep(const ProblemOracle& problem,
                                     const OptimizerSpec& base_spec,
                                     const BatchSweepOptions& opts);

/// Index of the SFO minimizer among records that reached the target.
std::optional<std::size_t> sfo_argmin(const std::vector<SweepRecord>& sweep);

/// Least-squares fit of 1/T vs 1/b (the linearized X/T + Y/b = eps model).
/// Returns the model plus R^2 goodness of fit in *r2 when non-null.
ComplexityModel fit_complexity_model(const std::vector<SweepRecord>& sweep,
                                     double epsilon, double* r2 = nullptr);

struct BetaSweepRow {
  double beta = 0.0;
  MuonVariant variant;
  double predicted_cbs = 0.0;           // 2Y/eps from the theorem coefficient
  std::optional<long> empirical_cbs;    // argmin of measured SFO
};

struct BetaSweepOptions {
  std::vector<double> beta_grid;
  std::vector<MuonVariant> variants;
  BatchSweepOptions batch_opts;
  double lambda = 0.1;
  double base_eta = 0.05;
  double epsilon = 1.0;
};

std::vector<BetaSweepRow> beta_sweep(const ProblemOracle& problem,
                                     const BetaSweepOptions& opts);

// --- artifact emission ---

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows,
              const std::string& path);

void write_run_csv(const std::vector<RunRecord>& records,
                   const std::string& path);
void write_sweep_csv(const std::vector<SweepRecord>& sweep,
                     const std::string& path);
void write_bound_csv(const BoundBreakdown& breakdown, const std::string& path);

struct PlotSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::optional<double> vline;  // e.g. the stability threshold
  std::vector<PlotSeries> series;
};

void emit_svg_plot(const PlotSpec& spec, const std::string& path);

}  // namespace muonlab
