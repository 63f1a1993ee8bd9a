// Python bindings for the core toolkit: orthogonalization, single optimizer
// steps, training runs on the synthetic problems, and the closed-form bound
// calculators.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "muonlab/harness.hpp"
#include "muonlab/orthogonalizer.hpp"
#include "muonlab/problems.hpp"
#include "muonlab/svd.hpp"
#include "muonlab/theory.hpp"

namespace py = pybind11;
using namespace muonlab;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style |
                                               py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)),
           static_cast<std::size_t>(a.shape(1)));
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t j = 0; j < a.shape(1); ++j) {
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
    }
  }
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
    }
  }
  return out;
}

OrthMethod method_from(const std::string& kind, int ns_steps) {
  OrthMethod m;
  if (kind == "svd") {
    m.kind = OrthKind::ExactSvd;
  } else if (kind == "ns5") {
    m.kind = OrthKind::NewtonSchulz5;
  } else {
    throw std::invalid_argument("method must be 'svd' or 'ns5'");
  }
  m.ns_steps = ns_steps;
  m.validate();
  return m;
}

MuonVariant variant_from_name(const std::string& name) {
  for (MuonVariant v :
       {MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
        MuonVariant::NoNesterovWd, MuonVariant::NesterovWd}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

BoundConstants constants_from(double L, double sigma2, std::size_t n,
                              double f_w0, double w0_norm, double wstar_norm,
                              double delta, double eta, double lambda,
                              double beta) {
  BoundConstants c;
  c.L = L;
  c.sigma2 = sigma2;
  c.n = n;
  c.f_w0 = f_w0;
  c.w0_norm = w0_norm;
  c.wstar_norm = wstar_norm;
  c.delta = delta;
  c.eta = eta;
  c.lambda = lambda;
  c.beta = beta;
  return c;
}

std::unique_ptr<ProblemOracle> problem_from(const std::string& kind,
                                            std::size_t m, std::size_t n,
                                            double sigma2, double wstar_norm,
                                            std::size_t n_samples,
                                            double region_radius,
                                            std::uint64_t seed) {
  ProblemConfig cfg;
  cfg.kind = problem_kind_from_string(kind);
  cfg.m = m;
  cfg.n = n;
  cfg.sigma2 = sigma2;
  cfg.wstar_norm = wstar_norm;
  cfg.n_samples = n_samples;
  cfg.region_radius = region_radius;
  cfg.seed = seed;
  return make_problem(cfg);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Muon optimizer toolkit core";

  mod.def(
      "orthogonalize",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             a,
         const std::string& method, int ns_steps) {
        const OrthResult res = orthogonalize(to_matrix(a),
                                             method_from(method, ns_steps));
        return py::make_tuple(to_array(res.o), res.degenerate);
      },
      py::arg("a"), py::arg("method") = "svd", py::arg("ns_steps") = 5,
      "Polar-factor orthogonalization; returns (O, degenerate).");

  mod.def(
      "singular_values",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             a) { return svd(to_matrix(a)).s; },
      py::arg("a"));

  mod.def(
      "nuclear_norm",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             a) { return nuclear_norm(to_matrix(a)); },
      py::arg("a"));

  mod.def("ns_scalar_iterate",
          [](double x, int steps) {
            return ns_scalar_iterate(x, NsCoefficients{}, steps);
          },
          py::arg("x"), py::arg("steps") = 5);

  mod.def(
      "muon_step",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             w,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             grad,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             momentum,
         double eta, double lam, double beta, bool nesterov, bool weight_decay,
         const std::string& method, int ns_steps) {
        MuonConfig cfg;
        cfg.eta = eta;
        cfg.lambda = lam;
        cfg.beta = beta;
        cfg.nesterov = nesterov;
        cfg.weight_decay = weight_decay;
        cfg.orth = method_from(method, ns_steps);
        const Matrix wm = to_matrix(w);
        MuonState state{to_matrix(momentum), 0, false};
        const auto res = muon_step(wm, to_matrix(grad), cfg, state);
        return py::make_tuple(to_array(res.w), to_array(res.state.momentum),
                              res.update_norm, res.degenerate);
      },
      py::arg("w"), py::arg("grad"), py::arg("momentum"), py::arg("eta"),
      py::arg("lam") = 0.0, py::arg("beta") = 0.95,
      py::arg("nesterov") = true, py::arg("weight_decay") = false,
      py::arg("method") = "svd", py::arg("ns_steps") = 5,
      "One Muon update; returns (w_next, momentum_next, update_norm, "
      "degenerate).");

  mod.def(
      "predict_cbs",
      [](double beta, double lam, double sigma2, double epsilon) {
        BoundConstants c;
        c.beta = beta;
        c.lambda = lam;
        c.sigma2 = sigma2;
        py::dict out;
        for (MuonVariant v :
             {MuonVariant::NoNesterovNoWd, MuonVariant::NesterovNoWd,
              MuonVariant::NoNesterovWd, MuonVariant::NesterovWd}) {
          out[py::str(to_string(v))] = critical_batch_muon(c, v, epsilon);
        }
        return out;
      },
      py::arg("beta") = 0.95, py::arg("lam") = 0.1, py::arg("sigma2") = 1.0,
      py::arg("epsilon") = 0.01,
      "Closed-form critical batch size per variant.");

  mod.def(
      "theorem_bound",
      [](const std::string& variant, long T, long b, double L, double sigma2,
         std::size_t n, double f_w0, double w0_norm, double wstar_norm,
         double delta, double eta, double lam, double beta) {
        const BoundBreakdown bb = theorem_bound(
            constants_from(L, sigma2, n, f_w0, w0_norm, wstar_norm, delta,
                           eta, lam, beta),
            variant_from_name(variant), T, b);
        py::dict out;
        out["x"] = bb.x;
        out["y"] = bb.y;
        out["z"] = bb.z;
        out["sublinear"] = bb.sublinear;
        out["total"] = bb.total;
        py::dict terms;
        for (const auto& [name, value] : bb.terms) {
          terms[py::str(name)] = value;
        }
        out["terms"] = terms;
        return out;
      },
      py::arg("variant"), py::arg("T"), py::arg("b"), py::arg("L") = 1.0,
      py::arg("sigma2") = 0.0, py::arg("n") = 1, py::arg("f_w0") = 0.0,
      py::arg("w0_norm") = 0.0, py::arg("wstar_norm") = 0.0,
      py::arg("delta") = 0.0, py::arg("eta") = 0.01, py::arg("lam") = 0.0,
      py::arg("beta") = 0.95,
      "Convergence-theorem right-hand side with the X/Y/Z ledger.");

  mod.def("param_norm_bound",
          [](long t, std::size_t n, double w0_norm, double eta, double lam) {
            BoundConstants c;
            c.n = n;
            c.w0_norm = w0_norm;
            c.eta = eta;
            c.lambda = lam;
            return param_norm_bound(c, t);
          },
          py::arg("t"), py::arg("n"), py::arg("w0_norm"), py::arg("eta"),
          py::arg("lam"));

  mod.def("steps_needed",
          [](double x, double y, double epsilon, long b) {
            return steps_needed(ComplexityModel{x, y, 0.0, epsilon}, b);
          },
          py::arg("x"), py::arg("y"), py::arg("epsilon"), py::arg("b"));

  mod.def("critical_batch",
          [](double y, double epsilon) {
            return 2.0 * y / epsilon;
          },
          py::arg("y"), py::arg("epsilon"));

  mod.def(
      "run_training",
      [](const std::string& problem, std::size_t m, std::size_t n,
         double sigma2, double wstar_norm, std::size_t n_samples,
         double region_radius, std::uint64_t problem_seed, double eta,
         double lam, double beta, bool nesterov, bool weight_decay,
         const std::string& method, long batch, long steps,
         std::uint64_t seed, double w0_norm) {
        const auto oracle =
            problem_from(problem, m, n, sigma2, wstar_norm, n_samples,
                         region_radius, problem_seed);
        MuonConfig cfg;
        cfg.eta = eta;
        cfg.lambda = lam;
        cfg.beta = beta;
        cfg.nesterov = nesterov;
        cfg.weight_decay = weight_decay;
        cfg.orth = method_from(method, 5);

        RunOptions opts;
        opts.batch = batch;
        opts.max_steps = steps;
        opts.seed = seed;
        opts.w0_norm = w0_norm;
        const RunResult res = run_training(*oracle, OptimizerSpec{cfg}, opts);

        py::dict out;
        std::vector<double> loss, grad_norm, param_norm, momentum_error;
        for (const RunRecord& r : res.records) {
          loss.push_back(r.loss);
          grad_norm.push_back(r.grad_norm);
          param_norm.push_back(r.param_norm);
          momentum_error.push_back(r.momentum_error);
        }
        out["loss"] = loss;
        out["grad_norm"] = grad_norm;
        out["param_norm"] = param_norm;
        out["momentum_error"] = momentum_error;
        out["status"] = res.status == RunStatus::Completed ? "completed"
                        : res.status == RunStatus::Diverged
                            ? "diverged"
                            : "bound_violation";
        out["final_w"] = to_array(res.final_w);
        return out;
      },
      py::arg("problem") = "noisy_quadratic", py::arg("m") = 16,
      py::arg("n") = 8, py::arg("sigma2") = 1.0, py::arg("wstar_norm") = 1.0,
      py::arg("n_samples") = 256, py::arg("region_radius") = 10.0,
      py::arg("problem_seed") = 0, py::arg("eta") = 0.05,
      py::arg("lam") = 0.1, py::arg("beta") = 0.95,
      py::arg("nesterov") = true, py::arg("weight_decay") = true,
      py::arg("method") = "svd", py::arg("batch") = 16,
      py::arg("steps") = 200, py::arg("seed") = 0, py::arg("w0_norm") = 5.0,
      "Deterministic Muon training run on a synthetic problem.");

  mod.def(
      "audit_problem",
      [](const std::string& problem, std::size_t m, std::size_t n,
         double sigma2, double wstar_norm, std::size_t n_samples,
         double region_radius, std::uint64_t problem_seed, int trials,
         std::uint64_t seed) {
        const auto oracle =
            problem_from(problem, m, n, sigma2, wstar_norm, n_samples,
                         region_radius, problem_seed);
        const AssumptionAudit a = audit_problem(*oracle, trials, seed);
        py::dict out;
        out["smoothness_ok"] = a.smoothness_ok;
        out["unbiased_ok"] = a.unbiased_ok;
        out["variance_ok"] = a.variance_ok;
        out["minimizer_ok"] = a.minimizer_ok;
        out["all_ok"] = a.all_ok();
        return out;
      },
      py::arg("problem") = "noisy_quadratic", py::arg("m") = 16,
      py::arg("n") = 8, py::arg("sigma2") = 1.0, py::arg("wstar_norm") = 1.0,
      py::arg("n_samples") = 256, py::arg("region_radius") = 10.0,
      py::arg("problem_seed") = 0, py::arg("trials") = 30,
      py::arg("seed") = 0, "Monte-Carlo check of the oracle assumptions.");
}
