#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glx/cli.hpp"
#include "glx/closed_form.hpp"
#include "glx/covariance.hpp"
#include "glx/solver.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

glx::CovarianceInput covariance_from_dense(const Eigen::MatrixXd& sigma) {
  return glx::CovarianceInput(glx::SymmetricMatrix::from_dense_checked(sigma, 1e-10));
}

py::object finite_or_none(double v) {
  if (std::isfinite(v)) return py::float_(v);
  return py::none();
}

py::dict conditions_dict(const glx::ConditionReport& rep) {
  py::dict d;
  d["lambda"] = rep.lambda;
  d["alpha"] = rep.alpha;
  d["acyclic"] = rep.acyclic;
  d["positive_definite"] = rep.pd;
  d["gap_ok"] = rep.gap_ok;
  d["gap_lhs"] = rep.gap_lhs;
  d["gap_rhs_thresholded"] = finite_or_none(rep.gap_rhs_thresholded);
  d["gap_rhs_offsupport"] = finite_or_none(rep.gap_rhs_offsupport);
  d["all_exact"] = rep.all_exact();
  py::list comps;
  for (const glx::ComponentConditionRecord& c : rep.components) {
    py::dict cd;
    cd["id"] = c.id;
    cd["size"] = c.size;
    cd["acyclic"] = c.acyclic;
    cd["positive_definite"] = c.pd;
    cd["gap_ok"] = c.gap_ok;
    cd["exact"] = c.exact();
    comps.append(cd);
  }
  d["components"] = comps;
  if (rep.suff_stat_defined) {
    d["sufficient_statistic"] = py::make_tuple(rep.suff_stat_lhs, rep.suff_stat_rhs);
  } else {
    d["sufficient_statistic"] = py::none();
  }
  return d;
}

py::dict solution_dict(const glx::GlSolution& sol) {
  py::dict d;
  d["estimate"] = sol.estimate.to_dense();
  d["lambda"] = sol.lambda;
  d["method"] = std::string(glx::to_string(sol.method));
  d["objective"] = finite_or_none(sol.objective);
  d["kkt_residual"] = finite_or_none(sol.kkt_residual);
  d["sweeps"] = sol.sweeps;
  d["nnz_offdiag"] = sol.estimate.nnz_offdiag();
  return d;
}

}  // namespace

PYBIND11_MODULE(_glx, m) {
  m.doc() = "sparse inverse covariance estimation via thresholding closed forms";

  m.def(
      "lambda_for_k",
      [](const Eigen::MatrixXd& sigma, int k) {
        return glx::lambda_for_k(covariance_from_dense(sigma), k);
      },
      py::arg("sigma"), py::arg("k"),
      "Midpoint regularization level keeping exactly the k largest off-diagonal "
      "magnitudes.");

  m.def(
      "check",
      [](const Eigen::MatrixXd& sigma, double lam) {
        return conditions_dict(glx::check_conditions(covariance_from_dense(sigma), lam));
      },
      py::arg("sigma"), py::arg("lambda"),
      "Closed-form optimality conditions at this regularization level.");

  m.def(
      "estimate",
      [](const Eigen::MatrixXd& sigma, double lam, const std::string& method, double tol,
         int max_iter) {
        glx::CovarianceInput c = covariance_from_dense(sigma);
        if (method == "closed") {
          glx::GlSolution sol = glx::exact_solution(c, lam);
          sol.kkt_residual = glx::exact_kkt_residual(c, sol.estimate, lam).residual;
          return solution_dict(sol);
        }
        if (method == "approx") {
          glx::GlSolution sol = glx::approx_solution(glx::residue(c, lam));
          sol.kkt_residual = glx::exact_kkt_residual(c, sol.estimate, lam).residual;
          return solution_dict(sol);
        }
        glx::SolverConfig cfg;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        if (method == "glasso") return solution_dict(glx::glasso_solve(c, lam, cfg));
        if (method == "warm") {
          glx::WarmStartResult warm = glx::warm_start_solve(c, lam, cfg);
          py::dict d = solution_dict(warm.solution);
          d["conditions"] = conditions_dict(warm.conditions);
          return d;
        }
        throw std::invalid_argument("unknown method: " + method);
      },
      py::arg("sigma"), py::arg("lambda"), py::arg("method") = "closed",
      py::arg("tol") = 1e-7, py::arg("max_iter") = 10000,
      "Estimate the precision matrix; method is closed, approx, glasso, or warm.");

  m.def(
      "epsilon_certificate",
      [](const Eigen::MatrixXd& sigma, double lam) {
        glx::EpsilonCertificate cert =
            glx::epsilon_certificate(glx::residue(covariance_from_dense(sigma), lam));
        py::dict d;
        d["epsilon"] = cert.unbounded ? py::object(py::none()) : py::float_(cert.epsilon);
        d["unbounded"] = cert.unbounded;
        d["alpha"] = cert.alpha;
        d["delta"] = cert.delta;
        d["girth"] = cert.girth;
        d["p_max"] = cert.p_max;
        d["max_degree"] = cert.max_degree;
        return d;
      },
      py::arg("sigma"), py::arg("lambda"),
      "Entrywise error bound for the approximate closed form.");

  m.def(
      "run_cli", [](const std::vector<std::string>& args) { return glx::run_cli(args); },
      py::arg("args"), "Run the command-line interface in-process; returns the exit code.");
}
