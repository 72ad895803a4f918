#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lnmix/config.hpp"
#include "lnmix/errors.hpp"
#include "lnmix/features.hpp"
#include "lnmix/kernels.hpp"
#include "lnmix/krr.hpp"
#include "lnmix/pipeline.hpp"
#include "lnmix/sparsify.hpp"

namespace py = pybind11;
using namespace lnmix;

namespace {

KernelSpec make_spec(const std::string& kind, int degree, double gamma,
                     double c) {
  if (kind == "poly" || kind == "polynomial") {
    return KernelSpec::polynomial(degree, gamma, c);
  }
  if (kind == "gaussian") return KernelSpec::gaussian(gamma);
  if (kind == "laplacian") return KernelSpec::laplacian(gamma);
  throw PreconditionError("unknown kernel kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "explainable sparse regression for lanthanide mixing enthalpies";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<lnmix::LookupError>(m, "LookupError");
  py::register_exception<PreconditionError>(m, "PreconditionError");
  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("mae", &ErrorReport::mae)
      .def_readonly("mse", &ErrorReport::mse)
      .def_readonly("me", &ErrorReport::me)
      .def("__repr__", [](const ErrorReport& e) {
        return "ErrorReport(mae=" + std::to_string(e.mae) +
               ", mse=" + std::to_string(e.mse) +
               ", me=" + std::to_string(e.me) + ")";
      });

  m.def(
      "gram",
      [](const std::string& kind, const Eigen::MatrixXd& X, int degree,
         double gamma, double c) {
        return gram(make_spec(kind, degree, gamma, c), X);
      },
      py::arg("kind"), py::arg("X"), py::arg("degree") = 3,
      py::arg("gamma") = 1.0, py::arg("c") = 1.0,
      "Kernel Gram matrix of one sample set.");

  py::class_<KrrModel>(m, "KrrModel")
      .def_readonly("lambda_", &KrrModel::lambda)
      .def_readonly("alpha", &KrrModel::alpha)
      .def_readonly("solve_residual", &KrrModel::solve_residual)
      .def_readonly("jitter", &KrrModel::jitter);

  m.def(
      "krr_fit",
      [](const std::string& kind, double lambda, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, int degree, double gamma, double c,
         bool standardize) {
        return krr_fit(make_spec(kind, degree, gamma, c), lambda, X, y,
                       standardize);
      },
      py::arg("kind"), py::arg("lambda_"), py::arg("X"), py::arg("y"),
      py::arg("degree") = 3, py::arg("gamma") = 1.0, py::arg("c") = 1.0,
      py::arg("standardize") = true,
      "Kernel ridge fit; returns an opaque model for krr_predict.");

  m.def("krr_predict", &krr_predict, py::arg("model"), py::arg("X_new"));

  m.def("errors", &errors, py::arg("y_true"), py::arg("y_pred"),
        "MAE / MSE / mean-error report.");

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def_readonly("values", &FeatureMatrix::values)
      .def_readonly("max_degree", &FeatureMatrix::max_degree)
      .def_readonly("tier_counts", &FeatureMatrix::tier_counts)
      .def_property_readonly("labels",
                             [](const FeatureMatrix& fm) {
                               std::vector<std::string> out;
                               out.reserve(fm.columns.size());
                               for (const auto& col : fm.columns) {
                                 out.push_back(col.label);
                               }
                               return out;
                             })
      .def_property_readonly("removed", [](const FeatureMatrix& fm) {
        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(fm.removed.size());
        for (const auto& r : fm.removed) out.emplace_back(r.label, r.reason);
        return out;
      });

  m.def("expand", &expand, py::arg("base"), py::arg("base_labels"),
        py::arg("max_degree"), py::arg("threads") = 1,
        "All multiset products of base columns up to max_degree.");

  py::class_<LassoResult>(m, "LassoResult")
      .def_readonly("gamma", &LassoResult::gamma)
      .def_readonly("intercept", &LassoResult::intercept)
      .def_readonly("active_set", &LassoResult::active_set)
      .def_readonly("lambda_hat", &LassoResult::lambda_hat)
      .def_readonly("sweeps", &LassoResult::sweeps)
      .def_readonly("converged", &LassoResult::converged)
      .def_readonly("objective", &LassoResult::objective)
      .def_readonly("objective_history", &LassoResult::objective_history);

  m.def("lasso_lambda_max", &lasso_lambda_max, py::arg("V"), py::arg("y"),
        py::arg("fit_intercept") = true,
        "Smallest penalty that zeroes every coefficient.");

  m.def(
      "lasso_l1",
      [](const Eigen::MatrixXd& V, const Eigen::VectorXd& y, double lambda_hat,
         double tol, int max_sweeps, bool fit_intercept) {
        LassoOptions opts;
        opts.tol = tol;
        opts.max_sweeps = max_sweeps;
        opts.fit_intercept = fit_intercept;
        return lasso_l1(V, y, lambda_hat, opts);
      },
      py::arg("V"), py::arg("y"), py::arg("lambda_hat"), py::arg("tol") = -1.0,
      py::arg("max_sweeps") = 2000, py::arg("fit_intercept") = true,
      "Coordinate-descent fit of the penalized least-squares objective.");

  py::class_<SparseTerm>(m, "SparseTerm")
      .def_readonly("label", &SparseTerm::label)
      .def_readonly("coefficient", &SparseTerm::coefficient);

  py::class_<SparseFormula>(m, "SparseFormula")
      .def_readonly("k", &SparseFormula::k)
      .def_readonly("terms", &SparseFormula::terms)
      .def_readonly("intercept", &SparseFormula::intercept)
      .def_readonly("err", &SparseFormula::err)
      .def("render", &SparseFormula::render)
      .def("__repr__", &SparseFormula::render);

  m.def(
      "l0_search",
      [](const Eigen::MatrixXd& V, const std::vector<std::string>& labels,
         const Eigen::VectorXd& y, int k_max) {
        L0Result res = l0_search(V, labels, y, k_max);
        return py::make_tuple(res.formulas, res.skipped_singular);
      },
      py::arg("V"), py::arg("labels"), py::arg("y"), py::arg("k_max"),
      "Exhaustive best-subset refits; returns (formulas, skipped_singular).");

  m.def(
      "run_stage",
      [](const std::string& config_path, const std::string& stage) {
        RunConfig cfg = load_config(config_path);
        StageOutput out;
        if (stage == "gen-data") {
          out = cmd_gen_data(cfg);
        } else if (stage == "krr-scan") {
          out = cmd_krr_scan(cfg);
        } else if (stage == "krr-fit") {
          out = cmd_krr_fit(cfg);
        } else if (stage == "sparsify") {
          out = cmd_sparsify(cfg);
        } else if (stage == "report") {
          out = cmd_report(cfg);
        } else {
          throw PreconditionError("unknown stage: " + stage);
        }
        py::dict d;
        d["stage"] = out.stage;
        d["artifacts"] = out.artifacts;
        d["wall_clock_sec"] = out.wall_clock_sec;
        d["skipped"] = out.skipped;
        return d;
      },
      py::arg("config_path"), py::arg("stage"),
      "Run one pipeline stage from a JSON config file.");
}
