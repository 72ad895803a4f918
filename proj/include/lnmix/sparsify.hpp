#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lnmix/krr.hpp"  // ErrorReport

namespace lnmix {

// --- l1 stage: coordinate descent on  sum_i (<g,v_i> + b - y_i)^2 + l*|g|_1
//
// The objective is a plain sum of squares (no 1/N), so the penalty scale is
// tied to the scale of the columns and target handed in; the pipeline feeds
// unit-norm columns and a unit-norm centered target to make the fixed path
// values meaningful (see pipeline.hpp).

struct LassoOptions {
  double tol = -1;        // < 0 selects the default 1e-8 * stddev(y)
  int max_sweeps = 2000;
  bool fit_intercept = true;
};

struct LassoResult {
  Eigen::VectorXd gamma;
  double intercept = 0;
  std::vector<int> active_set;  // ascending indices with |gamma_j| > 1e-10
  double lambda_hat = 0;
  int sweeps = 0;
  bool converged = false;
  double objective = 0;
  // Objective before the first sweep, then after every sweep; checked
  // non-increasing as each sweep completes.
  std::vector<double> objective_history;
};

// Smallest penalty that drives every coefficient to exactly zero.
double lasso_lambda_max(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                        bool fit_intercept = true);

// Cyclic coordinate descent with exact soft-threshold updates.  Convergence:
// max absolute coefficient change over a full sweep <= tol.  On a tolerance
// miss within max_sweeps the result is returned with converged=false.  The
// objective is checked to be non-increasing after every sweep.
LassoResult lasso_l1(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                     double lambda_hat, const LassoOptions& opts = {},
                     const Eigen::VectorXd* warm_gamma = nullptr);

struct PathEntry {
  double lambda_hat = 0;
  long active_size = 0;
  ErrorReport err;  // on the full dataset handed to the path
};

struct PathResult {
  std::vector<PathEntry> entries;
  std::vector<LassoResult> results;
};

// Warm-started sweep over a strictly increasing penalty list.
PathResult lasso_path(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                      const std::vector<double>& lambdas,
                      const LassoOptions& opts = {});

// The default penalty ladder 0.001, 0.006, ..., 0.096 (20 points).
std::vector<double> default_lambda_path(double start = 0.001,
                                        double step = 0.005,
                                        double stop = 0.096);

// Active set at the smallest penalty whose active size <= cap; falls back to
// the final path point when none qualifies.  Indices ascending.
std::vector<int> select_support(const PathResult& path, int cap);

// --- l0 stage: exhaustive best-subset least squares ------------------------

struct SparseTerm {
  std::string label;
  double coefficient = 0;
};

// A k-term closed-form fit with its intercept and training errors.
struct SparseFormula {
  int k = 0;  // term count
  std::vector<SparseTerm> terms;
  double intercept = 0;
  ErrorReport err;

  // e.g. "H_E = 0.9247*m*(1-m)*diff(V)^2 + 0.0173"
  std::string render() const;
};

// Shared scalar least-squares primitive: normal equations assembled with
// sequential dots, fixed-order Cholesky, explicit residual pass.  Both the
// production search and the acceptance oracle call this, so equal inputs give
// bit-equal outputs.
struct StrictOls {
  Eigen::VectorXd beta;  // per selected column, in the order given
  double intercept = 0;
  ErrorReport err;
  bool singular = false;
};

StrictOls ols_fit_strict(const Eigen::MatrixXd& V, const std::vector<int>& cols,
                         const Eigen::VectorXd& y);

struct L0Result {
  std::vector<SparseFormula> formulas;      // one per k = 1..k_max
  std::vector<std::string> skipped_singular;  // labels of skipped subsets
};

// Exhaustive C(|support|, k) least-squares search on raw columns for each
// k = 1..k_max, minimizing training MSE with a first-in-lexicographic-order
// tie-break.  |support| is guarded at 40 columns.
L0Result l0_search(const Eigen::MatrixXd& V_support,
                   const std::vector<std::string>& labels,
                   const Eigen::VectorXd& y, int k_max);

// True iff training MSE is non-increasing across the k-ordered formulas.
bool errors_nonincreasing_check(const std::vector<SparseFormula>& formulas);

}  // namespace lnmix
