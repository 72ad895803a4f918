#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lnmix/kernels.hpp"

namespace lnmix {

// Dual coefficients for (K + lambda*I) alpha = y, solved by Cholesky.  If the
// factorization fails (or its residual is unacceptable) the system is retried
// once with a small diagonal jitter; failure after that raises NumericalError.
struct KrrSolution {
  Eigen::VectorXd alpha;
  double residual_inf = 0;  // max-norm of (K + lambda*I) alpha - y
  double jitter = 0;        // extra diagonal added to recover factorization
};

KrrSolution krr_solve(const Eigen::MatrixXd& K, double lambda,
                      const Eigen::VectorXd& y);

// Column-wise z-scoring fitted on training data and replayed on new data.
// Constant columns keep scale 1 so they map to exactly zero.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct KrrModel {
  KernelSpec kernel;
  double lambda = 0;
  Eigen::MatrixXd X_train;  // standardized when standardizer is present
  Eigen::VectorXd alpha;
  std::optional<Standardizer> standardizer;
  double solve_residual = 0;
  double jitter = 0;
};

KrrModel krr_fit(const KernelSpec& kernel, double lambda,
                 const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 bool standardize = true);

Eigen::VectorXd krr_predict(const KrrModel& model, const Eigen::MatrixXd& X);

struct ErrorReport {
  double mae = 0;  // mean |residual|
  double mse = 0;  // mean residual^2
  double me = 0;   // max |residual|
};

ErrorReport errors(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

// --- exhaustive hyper-parameter scan -----------------------------------

// Log-spaced axis: points 10^lo, ..., 10^hi inclusive (count >= 1; a single
// point ignores hi).
struct GridAxis {
  double log10_lo = 0;
  double log10_hi = 0;
  int count = 1;

  std::vector<double> values() const;
  double step() const;  // log10 spacing, 0 for a single point
};

// One kernel family to scan: polynomial degrees share the lambda/gamma axes
// and add a c axis; gaussian/laplacian use lambda/gamma only.
struct KernelFamily {
  KernelKind kind = KernelKind::Gaussian;
  int degree = 0;  // polynomial only
  GridAxis lambda;
  GridAxis gamma;
  GridAxis c;  // polynomial only

  std::string name() const;
};

struct ScanRow {
  std::string family;
  double lambda = 0;
  double gamma = 0;
  double c = 0;
  bool ok = false;          // false when the solve failed even with jitter
  std::string error;        // failure message when !ok
  ErrorReport train;
  ErrorReport test;
};

struct GridSearchResult {
  std::vector<ScanRow> rows;  // scan order: family, then lambda-major lex
  ScanRow best;               // smallest test MAE; ties keep the earlier row
  KrrModel best_model;
};

// Exhaustively scans every family over its grid, keeping the row with the
// smallest test MAE (first in scan order on ties).  refine_rounds > 0 re-scans
// a 5-point local grid per axis around the incumbent with halved log-steps.
GridSearchResult grid_search(const std::vector<KernelFamily>& families,
                             const Eigen::MatrixXd& X_train,
                             const Eigen::VectorXd& y_train,
                             const Eigen::MatrixXd& X_test,
                             const Eigen::VectorXd& y_test,
                             bool standardize = true, int refine_rounds = 0);

// Per-fold train/test errors at fixed hyperparameters (folds from cv_folds
// in dataset.hpp).
struct CvFold {
  ErrorReport train;
  ErrorReport test;
};

struct CvReport {
  std::vector<CvFold> folds;
  double mean_mae = 0;  // mean of fold test MAEs
  double mean_mse = 0;
};

CvReport cross_validate(const KernelSpec& kernel, double lambda,
                        const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::vector<std::pair<std::vector<int>,
                                                    std::vector<int>>>& folds,
                        bool standardize = true);

// Overfit flag: test MAE more than `threshold` times train MAE.  A zero train
// error with nonzero test error reports an infinite ratio.
struct OverfitDiagnostic {
  double ratio = 0;
  bool overfit = false;
};

OverfitDiagnostic overfit_diagnostic(const ErrorReport& train,
                                     const ErrorReport& test,
                                     double threshold = 10.0);

}  // namespace lnmix
