#include "lnmix/krr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lnmix/errors.hpp"

namespace lnmix {

namespace {

double residual_inf_norm(const Eigen::MatrixXd& K, double diag,
                         const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& y) {
  return (K * alpha + diag * alpha - y).lpNorm<Eigen::Infinity>();
}

}  // namespace

KrrSolution krr_solve(const Eigen::MatrixXd& K, double lambda,
                      const Eigen::VectorXd& y) {
  if (K.rows() != K.cols()) throw PreconditionError("gram matrix must be square");
  if (K.rows() != y.size()) {
    throw PreconditionError("gram matrix and target length disagree");
  }
  if (K.rows() == 0) throw PreconditionError("empty training set");
  if (!(lambda >= 0)) throw PreconditionError("ridge lambda must be >= 0");

  const auto n = K.rows();
  const double y_inf = y.lpNorm<Eigen::Infinity>();
  const double tol = 1e-8 * std::max(y_inf, 1e-300);

  Eigen::MatrixXd A = K;
  A.diagonal().array() += lambda;

  KrrSolution out;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    out.alpha = llt.solve(y);
    out.residual_inf = residual_inf_norm(K, lambda, out.alpha, y);
    if (out.residual_inf <= tol) return out;
  }

  // One retry with a trace-scaled diagonal bump before giving up.
  const double jitter = 1e-12 * K.trace() / static_cast<double>(n);
  A.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt2(A);
  if (llt2.info() == Eigen::Success) {
    out.alpha = llt2.solve(y);
    out.residual_inf = residual_inf_norm(K, lambda + jitter, out.alpha, y);
    out.jitter = jitter;
    if (out.residual_inf <= tol) return out;
  }
  throw NumericalError(
      "ridge system is numerically ill-conditioned even after jitter; "
      "increase lambda");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  if (X.rows() == 0) throw PreconditionError("cannot standardize empty matrix");
  Standardizer s;
  s.mean = X.colwise().mean();
  const auto n = static_cast<double>(X.rows());
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double var = (X.col(j).array() - s.mean[j]).square().sum() / n;
    double sd = std::sqrt(var);
    s.scale[j] = sd > 0 ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) {
    throw PreconditionError("standardizer dimension mismatch");
  }
  return (X.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

KrrModel krr_fit(const KernelSpec& kernel, double lambda,
                 const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 bool standardize) {
  if (X.rows() != y.size()) {
    throw PreconditionError("design matrix and target length disagree");
  }
  KrrModel m;
  m.kernel = kernel;
  m.lambda = lambda;
  if (standardize) {
    m.standardizer = Standardizer::fit(X);
    m.X_train = m.standardizer->apply(X);
  } else {
    m.X_train = X;
  }
  auto sol = krr_solve(gram(kernel, m.X_train), lambda, y);
  m.alpha = std::move(sol.alpha);
  m.solve_residual = sol.residual_inf;
  m.jitter = sol.jitter;
  return m;
}

Eigen::VectorXd krr_predict(const KrrModel& model, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Xs =
      model.standardizer ? model.standardizer->apply(X) : X;
  // cross_gram is train x new, so predictions are its transpose times alpha.
  return cross_gram(model.kernel, model.X_train, Xs).transpose() * model.alpha;
}

ErrorReport errors(const Eigen::VectorXd& y_true,
                   const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw PreconditionError("error report needs equal-length vectors");
  }
  if (y_true.size() == 0) throw PreconditionError("error report on empty data");
  Eigen::ArrayXd r = (y_pred - y_true).array();
  ErrorReport e;
  e.mae = r.abs().mean();
  e.mse = r.square().mean();
  e.me = r.abs().maxCoeff();
  return e;
}

std::vector<double> GridAxis::values() const {
  if (count < 1) throw PreconditionError("grid axis needs count >= 1");
  std::vector<double> v;
  v.reserve(static_cast<size_t>(count));
  if (count == 1) {
    v.push_back(std::pow(10.0, log10_lo));
    return v;
  }
  const double st = (log10_hi - log10_lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    v.push_back(std::pow(10.0, log10_lo + st * i));
  }
  return v;
}

double GridAxis::step() const {
  if (count <= 1) return 0;
  return (log10_hi - log10_lo) / (count - 1);
}

std::string KernelFamily::name() const {
  if (kind == KernelKind::Polynomial) return "poly" + std::to_string(degree);
  return std::string(kernel_kind_name(kind));
}

namespace {

KernelSpec make_spec(const KernelFamily& fam, double gamma, double c) {
  switch (fam.kind) {
    case KernelKind::Polynomial:
      return KernelSpec::polynomial(fam.degree, gamma, c);
    case KernelKind::Gaussian:
      return KernelSpec::gaussian(gamma);
    default:
      return KernelSpec::laplacian(gamma);
  }
}

// Evaluates one (lambda, gamma, c) cell reusing the precomputed base
// matrices; records a failed solve instead of propagating it.
ScanRow scan_cell(const KernelFamily& fam, double lambda, double gamma,
                  double c, const Eigen::MatrixXd& base_train,
                  const Eigen::MatrixXd& base_cross,
                  const Eigen::VectorXd& y_train,
                  const Eigen::VectorXd& y_test) {
  ScanRow row;
  row.family = fam.name();
  row.lambda = lambda;
  row.gamma = gamma;
  row.c = c;
  KernelSpec spec = make_spec(fam, gamma, c);
  try {
    Eigen::MatrixXd K = gram_from_base(spec, base_train);
    auto sol = krr_solve(K, lambda, y_train);
    Eigen::VectorXd train_pred = K * sol.alpha;
    Eigen::VectorXd test_pred =
        gram_from_base(spec, base_cross).transpose() * sol.alpha;
    row.train = errors(y_train, train_pred);
    row.test = errors(y_test, test_pred);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

bool better(const ScanRow& candidate, const ScanRow& incumbent) {
  if (!candidate.ok) return false;
  if (!incumbent.ok) return true;
  return candidate.test.mae < incumbent.test.mae;  // strict: ties keep earlier
}

// 5-point local axis around log10(center): {-step, -step/2, 0, +step/2, +step},
// collapsing to the center alone when the axis had a single point.
std::vector<double> local_axis(double center, double step) {
  if (step == 0) return {center};
  const double lc = std::log10(center);
  return {std::pow(10.0, lc - step), std::pow(10.0, lc - step / 2), center,
          std::pow(10.0, lc + step / 2), std::pow(10.0, lc + step)};
}

}  // namespace

GridSearchResult grid_search(const std::vector<KernelFamily>& families,
                             const Eigen::MatrixXd& X_train,
                             const Eigen::VectorXd& y_train,
                             const Eigen::MatrixXd& X_test,
                             const Eigen::VectorXd& y_test,
                             bool standardize, int refine_rounds) {
  if (families.empty()) throw PreconditionError("grid search needs >= 1 family");
  if (X_train.rows() != y_train.size() || X_test.rows() != y_test.size()) {
    throw PreconditionError("design/target length mismatch in grid search");
  }
  if (X_train.cols() != X_test.cols()) {
    throw PreconditionError("train/test dimension mismatch in grid search");
  }

  std::optional<Standardizer> std_opt;
  Eigen::MatrixXd Xtr = X_train;
  Eigen::MatrixXd Xte = X_test;
  if (standardize) {
    std_opt = Standardizer::fit(X_train);
    Xtr = std_opt->apply(X_train);
    Xte = std_opt->apply(X_test);
  }

  GridSearchResult res;
  res.best.ok = false;
  int best_family = -1;

  // Base matrices depend only on the kernel kind, so cache per kind.
  Eigen::MatrixXd base_train, base_cross;
  KernelKind cached_kind{};
  bool have_cache = false;
  auto ensure_base = [&](KernelKind kind) {
    if (have_cache && cached_kind == kind) return;
    base_train = base_matrix(kind, Xtr, Xtr);
    base_cross = base_matrix(kind, Xtr, Xte);
    cached_kind = kind;
    have_cache = true;
  };

  for (size_t fi = 0; fi < families.size(); ++fi) {
    const auto& fam = families[fi];
    ensure_base(fam.kind);
    const bool poly = fam.kind == KernelKind::Polynomial;
    const auto lambdas = fam.lambda.values();
    const auto gammas = fam.gamma.values();
    const auto cs = poly ? fam.c.values() : std::vector<double>{0.0};
    for (double lambda : lambdas) {
      for (double gamma : gammas) {
        for (double c : cs) {
          ScanRow row = scan_cell(fam, lambda, gamma, c, base_train,
                                  base_cross, y_train, y_test);
          if (better(row, res.best)) {
            res.best = row;
            best_family = static_cast<int>(fi);
          }
          res.rows.push_back(std::move(row));
        }
      }
    }
  }

  if (!res.best.ok) {
    std::string log = "every grid point failed to solve; widen the grid.";
    for (size_t i = 0; i < res.rows.size() && i < 3; ++i) {
      log += " [" + res.rows[i].family + "] " + res.rows[i].error;
    }
    throw NumericalError(log);
  }

  // Local refinement: shrink each axis around the incumbent.
  const auto& fam0 = families[static_cast<size_t>(best_family)];
  double lstep = fam0.lambda.step();
  double gstep = fam0.gamma.step();
  double cstep = fam0.c.step();
  for (int round = 0; round < refine_rounds; ++round) {
    const auto& fam = families[static_cast<size_t>(best_family)];
    ensure_base(fam.kind);
    const bool poly = fam.kind == KernelKind::Polynomial;
    const auto lambdas = local_axis(res.best.lambda, lstep);
    const auto gammas = local_axis(res.best.gamma, gstep);
    const auto cs =
        poly ? local_axis(res.best.c, cstep) : std::vector<double>{0.0};
    for (double lambda : lambdas) {
      for (double gamma : gammas) {
        for (double c : cs) {
          ScanRow row = scan_cell(fam, lambda, gamma, c, base_train,
                                  base_cross, y_train, y_test);
          if (better(row, res.best)) res.best = row;
          res.rows.push_back(std::move(row));
        }
      }
    }
    lstep /= 2;
    gstep /= 2;
    cstep /= 2;
  }

  KernelSpec best_spec =
      make_spec(families[static_cast<size_t>(best_family)], res.best.gamma,
                res.best.c);
  res.best_model =
      krr_fit(best_spec, res.best.lambda, X_train, y_train, standardize);
  return res;
}

CvReport cross_validate(
    const KernelSpec& kernel, double lambda, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& folds,
    bool standardize) {
  if (folds.empty()) throw PreconditionError("cross-validation needs >= 1 fold");
  CvReport rep;
  for (const auto& [train_idx, test_idx] : folds) {
    Eigen::MatrixXd Xtr(train_idx.size(), X.cols());
    Eigen::VectorXd ytr(train_idx.size());
    for (size_t i = 0; i < train_idx.size(); ++i) {
      Xtr.row(static_cast<Eigen::Index>(i)) = X.row(train_idx[i]);
      ytr[static_cast<Eigen::Index>(i)] = y[train_idx[i]];
    }
    Eigen::MatrixXd Xte(test_idx.size(), X.cols());
    Eigen::VectorXd yte(test_idx.size());
    for (size_t i = 0; i < test_idx.size(); ++i) {
      Xte.row(static_cast<Eigen::Index>(i)) = X.row(test_idx[i]);
      yte[static_cast<Eigen::Index>(i)] = y[test_idx[i]];
    }
    auto model = krr_fit(kernel, lambda, Xtr, ytr, standardize);
    CvFold fold;
    fold.train = errors(ytr, krr_predict(model, Xtr));
    fold.test = errors(yte, krr_predict(model, Xte));
    rep.folds.push_back(fold);
  }
  for (const auto& f : rep.folds) {
    rep.mean_mae += f.test.mae;
    rep.mean_mse += f.test.mse;
  }
  rep.mean_mae /= static_cast<double>(rep.folds.size());
  rep.mean_mse /= static_cast<double>(rep.folds.size());
  return rep;
}

OverfitDiagnostic overfit_diagnostic(const ErrorReport& train,
                                     const ErrorReport& test,
                                     double threshold) {
  OverfitDiagnostic d;
  if (train.mae > 0) {
    d.ratio = test.mae / train.mae;
  } else {
    d.ratio = test.mae > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  d.overfit = d.ratio > threshold;
  return d;
}

}  // namespace lnmix
