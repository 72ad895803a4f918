#include "lnmix/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "lnmix/errors.hpp"

namespace lnmix {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0;
}

double population_stddev(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return std::sqrt((y.array() - mean).square().sum() /
                   static_cast<double>(y.size()));
}

}  // namespace

double lasso_lambda_max(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                        bool fit_intercept) {
  if (V.rows() != y.size()) {
    throw PreconditionError("design matrix and target length disagree");
  }
  Eigen::VectorXd yc = y;
  if (fit_intercept) yc.array() -= y.mean();
  double best = 0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    best = std::max(best, std::abs(V.col(j).dot(yc)));
  }
  return 2 * best;
}

LassoResult lasso_l1(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                     double lambda_hat, const LassoOptions& opts,
                     const Eigen::VectorXd* warm_gamma) {
  const auto n = V.rows();
  const auto m = V.cols();
  if (n != y.size()) {
    throw PreconditionError("design matrix and target length disagree");
  }
  if (n < 1) throw PreconditionError("empty data");
  if (!(lambda_hat >= 0)) throw PreconditionError("lambda_hat must be >= 0");
  if (opts.max_sweeps < 1) throw PreconditionError("max_sweeps must be >= 1");
  if (warm_gamma && warm_gamma->size() != m) {
    throw PreconditionError("warm start length mismatch");
  }

  const double tol =
      opts.tol >= 0 ? opts.tol : 1e-8 * population_stddev(y);
  const double half_lambda = lambda_hat / 2;

  Eigen::VectorXd norms(m);
  for (Eigen::Index j = 0; j < m; ++j) norms[j] = V.col(j).squaredNorm();

  LassoResult res;
  res.lambda_hat = lambda_hat;
  res.gamma = warm_gamma ? *warm_gamma : Eigen::VectorXd::Zero(m);

  Eigen::VectorXd r = y;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (res.gamma[j] != 0) r -= V.col(j) * res.gamma[j];
  }
  double b = 0;
  if (opts.fit_intercept) {
    b = r.mean();
    r.array() -= b;
  }

  auto objective = [&]() {
    return r.squaredNorm() + lambda_hat * res.gamma.lpNorm<1>();
  };
  res.objective_history.push_back(objective());

  auto check_monotone = [&](double obj) {
    const double prev = res.objective_history.back();
    if (obj > prev + 1e-12 * (1 + std::abs(prev))) {
      throw NumericalError("coordinate descent objective increased from " +
                           std::to_string(prev) + " to " +
                           std::to_string(obj));
    }
    res.objective_history.push_back(obj);
  };

  // One cyclic pass over the given coordinates, plus the intercept.
  auto sweep = [&](const std::vector<Eigen::Index>& coords) {
    double max_change = 0;
    for (Eigen::Index j : coords) {
      if (norms[j] <= 0) continue;
      const double z = V.col(j).dot(r) + res.gamma[j] * norms[j];
      const double next = soft_threshold(z, half_lambda) / norms[j];
      const double delta = res.gamma[j] - next;
      if (delta != 0) {
        r += V.col(j) * delta;
        res.gamma[j] = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (opts.fit_intercept) {
      const double shift = r.mean();
      if (shift != 0) {
        b += shift;
        r.array() -= shift;
        max_change = std::max(max_change, std::abs(shift));
      }
    }
    return max_change;
  };

  std::vector<Eigen::Index> all(static_cast<size_t>(m));
  std::iota(all.begin(), all.end(), 0);
  std::vector<Eigen::Index> active;

  // Full sweeps decide convergence; in between, only the nonzero coordinates
  // are iterated (same fixed point, far fewer column passes at large m). The
  // inner run is bounded so ill-conditioned active sets cannot starve the full
  // sweeps that re-test inactive coordinates.
  constexpr int kMaxInnerRun = 50;
  while (res.sweeps < opts.max_sweeps) {
    const double change = sweep(all);
    ++res.sweeps;
    check_monotone(objective());
    if (change <= tol) {
      res.converged = true;
      break;
    }
    int inner_run = 0;
    while (res.sweeps < opts.max_sweeps && inner_run < kMaxInnerRun) {
      active.clear();
      for (Eigen::Index j = 0; j < m; ++j) {
        if (res.gamma[j] != 0) active.push_back(j);
      }
      const double inner = sweep(active);
      ++res.sweeps;
      ++inner_run;
      check_monotone(objective());
      if (inner <= tol) break;
    }
  }

  res.intercept = b;
  res.objective = res.objective_history.back();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (std::abs(res.gamma[j]) > 1e-10) {
      res.active_set.push_back(static_cast<int>(j));
    }
  }
  return res;
}

std::vector<double> default_lambda_path(double start, double step,
                                        double stop) {
  if (!(start >= 0) || !(step > 0) || !(stop >= start)) {
    throw PreconditionError("penalty path needs start >= 0 < step, stop >= start");
  }
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = start + step * i;
    if (v > stop * (1 + 1e-12)) break;
    out.push_back(v);
  }
  return out;
}

PathResult lasso_path(const Eigen::MatrixXd& V, const Eigen::VectorXd& y,
                      const std::vector<double>& lambdas,
                      const LassoOptions& opts) {
  if (lambdas.empty()) throw PreconditionError("empty penalty path");
  for (size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw PreconditionError("penalty path must be strictly increasing");
    }
  }
  LassoOptions fixed = opts;
  if (fixed.tol < 0) fixed.tol = 1e-8 * population_stddev(y);

  PathResult path;
  const Eigen::VectorXd* warm = nullptr;
  for (double lh : lambdas) {
    LassoResult res = lasso_l1(V, y, lh, fixed, warm);
    Eigen::VectorXd pred =
        Eigen::VectorXd::Constant(V.rows(), res.intercept);
    for (Eigen::Index j = 0; j < res.gamma.size(); ++j) {
      if (res.gamma[j] != 0) pred += V.col(j) * res.gamma[j];
    }
    PathEntry entry;
    entry.lambda_hat = lh;
    entry.active_size = static_cast<long>(res.active_set.size());
    entry.err = errors(y, pred);
    path.entries.push_back(entry);
    path.results.push_back(std::move(res));
    warm = &path.results.back().gamma;
  }
  return path;
}

std::vector<int> select_support(const PathResult& path, int cap) {
  if (path.entries.empty()) throw PreconditionError("empty penalty path");
  if (cap < 1) throw PreconditionError("support cap must be >= 1");
  for (size_t i = 0; i < path.entries.size(); ++i) {
    if (path.entries[i].active_size <= cap) {
      return path.results[i].active_set;
    }
  }
  return path.results.back().active_set;
}

StrictOls ols_fit_strict(const Eigen::MatrixXd& V, const std::vector<int>& cols,
                         const Eigen::VectorXd& y) {
  const auto n = V.rows();
  if (n != y.size()) {
    throw PreconditionError("design matrix and target length disagree");
  }
  if (n < 1) throw PreconditionError("empty data");
  for (int c : cols) {
    if (c < 0 || c >= V.cols()) {
      throw PreconditionError("column index out of range: " + std::to_string(c));
    }
  }
  const size_t k = cols.size();
  const size_t p = k + 1;  // selected columns plus the intercept, last

  // Normal equations assembled with plain sequential loops so every call
  // site reduces in the same order.
  std::vector<double> A(p * p, 0.0), rhs(p, 0.0);
  for (size_t a = 0; a < k; ++a) {
    for (size_t bcol = a; bcol < k; ++bcol) {
      double s = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        s += V(i, cols[a]) * V(i, cols[bcol]);
      }
      A[a * p + bcol] = s;
      A[bcol * p + a] = s;
    }
    double s1 = 0, sy = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      s1 += V(i, cols[a]);
      sy += V(i, cols[a]) * y[i];
    }
    A[a * p + k] = s1;
    A[k * p + a] = s1;
    rhs[a] = sy;
  }
  A[k * p + k] = static_cast<double>(n);
  double ysum = 0;
  for (Eigen::Index i = 0; i < n; ++i) ysum += y[i];
  rhs[k] = ysum;

  StrictOls out;

  // Fixed-order Cholesky, in place in the lower triangle.
  std::vector<double> L(p * p, 0.0);
  for (size_t j = 0; j < p; ++j) {
    double d = A[j * p + j];
    for (size_t q = 0; q < j; ++q) d -= L[j * p + q] * L[j * p + q];
    if (!(d > 1e-12 * A[j * p + j])) {
      out.singular = true;
      return out;
    }
    L[j * p + j] = std::sqrt(d);
    for (size_t i = j + 1; i < p; ++i) {
      double s = A[i * p + j];
      for (size_t q = 0; q < j; ++q) s -= L[i * p + q] * L[j * p + q];
      L[i * p + j] = s / L[j * p + j];
    }
  }
  std::vector<double> w(p, 0.0);
  for (size_t i = 0; i < p; ++i) {
    double s = rhs[i];
    for (size_t q = 0; q < i; ++q) s -= L[i * p + q] * w[q];
    w[i] = s / L[i * p + i];
  }
  for (size_t ii = p; ii-- > 0;) {
    double s = w[ii];
    for (size_t q = ii + 1; q < p; ++q) s -= L[q * p + ii] * w[q];
    w[ii] = s / L[ii * p + ii];
  }

  out.beta.resize(static_cast<Eigen::Index>(k));
  for (size_t a = 0; a < k; ++a) out.beta[static_cast<Eigen::Index>(a)] = w[a];
  out.intercept = w[k];

  double abs_sum = 0, sq_sum = 0, max_abs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double pred = out.intercept;
    for (size_t a = 0; a < k; ++a) pred += w[a] * V(i, cols[a]);
    const double e = y[i] - pred;
    const double ae = std::abs(e);
    abs_sum += ae;
    sq_sum += e * e;
    if (ae > max_abs) max_abs = ae;
  }
  out.err.mae = abs_sum / static_cast<double>(n);
  out.err.mse = sq_sum / static_cast<double>(n);
  out.err.me = max_abs;
  return out;
}

namespace {

bool next_combination(std::vector<int>& idx, int s) {
  const int k = static_cast<int>(idx.size());
  int pos = k - 1;
  while (pos >= 0 && idx[static_cast<size_t>(pos)] == s - k + pos) --pos;
  if (pos < 0) return false;
  ++idx[static_cast<size_t>(pos)];
  for (int q = pos + 1; q < k; ++q) {
    idx[static_cast<size_t>(q)] = idx[static_cast<size_t>(q - 1)] + 1;
  }
  return true;
}

std::string join_labels(const std::vector<std::string>& labels,
                        const std::vector<int>& idx) {
  std::string s;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) s += " + ";
    s += labels[static_cast<size_t>(idx[i])];
  }
  return s;
}

}  // namespace

L0Result l0_search(const Eigen::MatrixXd& V_support,
                   const std::vector<std::string>& labels,
                   const Eigen::VectorXd& y, int k_max) {
  const int s = static_cast<int>(V_support.cols());
  if (static_cast<int>(labels.size()) != s) {
    throw PreconditionError("support labels do not match columns");
  }
  if (s < 1) {
    throw PreconditionError(
        "empty support: the penalty path removed every feature");
  }
  if (s > 40) {
    throw PreconditionError(
        "support of " + std::to_string(s) +
        " columns is too large for exhaustive search (limit 40); raise the "
        "penalty or lower the support cap");
  }
  if (k_max < 1 || k_max > 5) {
    throw PreconditionError("k_max must be in [1, 5]");
  }
  if (k_max > s) {
    throw PreconditionError("k_max exceeds the support size");
  }

  L0Result out;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<int> idx(static_cast<size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    double best_mse = std::numeric_limits<double>::infinity();
    StrictOls best_fit;
    std::vector<int> best_idx;
    do {
      StrictOls fit = ols_fit_strict(V_support, idx, y);
      if (fit.singular) {
        out.skipped_singular.push_back(join_labels(labels, idx));
        continue;
      }
      if (fit.err.mse < best_mse) {
        best_mse = fit.err.mse;
        best_fit = fit;
        best_idx = idx;
      }
    } while (next_combination(idx, s));
    if (best_idx.empty()) {
      throw NumericalError("every " + std::to_string(k) +
                           "-column subset was singular");
    }
    SparseFormula f;
    f.k = k;
    for (int a = 0; a < k; ++a) {
      f.terms.push_back({labels[static_cast<size_t>(best_idx[static_cast<size_t>(a)])],
                         best_fit.beta[a]});
    }
    f.intercept = best_fit.intercept;
    f.err = best_fit.err;
    out.formulas.push_back(std::move(f));
  }
  return out;
}

bool errors_nonincreasing_check(const std::vector<SparseFormula>& formulas) {
  for (size_t i = 1; i < formulas.size(); ++i) {
    if (formulas[i].err.mse > formulas[i - 1].err.mse) return false;
  }
  return true;
}

std::string SparseFormula::render() const {
  char buf[64];
  std::string s = "H_E ≈ ";
  for (size_t i = 0; i < terms.size(); ++i) {
    const double c = terms[i].coefficient;
    std::snprintf(buf, sizeof buf, "%.4f", std::abs(c));
    if (i == 0) {
      if (c < 0) s += '-';
    } else {
      s += c < 0 ? " - " : " + ";
    }
    s += buf;
    s += '*';
    s += terms[i].label;
  }
  std::snprintf(buf, sizeof buf, "%.4f", std::abs(intercept));
  if (terms.empty()) {
    if (intercept < 0) s += '-';
  } else {
    s += intercept < 0 ? " - " : " + ";
  }
  s += buf;
  return s;
}

}  // namespace lnmix
