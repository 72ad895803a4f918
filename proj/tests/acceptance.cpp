// Acceptance gate: ten independently runnable criteria, each printing one
// final "criterion N: PASS|FAIL — <what it checks>" line.  Run as
//   acceptance --criterion <1..10>
// Exit code 0 iff every check inside the criterion held.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lnmix/config.hpp"
#include "lnmix/dataset.hpp"
#include "lnmix/descriptors.hpp"
#include "lnmix/elemental_table.hpp"
#include "lnmix/errors.hpp"
#include "lnmix/features.hpp"
#include "lnmix/kernels.hpp"
#include "lnmix/krr.hpp"
#include "lnmix/pipeline.hpp"
#include "lnmix/rng.hpp"
#include "lnmix/sparsify.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lnmix;

// --- pinned tolerances ------------------------------------------------------
constexpr double kCoefRelTol = 0.05;       // 1: planted coefficient recovery
constexpr double kOlsRelTol = 1e-8;        // 3: zero-penalty vs dense LS
constexpr double kDenseInvRelTol = 1e-10;  // 4: solver vs explicit inverse
constexpr double kInterpRelTol = 1e-6;     // 4: zero-ridge interpolation
constexpr double kTrainFloorScale = 1e-10; // 5: train MAE vs stddev(y)
constexpr double kLaplacianFactor = 10.0;  // 5: Laplacian vs cubic test MAE
constexpr double kNoiseCeiling = 3.0;      // 6: test MAE vs noise sigma
constexpr double kDegree2Factor = 2.0;     // 6: quadratic vs cubic test MAE
constexpr double kCvRatioCeiling = 2.0;    // 7: fold MAE spread
constexpr double kMonotoneSlack = 1e-12;   // 3, 9: non-increase slack

struct Gate {
  int checked = 0;
  int failed = 0;

  void expect(bool ok, const std::string& what) {
    ++checked;
    if (!ok) {
      ++failed;
      std::printf("    FAIL %s\n", what.c_str());
    }
  }
};

std::string table_file() {
  return std::string(LNMIX_SOURCE_DIR) + "/data/lanthanides.csv";
}

std::vector<double> paper_ratios() { return {0.25, 0.375, 0.5, 0.625, 0.75}; }

// The bundled run configuration's two-term generating model.
PlantedModel two_term_model() {
  PlantedModel model;
  model.terms.push_back({1.1453, {"m", "(1-m)", "diff(V)^2"}});
  model.terms.push_back({108.1079, {"diff(Y)", "diff(V)", "inv(mean(V)^2)"}});
  model.noise_relative = 0.01;
  model.seed = 11;
  return model;
}

// Planted target for the kernel-quality criteria: a product of two of the
// kernel scheme's own descriptors (exactly degree 2 in feature space, so the
// polynomial kernels contain it) plus 0.1% noise.  Only 2 of the 30
// descriptors carry signal; distances in the full standardized space are
// dominated by the other 28, which is exactly the geometry that starves a
// distance kernel while leaving an inner-product kernel untouched.
DataSet planted_krr_dataset(const ElementalTable& t) {
  PlantedModel model;
  model.terms.push_back({0.01, {"x1(V)", "x3(V)"}});
  model.noise_relative = 0.001;
  model.seed = 11;
  return generate_synthetic(t, DescriptorScheme::krr_default(), model,
                            Configuration::Monazite, paper_ratios());
}

void slice(const DataSet& ds, const std::vector<int>& rows, Eigen::MatrixXd& X,
           Eigen::VectorXd& y) {
  X.resize(static_cast<Eigen::Index>(rows.size()), ds.d());
  y.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = ds.X.row(rows[i]);
    y[static_cast<Eigen::Index>(i)] = ds.y[rows[i]];
  }
}

double stddev(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return std::sqrt((y.array() - mean).square().sum() /
                   static_cast<double>(y.size()));
}

Eigen::MatrixXd random_matrix(Rng& rng, int n, int m) {
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
  return X;
}

Eigen::VectorXd random_vector(Rng& rng, int n) {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  return y;
}

GridAxis axis(double lo, double hi, int count) {
  GridAxis ax;
  ax.log10_lo = lo;
  ax.log10_hi = hi;
  ax.count = count;
  return ax;
}

// =============================================================================
// 1. Planted-formula recovery on the full-size fused synthetic set.
// =============================================================================
void criterion1(Gate& g) {
  const ElementalTable t = load_table(table_file());
  const PlantedModel model = two_term_model();
  DataSet ds = generate_synthetic(t, DescriptorScheme::prior_default(), model,
                                  Configuration::Fused, paper_ratios());
  g.expect(ds.n() == 1050, "fused synthetic dataset has 1050 points");

  SparsifySection cfg;  // defaults: degree 3, path 0.001:0.005:0.096, cap 30
  cfg.k_max = 2;
  const SparsifyOutput out = run_sparsify_stage(ds, cfg, /*threads=*/4);

  g.expect(out.formulas.size() == 2, "formulas produced for k = 1 and k = 2");
  if (out.formulas.size() < 2) return;
  const SparseFormula& f2 = out.formulas[1];
  g.expect(f2.k == 2, "second formula has two terms");

  std::map<std::string, double> expected = {
      {"m*(1-m)*diff(V)^2", 1.1453},
      {"diff(Y)*diff(V)*inv(mean(V)^2)", 108.1079}};
  std::set<std::string> seen;
  for (const SparseTerm& term : f2.terms) {
    auto it = expected.find(term.label);
    g.expect(it != expected.end(), "unexpected term label: " + term.label);
    if (it == expected.end()) continue;
    seen.insert(term.label);
    const double rel = std::abs(term.coefficient - it->second) /
                       std::abs(it->second);
    std::printf("    %-32s coefficient %.6f (planted %.4f, off by %.2f%%)\n",
                term.label.c_str(), term.coefficient, it->second, 100 * rel);
    g.expect(rel <= kCoefRelTol,
             term.label + ": coefficient within 5% of the planted value");
  }
  g.expect(seen.size() == 2, "both planted labels recovered at k = 2");
}

// =============================================================================
// 2. Exhaustive-subset search bit-identical to an independent oracle.
// =============================================================================

// Every size-k subset of {0..s-1} in lexicographic order, enumerated by
// bitmask (a different strategy than the production column walker).
std::vector<std::vector<int>> all_subsets(int s, int k) {
  std::vector<std::vector<int>> subs;
  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> sub;
    for (int j = 0; j < s; ++j)
      if (mask & (1u << j)) sub.push_back(j);
    subs.push_back(std::move(sub));
  }
  std::sort(subs.begin(), subs.end());
  return subs;
}

void criterion2(Gate& g) {
  Rng rng(20260816);
  int instances = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 20 + static_cast<int>(rng.uniform_below(181));  // <= 200
    const int s = 3 + static_cast<int>(rng.uniform_below(10));    // <= 12
    const int k_max = 1 + static_cast<int>(rng.uniform_below(3));

    Eigen::MatrixXd V = random_matrix(rng, n, s);
    Eigen::VectorXd y =
        2.0 * V.col(0) - 0.7 * V.col(s - 1) + 0.05 * random_vector(rng, n);
    std::vector<std::string> labels;
    for (int j = 0; j < s; ++j) labels.push_back("f" + std::to_string(j));

    const L0Result prod = l0_search(V, labels, y, k_max);
    g.expect(prod.formulas.size() == static_cast<size_t>(k_max),
             "one formula per k");

    for (int k = 1; k <= k_max; ++k) {
      // Oracle: scan every subset in lexicographic order, keep strict
      // improvements, skip singular fits.
      bool have = false;
      StrictOls best;
      std::vector<int> best_cols;
      for (const auto& sub : all_subsets(s, k)) {
        const StrictOls fit = ols_fit_strict(V, sub, y);
        if (fit.singular) continue;
        if (!have || fit.err.mse < best.err.mse) {
          best = fit;
          best_cols = sub;
          have = true;
        }
      }
      g.expect(have, "oracle found a non-singular subset");
      if (!have || prod.formulas.size() < static_cast<size_t>(k)) continue;

      const SparseFormula& f = prod.formulas[static_cast<size_t>(k - 1)];
      bool same = f.terms.size() == best_cols.size();
      for (size_t i = 0; same && i < best_cols.size(); ++i) {
        same = f.terms[i].label == labels[static_cast<size_t>(best_cols[i])] &&
               f.terms[i].coefficient == best.beta[static_cast<Eigen::Index>(i)];
      }
      same = same && f.intercept == best.intercept &&
             f.err.mae == best.err.mae && f.err.mse == best.err.mse &&
             f.err.me == best.err.me;
      g.expect(same, "instance " + std::to_string(inst) + " k=" +
                         std::to_string(k) +
                         ": subset, coefficients, and errors bit-identical");
    }
    ++instances;
  }
  std::printf("    %d random instances compared bit-for-bit\n", instances);
}

// =============================================================================
// 3. L1 stage: zero-penalty = dense least squares; full shrinkage at
//    lambda_max; objective non-increasing every sweep.
// =============================================================================
void criterion3(Gate& g) {
  Rng rng(360360);

  // (a) zero penalty reproduces dense least squares on M <= 20 fixtures.
  double worst_rel = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 30 + static_cast<int>(rng.uniform_below(91));
    const int m = 2 + static_cast<int>(rng.uniform_below(19));  // <= 20
    Eigen::MatrixXd V = random_matrix(rng, n, m);
    Eigen::VectorXd y =
        V * random_vector(rng, m) + 0.1 * random_vector(rng, n);

    LassoOptions opts;
    opts.tol = 1e-13;
    opts.max_sweeps = 50000;
    const LassoResult res = lasso_l1(V, y, 0.0, opts);

    Eigen::MatrixXd A(n, m + 1);
    A.leftCols(m) = V;
    A.col(m).setOnes();
    const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
    const double scale = std::max(1.0, beta.lpNorm<Eigen::Infinity>());
    double rel = std::abs(res.intercept - beta[m]) / scale;
    for (int j = 0; j < m; ++j) {
      rel = std::max(rel, std::abs(res.gamma[j] - beta[j]) / scale);
    }
    worst_rel = std::max(worst_rel, rel);
    g.expect(rel <= kOlsRelTol,
             "fixture " + std::to_string(inst) +
                 ": zero-penalty solution matches dense least squares");

    // (b) at and above lambda_max every coefficient is exactly zero.
    const double lmax = lasso_lambda_max(V, y, true);
    for (double factor : {1.0, 1.7}) {
      const LassoResult shrunk = lasso_l1(V, y, factor * lmax, opts);
      g.expect(shrunk.gamma.lpNorm<Eigen::Infinity>() == 0.0,
               "all-zero vector at " + std::to_string(factor) + "*lambda_max");
      g.expect(std::abs(shrunk.intercept - y.mean()) <=
                   1e-12 * (1.0 + std::abs(y.mean())),
               "intercept falls back to mean(y) under full shrinkage");
    }
  }
  std::printf("    worst zero-penalty deviation %.3g (tolerance %.0e)\n",
              worst_rel, kOlsRelTol);

  // (c) the objective never increases, sweep over sweep, on 100 instances.
  long sweeps_checked = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 20 + static_cast<int>(rng.uniform_below(61));
    const int m = 3 + static_cast<int>(rng.uniform_below(28));
    Eigen::MatrixXd V = random_matrix(rng, n, m);
    Eigen::VectorXd y =
        V * random_vector(rng, m) + 0.3 * random_vector(rng, n);
    const double lmax = lasso_lambda_max(V, y, true);
    const double lambda_hat = (0.05 + 0.9 * rng.uniform01()) * lmax;

    const LassoResult res = lasso_l1(V, y, lambda_hat);
    g.expect(res.objective_history.size() ==
                 static_cast<size_t>(res.sweeps) + 1,
             "history holds the pre-sweep value plus one entry per sweep");
    for (size_t i = 0; i + 1 < res.objective_history.size(); ++i) {
      const double prev = res.objective_history[i];
      const double next = res.objective_history[i + 1];
      if (!(next <= prev + kMonotoneSlack * (1.0 + std::abs(prev)))) {
        g.expect(false, "objective increased on instance " +
                            std::to_string(inst) + " sweep " +
                            std::to_string(i + 1));
      }
      ++sweeps_checked;
    }
  }
  g.expect(sweeps_checked > 0, "sweeps were actually run");
  std::printf("    %ld sweep transitions checked non-increasing\n",
              sweeps_checked);
}

// =============================================================================
// 4. Ridge solver vs explicit dense inversion; zero-penalty interpolation.
// =============================================================================
void criterion4(Gate& g) {
  Rng rng(8080);
  double worst_rel = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::MatrixXd B = random_matrix(rng, n, n);
      Eigen::MatrixXd K =
          B * B.transpose() + static_cast<double>(n) *
                                  Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd y = random_vector(rng, n);
      for (double lambda : {0.0, 1e-4, 1.0}) {
        const KrrSolution sol = krr_solve(K, lambda, y);
        const Eigen::MatrixXd ridge =
            K + lambda * Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd alpha_dense = ridge.inverse() * y;
        const double rel =
            (sol.alpha - alpha_dense).lpNorm<Eigen::Infinity>() /
            std::max(alpha_dense.lpNorm<Eigen::Infinity>(), 1e-300);
        worst_rel = std::max(worst_rel, rel);
        g.expect(rel <= kDenseInvRelTol,
                 "n=" + std::to_string(n) + " lambda=" +
                     std::to_string(lambda) +
                     ": alpha matches explicit inversion");
      }
    }
  }
  std::printf("    worst deviation from dense inversion %.3g (tolerance %.0e)\n",
              worst_rel, kDenseInvRelTol);

  // Zero penalty on a well-conditioned Gaussian kernel interpolates.
  double worst_interp = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 40;
    Eigen::MatrixXd X = 3.0 * random_matrix(rng, n, 3);
    Eigen::VectorXd y = random_vector(rng, n);
    const KrrModel model =
        krr_fit(KernelSpec::gaussian(0.5), 0.0, X, y, true);
    const Eigen::VectorXd pred = krr_predict(model, X);
    const double rel = (pred - y).lpNorm<Eigen::Infinity>() /
                       y.lpNorm<Eigen::Infinity>();
    worst_interp = std::max(worst_interp, rel);
    g.expect(rel <= kInterpRelTol,
             "rep " + std::to_string(rep) +
                 ": zero-ridge fit reproduces training targets");
  }
  std::printf("    worst interpolation deviation %.3g (tolerance %.0e)\n",
              worst_interp, kInterpRelTol);
}

// =============================================================================
// 5. Laplacian overfitting pattern at vanishing ridge.
// =============================================================================
void criterion5(Gate& g) {
  const ElementalTable t = load_table(table_file());
  const DataSet ds = planted_krr_dataset(t);
  const SplitPlan plan = split(static_cast<int>(ds.n()), 0.8, 211);
  Eigen::MatrixXd Xtr, Xte;
  Eigen::VectorXd ytr, yte;
  slice(ds, plan.train, Xtr, ytr);
  slice(ds, plan.test, Xte, yte);

  // Tuned cubic polynomial as the generalization baseline.
  KernelFamily poly3;
  poly3.kind = KernelKind::Polynomial;
  poly3.degree = 3;
  poly3.lambda = axis(-9, -1, 5);
  poly3.gamma = axis(-6, -2, 5);
  poly3.c = axis(-2, 2, 3);
  const GridSearchResult cubic = grid_search({poly3}, Xtr, ytr, Xte, yte);

  // Laplacian restricted to a vanishing ridge, gamma free.
  KernelFamily lap;
  lap.kind = KernelKind::Laplacian;
  lap.lambda = axis(-20, -20, 1);  // lambda = 1e-20 <= 1e-18
  lap.gamma = axis(-2, 2, 9);
  const GridSearchResult laplacian = grid_search({lap}, Xtr, ytr, Xte, yte);

  const double y_sd = stddev(ds.y);
  const ScanRow& L = laplacian.best;
  const ScanRow& P = cubic.best;
  const OverfitDiagnostic diag = overfit_diagnostic(L.train, L.test, 10.0);
  std::printf(
      "    laplacian best: train MAE %.3g, test MAE %.3g; poly3 test MAE "
      "%.3g; ratio %.1fx; stddev(y) %.3g; flagged=%s\n",
      L.train.mae, L.test.mae, P.test.mae, L.test.mae / P.test.mae, y_sd,
      diag.overfit ? "yes" : "no");

  g.expect(L.ok, "a laplacian grid point solved");
  g.expect(P.ok, "a poly3 grid point solved");
  g.expect(L.train.mae <= kTrainFloorScale * y_sd,
           "laplacian train MAE sits at the memorization floor");
  g.expect(L.test.mae > kLaplacianFactor * P.test.mae,
           "laplacian test MAE exceeds 10x the cubic polynomial's");
  g.expect(diag.overfit, "the overfit diagnostic flags the laplacian fit");
}

// =============================================================================
// 6. Tuned kernels reach the noise floor.
// =============================================================================
void criterion6(Gate& g) {
  const ElementalTable t = load_table(table_file());
  const DataSet ds = planted_krr_dataset(t);
  const double sigma = ds.noise_sigma_used;
  g.expect(sigma > 0, "planted noise is nonzero");

  const SplitPlan plan = split(static_cast<int>(ds.n()), 0.8, 211);
  Eigen::MatrixXd Xtr, Xte;
  Eigen::VectorXd ytr, yte;
  slice(ds, plan.train, Xtr, ytr);
  slice(ds, plan.test, Xte, yte);

  KernelFamily gauss;
  gauss.kind = KernelKind::Gaussian;
  gauss.lambda = axis(-9, -1, 5);
  gauss.gamma = axis(-4, 0, 5);

  KernelFamily poly3;
  poly3.kind = KernelKind::Polynomial;
  poly3.degree = 3;
  poly3.lambda = axis(-9, -1, 5);
  poly3.gamma = axis(-6, -2, 5);
  poly3.c = axis(-2, 2, 3);

  KernelFamily poly2 = poly3;
  poly2.degree = 2;

  const double g_mae = grid_search({gauss}, Xtr, ytr, Xte, yte).best.test.mae;
  const double p3_mae = grid_search({poly3}, Xtr, ytr, Xte, yte).best.test.mae;
  const double p2_mae = grid_search({poly2}, Xtr, ytr, Xte, yte).best.test.mae;

  std::printf(
      "    noise sigma %.4g; test MAE: gaussian %.4g (%.2f sigma), poly3 "
      "%.4g (%.2f sigma), poly2 %.4g (%.2fx poly3)\n",
      sigma, g_mae, g_mae / sigma, p3_mae, p3_mae / sigma, p2_mae,
      p2_mae / p3_mae);

  g.expect(g_mae <= kNoiseCeiling * sigma,
           "tuned gaussian test MAE within 3x the noise level");
  g.expect(p3_mae <= kNoiseCeiling * sigma,
           "tuned cubic polynomial test MAE within 3x the noise level");
  g.expect(p2_mae <= kDegree2Factor * p3_mae,
           "quadratic polynomial within 2x of the cubic");
}

// =============================================================================
// 7. Cross-validation stability at fixed hyperparameters.
// =============================================================================
void criterion7(Gate& g) {
  const ElementalTable t = load_table(table_file());
  const DataSet ds = planted_krr_dataset(t);

  const auto folds = cv_folds(static_cast<int>(ds.n()), 5, 613);
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  for (const auto& f : folds) pairs.emplace_back(f.train, f.test);

  const CvReport cv =
      cross_validate(KernelSpec::gaussian(0.1), 1e-6, ds.X, ds.y, pairs);
  g.expect(cv.folds.size() == 5, "five folds evaluated");

  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& f : cv.folds) {
    lo = std::min(lo, f.test.mae);
    hi = std::max(hi, f.test.mae);
  }
  std::printf("    fold test MAE range [%.4g, %.4g], ratio %.3f\n", lo, hi,
              hi / lo);
  g.expect(lo > 0, "every fold has nonzero test error");
  g.expect(hi / lo < kCvRatioCeiling,
           "max/min fold test MAE ratio below 2");
}

// =============================================================================
// 8. Expansion combinatorics and reciprocal pruning.
// =============================================================================
long binom(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void criterion8(Gate& g) {
  Rng rng(505);
  for (int d = 3; d <= 30; ++d) {
    Eigen::MatrixXd base(4, d);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < d; ++j) base(i, j) = 0.5 + rng.uniform01();
    std::vector<std::string> labels;
    for (int j = 0; j < d; ++j) labels.push_back("b" + std::to_string(j));

    const FeatureMatrix fm = expand(base, labels, 3, 1);
    bool ok = fm.tier_counts.size() == 3 && fm.tier_counts[0] == d &&
              fm.tier_counts[1] == binom(d + 1, 2) &&
              fm.tier_counts[2] == binom(d + 2, 3);
    g.expect(ok, "d=" + std::to_string(d) +
                     ": tier sizes equal C(d+k-1, k) before pruning");
    if (d == 27) {
      g.expect(fm.tier_counts[1] == 378, "quadratic tier at d=27 has 378");
      std::printf("    d=27 quadratic tier: %ld columns\n", fm.tier_counts[1]);
    }
  }

  // Reciprocal products on the default descriptor set are constant and go.
  const ElementalTable t = load_table(table_file());
  const DescriptorScheme scheme = DescriptorScheme::prior_default();
  const auto pairs = enumerate_pairs(Phase::Monazite, {0.25, 0.5, 0.75});
  std::vector<std::string> labels;
  Eigen::MatrixXd base;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const DescriptorVector dv = build_descriptors(t, scheme, pairs[i]);
    if (i == 0) {
      labels = dv.labels;
      base.resize(static_cast<Eigen::Index>(pairs.size()),
                  static_cast<Eigen::Index>(dv.values.size()));
    }
    for (size_t j = 0; j < dv.values.size(); ++j) {
      base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dv.values[j];
    }
  }

  std::set<std::string> expected;  // product of a label and its reciprocal
  for (size_t i = 0; i < labels.size(); ++i) {
    for (size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[j] == "inv(" + labels[i] + ")") {
        expected.insert(labels[i] + "*" + labels[j]);
      }
      if (labels[i] == "inv(" + labels[j] + ")") {
        expected.insert(labels[i] + "*" + labels[j]);
      }
    }
  }
  g.expect(expected.size() >= 6,
           "the default scheme pairs at least 6 reciprocal couples");

  const FeatureMatrix fm = expand(base, labels, 2, 1);
  std::set<std::string> removed;
  for (const RemovedColumn& rc : fm.removed) {
    g.expect(rc.reason == "zero-variance",
             rc.label + " removed as zero-variance");
    removed.insert(rc.label);
  }
  g.expect(removed == expected,
           "removed columns are exactly the reciprocal products");
  std::printf(
      "    %zu reciprocal products pruned as zero-variance out of %zu base "
      "descriptors\n",
      removed.size(), labels.size());
}

// =============================================================================
// 9. Best-subset training error vs term count on all three configurations.
// =============================================================================
void criterion9(Gate& g) {
  const ElementalTable t = load_table(table_file());
  const PlantedModel model = two_term_model();

  for (Configuration config :
       {Configuration::Monazite, Configuration::Xenotime,
        Configuration::Fused}) {
    const std::string name(configuration_name(config));
    DataSet ds = generate_synthetic(t, DescriptorScheme::prior_default(),
                                    model, config, paper_ratios());
    SparsifySection cfg;  // k_max = 5 by default
    const SparsifyOutput out = run_sparsify_stage(ds, cfg, /*threads=*/4);

    g.expect(out.formulas.size() == 5, name + ": formulas for k = 1..5");
    if (out.formulas.size() < 5) continue;

    std::vector<double> mse;
    for (const auto& f : out.formulas) mse.push_back(f.err.mse);
    std::printf("    %-9s training MSE by k:", name.c_str());
    for (double v : mse) std::printf(" %.4g", v);
    std::printf("\n");

    for (size_t k = 1; k < mse.size(); ++k) {
      g.expect(mse[k] <= mse[k - 1] * (1 + kMonotoneSlack),
               name + ": MSE non-increasing at k=" + std::to_string(k + 1));
    }
    if (config == Configuration::Fused) {
      const double drop12 = mse[0] - mse[1];
      const double drop45 = mse[3] - mse[4];
      std::printf("    fused drops: k1->2 %.4g vs k4->5 %.4g\n", drop12,
                  drop45);
      g.expect(drop12 > drop45,
               "fused: the k=1->2 improvement exceeds the k=4->5 one");
    }
  }
}

// =============================================================================
// 10. End-to-end determinism: byte-identical artifacts on a rerun.
// =============================================================================
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return "<unreadable:" + p.string() + ">";
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const fs::path& workdir, const std::string& args,
            std::string* out_text = nullptr) {
  const fs::path out_f = workdir / "_stdout.txt";
  const std::string cmd = "cd '" + workdir.string() + "' && '" LNMIX_CLI_PATH
                          "' " + args + " >'" + out_f.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  if (out_text) *out_text = slurp(out_f);
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

json reduced_config() {
  json term;
  term["coefficient"] = 1.2;
  term["factors"] = json::array({"m", "(1-m)", "diff(V)^2"});

  json family;
  family["kind"] = "gaussian";
  family["lambda"]["log10_lo"] = -9.0;
  family["lambda"]["log10_hi"] = -3.0;
  family["lambda"]["count"] = 3;
  family["gamma"]["log10_lo"] = -2.0;
  family["gamma"]["log10_hi"] = 0.0;
  family["gamma"]["count"] = 3;

  json block;
  block["property"] = "V";
  block["powers"] = json::array({2});

  json j;
  j["paths"]["elemental_table"] = table_file();
  j["paths"]["out_dir"] = "out";
  j["seeds"]["noise"] = 11;
  j["seeds"]["split"] = 211;
  j["seeds"]["cv"] = 613;
  j["dataset"]["configurations"] = json::array({"monazite"});
  j["dataset"]["ratios"] = json::array({0.25, 0.5, 0.75});
  j["dataset"]["source"] = "synthetic";
  j["dataset"]["model"]["terms"] = json::array({term});
  j["dataset"]["model"]["noise_relative"] = 0.01;
  j["scheme"]["family"] = "prior_knowledge";
  j["scheme"]["properties"] = json::array({"m", "R", "V"});
  j["scheme"]["mix_powers"] = json::array({1});
  j["scheme"]["power_blocks"] = json::array({block});
  j["krr"]["configuration"] = "monazite";
  j["krr"]["scheme"]["family"] = "krr_original";
  j["krr"]["scheme"]["properties"] = json::array({"m", "R", "V"});
  j["krr"]["split_fraction"] = 0.8;
  j["krr"]["cv_folds"] = 3;
  j["krr"]["families"] = json::array({family});
  j["krr"]["fit"]["kind"] = "gaussian";
  j["krr"]["fit"]["lambda"] = 1e-6;
  j["krr"]["fit"]["gamma"] = 0.1;
  j["sparsify"]["max_degree"] = 3;
  j["sparsify"]["lambda_path"]["start"] = 0.001;
  j["sparsify"]["lambda_path"]["step"] = 0.005;
  j["sparsify"]["lambda_path"]["stop"] = 0.096;
  j["sparsify"]["support_cap"] = 10;
  j["sparsify"]["k_max"] = 3;
  return j;
}

void criterion10(Gate& g) {
  const fs::path dir = fs::temp_directory_path() / "lnmix_acceptance_10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "config.json");
    f << reduced_config().dump(2) << "\n";
  }
  const fs::path out = dir / "out";

  const std::vector<std::string> stages = {"gen-data", "krr-scan", "krr-fit",
                                           "sparsify", "report"};
  for (const auto& s : stages) {
    std::string text;
    g.expect(run_cli(dir, s + " --config config.json", &text) == 0,
             "first pass: " + s + " exits 0" +
                 (text.empty() ? "" : " (" + text + ")"));
  }

  // Everything a consumer reads back; stage records hold wall clocks and are
  // compared structurally below.
  const std::vector<std::string> tracked = {
      "dataset_monazite_krr.csv", "dataset_monazite_prior.csv",
      "manifest.json",            "krr_scan.csv",
      "krr_scan_summary.csv",     "krr_fit_train_scatter.csv",
      "krr_fit_test_scatter.csv", "krr_fit_summary.csv",
      "lasso_path_monazite.csv",  "support_monazite.csv",
      "formulas_monazite.csv",    "formulas_monazite.txt",
      "mae_vs_k.csv",             "scatter_gaussian_train.csv",
      "scatter_gaussian_test.csv", "run_report.json"};
  std::map<std::string, std::string> snapshot;
  for (const auto& rel : tracked) {
    g.expect(fs::exists(out / rel), rel + " produced by the first pass");
    snapshot[rel] = slurp(out / rel);
  }
  std::map<std::string, json> stage_snapshot;
  for (const char* rel :
       {"stage_gen_data.json", "stage_krr_scan.json", "stage_krr_fit.json",
        "stage_sparsify.json"}) {
    stage_snapshot[rel] = json::parse(slurp(out / rel));
  }

  std::string report_text;
  for (const auto& s : stages) {
    std::string text;
    g.expect(run_cli(dir, s + " --config config.json", &text) == 0,
             "second pass: " + s + " exits 0");
    if (s == "report") report_text = text;
  }
  g.expect(report_text.find("up to date, nothing rewritten") !=
               std::string::npos,
           "unchanged report is not rewritten");

  int identical = 0;
  for (const auto& rel : tracked) {
    const bool same = slurp(out / rel) == snapshot[rel];
    g.expect(same, rel + " byte-identical across runs");
    identical += same;
  }
  for (auto& [rel, before] : stage_snapshot) {
    const json after = json::parse(slurp(out / rel));
    g.expect(after.at("stage") == before.at("stage") &&
                 after.at("config_hash") == before.at("config_hash") &&
                 after.at("artifacts") == before.at("artifacts"),
             std::string(rel) + " stable up to wall clock");
  }
  std::printf("    %d/%zu artifacts byte-identical on rerun\n", identical,
              tracked.size());
}

const char* kLabels[10] = {
    "two planted terms recovered at k=2 on the 1050-point fused set "
    "(coefficients within 5%)",
    "exhaustive-subset search bit-identical to an independent oracle on 50 "
    "instances",
    "zero-penalty solutions match dense least squares; full shrinkage at "
    "lambda_max; objective never increases",
    "ridge solutions match explicit dense inversion; zero-penalty "
    "interpolation reproduces training targets",
    "near-zero-ridge laplacian memorizes training data, fails on test data, "
    "and is flagged",
    "tuned gaussian and cubic kernels reach the noise floor; quadratic stays "
    "within 2x of cubic",
    "five-fold cross-validation errors stay within a factor of two",
    "expansion tier sizes match closed-form counts; reciprocal products "
    "pruned as constant",
    "best-subset training MSE non-increasing in k; first-term drop dominates "
    "on the fused set",
    "repeated end-to-end runs produce byte-identical artifacts",
};

}  // namespace

int main(int argc, char** argv) {
  int n = -1;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      n = std::atoi(argv[++i]);
    }
  }
  if (n < 1 || n > 10) {
    std::fprintf(stderr, "usage: acceptance --criterion <1..10>\n");
    return 2;
  }

  Gate g;
  try {
    switch (n) {
      case 1: criterion1(g); break;
      case 2: criterion2(g); break;
      case 3: criterion3(g); break;
      case 4: criterion4(g); break;
      case 5: criterion5(g); break;
      case 6: criterion6(g); break;
      case 7: criterion7(g); break;
      case 8: criterion8(g); break;
      case 9: criterion9(g); break;
      case 10: criterion10(g); break;
    }
  } catch (const std::exception& e) {
    g.expect(false, std::string("unexpected exception: ") + e.what());
  }

  const bool ok = g.failed == 0 && g.checked > 0;
  std::printf("criterion %d: %s — %s\n", n, ok ? "PASS" : "FAIL",
              kLabels[n - 1]);
  return ok ? 0 : 1;
}
