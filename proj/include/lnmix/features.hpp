#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lnmix {

// One candidate function: an element-wise product of base columns, identified
// by the sorted multiset of base indices it was built from.
struct FeatureColumn {
  std::vector<int> factors;  // base indices, ascending, size 1..max_degree
  std::string label;         // base labels joined with '*'
};

struct RemovedColumn {
  std::string label;
  std::string reason;  // "zero-variance" or "non-finite"
};

// Candidate-function space: every multiset product of base columns up to
// max_degree, minus degenerate columns.  Column-major so per-column sweeps
// stay cache-friendly.
struct FeatureMatrix {
  Eigen::MatrixXd values;  // N x M
  std::vector<FeatureColumn> columns;
  std::vector<std::string> base_labels;
  int max_degree = 0;
  Eigen::VectorXd col_mean;  // stats of the current values
  Eigen::VectorXd col_std;   // population standard deviation
  std::vector<RemovedColumn> removed;
  std::vector<long> tier_counts;  // pre-prune multiset count per degree 1..max

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index m() const { return values.cols(); }
};

// Enumerates all multisets of base columns of size 1..max_degree in graded
// lexicographic order and emits their element-wise products.  Columns whose
// product is non-finite or whose standard deviation is below 1e-10 of the
// column's RMS are removed and logged (reciprocal pairs multiply to an
// almost-exact constant, so the cut cannot demand an exact zero).
// `threads` > 1 splits the column computation; output is order-independent.
FeatureMatrix expand(const Eigen::MatrixXd& base,
                     const std::vector<std::string>& base_labels,
                     int max_degree, int threads = 1);

// Centering + unit population standard deviation applied in place; returns
// the transform needed to map coefficients back to raw scale.
struct ColumnTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};

ColumnTransform standardize(FeatureMatrix& fm);

// Maps coefficients fitted on standardized columns back to raw columns so
// that predictions agree: y = intercept_raw + sum_j gamma_raw[j] * x_j.
struct RawCoefficients {
  Eigen::VectorXd gamma;
  double intercept = 0;
};

RawCoefficients unstandardize_coeffs(const Eigen::VectorXd& gamma_std,
                                     double intercept_std,
                                     const ColumnTransform& transform);

// Recomputes raw product columns for a subset of features straight from the
// base matrix (same factor order as expand, so values match bit for bit).
Eigen::MatrixXd materialize_columns(const Eigen::MatrixXd& base,
                                    const std::vector<FeatureColumn>& columns,
                                    const std::vector<int>& indices);

// --- optional on-disk cache ------------------------------------------------
//
// Little-endian binary layout:
//   magic "LNFM", u32 version, u64 key hash, u64 N, u64 M, u32 max_degree,
//   base label table, per-column factor lists + labels, removed table,
//   tier counts, then M*N column-major doubles.
// Strings are u64 length + bytes; integer lists are u64 count + i64 entries.

uint64_t feature_cache_key(const Eigen::MatrixXd& base,
                           const std::vector<std::string>& base_labels,
                           int max_degree);

void save_cache(const std::string& path, const FeatureMatrix& fm,
                uint64_t key);

// Returns nothing when the file is absent, malformed, or keyed differently.
std::optional<FeatureMatrix> load_cache(const std::string& path, uint64_t key);

}  // namespace lnmix
