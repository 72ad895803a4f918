#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lnmix/descriptors.hpp"
#include "lnmix/elemental_table.hpp"

namespace lnmix {

// Which host-phase slice a dataset covers. Fused = monazite points followed
// by xenotime points.
enum class Configuration { Monazite, Xenotime, Fused };

std::string_view configuration_name(Configuration c);
std::optional<Configuration> configuration_from_name(std::string_view name);

// Unit constant: 1 GPa * A^3 per formula unit = 0.6022 kJ/mol.
inline constexpr double kGpaA3ToKjPerMol = 0.6022;

// All C(15,2) = 105 unordered element pairs crossed with the given mixing
// ratios, canonically oriented, in deterministic order (pairs lexicographic
// by element order, ratios in the given order).
std::vector<MixPair> enumerate_pairs(Phase phase,
                                     const std::vector<double>& ratios);

// Elastic mixing estimate for one pair:
//   m(1-m) * (mean(Y) / (6 mean(V))) * |V_i - V_j|^2 * 0.6022   [kJ/mol]
double margules_baseline(const ElementalTable& t, const MixPair& pair);

// One planted formula term: coefficient times a product of base-descriptor
// labels (any multiplicity). Factors must exist in the generating scheme.
struct PlantedTerm {
  double coefficient = 0.0;
  std::vector<std::string> factors;
};

struct PlantedModel {
  std::vector<PlantedTerm> terms;
  // Absolute noise standard deviation, or a fraction of the noiseless
  // target range if noise_relative is set (it then wins).
  double noise_sigma = 0.0;
  std::optional<double> noise_relative;
  std::uint64_t seed = 0;
};

struct DataSet {
  std::vector<std::string> labels;  // descriptor columns of X
  Eigen::MatrixXd X;                // one row per point
  Eigen::VectorXd y;                // kJ/mol
  std::vector<MixPair> pairs;       // row order
  std::vector<std::string> dropped_labels;  // removed for the whole set
  double noise_sigma_used = 0.0;    // resolved absolute sigma

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
};

// Builds the descriptor matrix for `x_scheme` over the configuration's
// pairs and plants y from `model`, whose factors are resolved against
// `eval_scheme` (the two schemes may differ; the target never depends on
// the descriptor family used for X). Labels dropped for any pair
// (reciprocals of exact zeros) are dropped for the whole set so every row
// shares one schema.
DataSet generate_synthetic(const ElementalTable& t,
                           const DescriptorScheme& x_scheme,
                           const DescriptorScheme& eval_scheme,
                           const PlantedModel& model, Configuration config,
                           const std::vector<double>& ratios);

// Convenience overload: one scheme for both roles.
DataSet generate_synthetic(const ElementalTable& t,
                           const DescriptorScheme& scheme,
                           const PlantedModel& model, Configuration config,
                           const std::vector<double>& ratios);

// Deterministic shuffled split: round(train_fraction * n) train points.
struct SplitPlan {
  std::vector<int> train;
  std::vector<int> test;
};

SplitPlan split(int n, double train_fraction, std::uint64_t seed);

// k disjoint test folds covering all n points (sizes differ by at most 1);
// fold i trains on the complement of its test block.
std::vector<SplitPlan> cv_folds(int n, int k, std::uint64_t seed);

// CSV schema: descriptor labels, then y, pair, phase, m. Exact numeric
// round trip.
void write_dataset_csv(const DataSet& ds, const std::string& path);
DataSet read_dataset_csv(const std::string& path);

}  // namespace lnmix
