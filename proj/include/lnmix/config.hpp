#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lnmix/dataset.hpp"
#include "lnmix/descriptors.hpp"
#include "lnmix/krr.hpp"

namespace lnmix {

// Run configuration: one JSON file drives every subcommand.  Parsing
// validates eagerly and reports failures as ConfigError with the offending
// field path (e.g. "sparsify.k_max: must be in [1, 5]").  Relative paths are
// resolved against the working directory.

struct DatasetSection {
  std::vector<Configuration> configurations;
  std::vector<double> ratios;
  std::string source;  // "synthetic" or "csv"
  std::string csv_path;
  PlantedModel model;  // synthetic only; seed comes from seeds.noise
};

// The single model evaluated by `krr-fit` (scatter + cross-validation).
struct KrrFitSpec {
  KernelKind kind = KernelKind::Gaussian;
  int degree = 3;  // polynomial only
  double lambda = 1e-9;
  double gamma = 0.1;
  double c = 1.0;  // polynomial only

  KernelSpec kernel() const;
};

struct KrrSection {
  Configuration configuration = Configuration::Fused;
  DescriptorScheme scheme;
  double split_fraction = 0.8;
  bool standardize = true;
  int refine_rounds = 0;
  double overfit_threshold = 10.0;
  int cv_folds = 5;
  std::vector<KernelFamily> families;
  KrrFitSpec fit;
};

struct SparsifySection {
  int max_degree = 3;
  double path_start = 0.001;
  double path_step = 0.005;
  double path_stop = 0.096;
  int support_cap = 30;
  int k_max = 5;
  double tolerance_scale = 1e-8;  // sweep tolerance = this * stddev(target)
  int max_sweeps = 2000;
  bool cache = false;
};

struct Seeds {
  std::uint64_t noise = 1;
  std::uint64_t split = 2;
  std::uint64_t cv = 3;
};

struct RunConfig {
  std::string elemental_table;
  std::string out_dir;
  int threads = 1;
  Seeds seeds;
  DatasetSection dataset;
  DescriptorScheme scheme;  // base descriptors for sparsification
  KrrSection krr;
  SparsifySection sparsify;
};

// Parses and validates; `source_name` appears in error messages.
RunConfig parse_config(const std::string& json_text,
                       const std::string& source_name);

RunConfig load_config(const std::string& path);

// Canonical serialization of the parsed config (sorted keys, fixed field
// set), so the hash tracks semantic content rather than formatting.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

}  // namespace lnmix
