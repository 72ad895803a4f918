#pragma once

#include <string>
#include <vector>

#include "lnmix/config.hpp"
#include "lnmix/dataset.hpp"
#include "lnmix/features.hpp"
#include "lnmix/sparsify.hpp"

namespace lnmix {

// One executed subcommand: what it wrote and how long it took.  Artifact
// paths are relative to the configured output directory.
struct StageOutput {
  std::string stage;
  std::vector<std::string> artifacts;
  double wall_clock_sec = 0;
  bool skipped = false;  // report reruns leave matching artifacts untouched
};

// In-memory result of the sparsification stage on one dataset:
// expand -> standardize -> penalty path -> support -> exhaustive subsets.
//
// The penalty path runs on columns scaled to unit Euclidean norm against the
// centered target scaled to unit Euclidean norm, which makes the configured
// path values act on correlation scale regardless of target units; the
// reported path errors and every k-term formula are in raw target units
// (subset fits re-materialize raw columns from the base matrix).
struct SparsifyOutput {
  std::vector<PathEntry> path;
  std::vector<int> support;
  std::vector<std::string> support_labels;
  std::vector<SparseFormula> formulas;
  std::vector<std::string> skipped_singular;
  std::vector<RemovedColumn> removed;
  std::vector<long> tier_counts;
  long feature_count = 0;  // columns surviving the expansion prune
};

SparsifyOutput run_sparsify_stage(const DataSet& ds,
                                  const SparsifySection& cfg, int threads,
                                  const std::string& cache_path = "");

// Subcommand bodies.  Each writes its artifacts plus a stage record
// (stage_<name>.json with the config hash and wall clock) under out_dir.
StageOutput cmd_gen_data(const RunConfig& cfg);
StageOutput cmd_krr_scan(const RunConfig& cfg);
StageOutput cmd_krr_fit(const RunConfig& cfg);
StageOutput cmd_sparsify(const RunConfig& cfg);
StageOutput cmd_report(const RunConfig& cfg);

// Artifact path helpers (relative to out_dir), shared with tests.
std::string dataset_artifact(Configuration config, const std::string& tag);

}  // namespace lnmix
