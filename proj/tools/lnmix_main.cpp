#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "lnmix/config.hpp"
#include "lnmix/errors.hpp"
#include "lnmix/pipeline.hpp"

namespace {

void print_stage(const lnmix::StageOutput& out) {
  if (out.skipped) {
    std::printf("[%s] up to date, nothing rewritten (%.3f s)\n",
                out.stage.c_str(), out.wall_clock_sec);
  } else {
    std::printf("[%s] done in %.3f s\n", out.stage.c_str(),
                out.wall_clock_sec);
  }
  for (const auto& rel : out.artifacts) std::printf("  %s\n", rel.c_str());
}

int fail(const char* category, const std::exception& e, int code) {
  std::fprintf(stderr, "error (%s): %s\n", category, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "explainable sparse regression for lanthanide mixing enthalpies"};
  app.require_subcommand(1);

  std::string config_path = "configs/default.json";
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")
      ->capture_default_str();
  app.add_option("--out", out_dir, "override the output directory");
  app.add_option("--seed", seed,
                 "override all seeds (noise=s, split=s+1, cv=s+2)");
  app.add_option("--threads", threads, "override the worker thread count");

  auto* gen = app.add_subcommand("gen-data", "generate datasets and manifest");
  auto* scan =
      app.add_subcommand("krr-scan", "kernel ridge hyperparameter grid scan");
  auto* fit = app.add_subcommand(
      "krr-fit", "fit one kernel ridge model and cross-validate it");
  auto* sparsify = app.add_subcommand(
      "sparsify", "feature expansion, penalty path, exhaustive subsets");
  auto* report = app.add_subcommand(
      "report", "collect artifacts into the final run report");
  for (auto* sub : {gen, scan, fit, sparsify, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    lnmix::RunConfig cfg = lnmix::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) {
      cfg.seeds.noise = static_cast<std::uint64_t>(seed);
      cfg.seeds.split = static_cast<std::uint64_t>(seed) + 1;
      cfg.seeds.cv = static_cast<std::uint64_t>(seed) + 2;
      cfg.dataset.model.seed = cfg.seeds.noise;
    }
    if (threads > 0) cfg.threads = threads;

    lnmix::StageOutput out;
    if (gen->parsed()) {
      out = lnmix::cmd_gen_data(cfg);
    } else if (scan->parsed()) {
      out = lnmix::cmd_krr_scan(cfg);
    } else if (fit->parsed()) {
      out = lnmix::cmd_krr_fit(cfg);
    } else if (sparsify->parsed()) {
      out = lnmix::cmd_sparsify(cfg);
    } else if (report->parsed()) {
      out = lnmix::cmd_report(cfg);
    }
    print_stage(out);
    return 0;
  } catch (const lnmix::ConfigError& e) {
    return fail("config", e, 1);
  } catch (const lnmix::SchemaError& e) {
    return fail("schema", e, 1);
  } catch (const lnmix::ParseError& e) {
    return fail("parse", e, 1);
  } catch (const lnmix::LookupError& e) {
    return fail("lookup", e, 1);
  } catch (const lnmix::PreconditionError& e) {
    return fail("precondition", e, 1);
  } catch (const lnmix::NumericalError& e) {
    return fail("numerical", e, 2);
  } catch (const std::exception& e) {
    return fail("runtime", e, 2);
  }
}
