#include "lnmix/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lnmix/errors.hpp"

namespace lnmix {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double get_double(const json& obj, const std::string& key,
                  const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(path + "." + key, "must be finite");
  return d;
}

double get_double_or(const json& obj, const std::string& key,
                     const std::string& path, double fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  return get_double(obj, key, path);
}

long get_int(const json& obj, const std::string& key,
             const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  return v.get<long>();
}

long get_int_or(const json& obj, const std::string& key,
                const std::string& path, long fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  return get_int(obj, key, path);
}

std::uint64_t get_u64_or(const json& obj, const std::string& key,
                         const std::string& path, std::uint64_t fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 &&
                                 !v.is_number_unsigned())) {
    fail(path + "." + key, "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) fail(path + "." + key, "must be a string");
  return v.get<std::string>();
}

bool get_bool_or(const json& obj, const std::string& key,
                 const std::string& path, bool fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "must be a boolean");
  return v.get<bool>();
}

const json& get_array(const json& obj, const std::string& key,
                      const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) fail(path + "." + key, "must be an array");
  return v;
}

PropertyId parse_property(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a property name string");
  auto p = property_from_name(v.get<std::string>());
  if (!p) fail(path, "unknown property '" + v.get<std::string>() + "'");
  return *p;
}

DescriptorScheme parse_scheme(const json& obj, const std::string& path) {
  DescriptorScheme s;
  const std::string fam = get_string(obj, "family", path);
  if (fam == "krr_original") {
    s.family = DescriptorFamily::KrrOriginal;
  } else if (fam == "prior_knowledge") {
    s.family = DescriptorFamily::PriorKnowledge;
  } else {
    fail(path + ".family", "must be 'krr_original' or 'prior_knowledge'");
  }
  const json& props = get_array(obj, "properties", path);
  if (props.empty()) fail(path + ".properties", "must be non-empty");
  for (size_t i = 0; i < props.size(); ++i) {
    s.properties.push_back(parse_property(
        props[i], path + ".properties[" + std::to_string(i) + "]"));
  }
  std::set<PropertyId> uniq(s.properties.begin(), s.properties.end());
  if (uniq.size() != s.properties.size()) {
    fail(path + ".properties", "contains duplicates");
  }
  s.include_inverses = get_bool_or(obj, "include_inverses", path, true);
  auto read_powers = [&](const char* key, std::vector<int> fallback) {
    if (obj.find(key) == obj.end()) return fallback;
    const json& arr = get_array(obj, key, path);
    std::vector<int> out;
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "." + key + "[" + std::to_string(i) + "]";
      if (!arr[i].is_number_integer()) fail(p, "must be an integer");
      long v = arr[i].get<long>();
      if (v < 1 || v > 6) fail(p, "must be in [1, 6]");
      out.push_back(static_cast<int>(v));
    }
    return out;
  };
  s.mix_powers = read_powers("mix_powers", {1, 2});
  s.mix_inverse_powers = read_powers("mix_inverse_powers", {1});
  s.power_blocks.clear();
  if (obj.find("power_blocks") != obj.end()) {
    const json& blocks = get_array(obj, "power_blocks", path);
    for (size_t i = 0; i < blocks.size(); ++i) {
      const std::string p = path + ".power_blocks[" + std::to_string(i) + "]";
      PropertyId prop = parse_property(require(blocks[i], "property", p), p + ".property");
      const json& pow = get_array(blocks[i], "powers", p);
      std::vector<int> powers;
      for (size_t q = 0; q < pow.size(); ++q) {
        const std::string pq = p + ".powers[" + std::to_string(q) + "]";
        if (!pow[q].is_number_integer()) fail(pq, "must be an integer");
        long v = pow[q].get<long>();
        if (v < 2 || v > 6) fail(pq, "must be in [2, 6]");
        powers.push_back(static_cast<int>(v));
      }
      if (powers.empty()) fail(p + ".powers", "must be non-empty");
      s.power_blocks.emplace_back(prop, std::move(powers));
    }
  }
  return s;
}

GridAxis parse_axis(const json& obj, const std::string& key,
                    const std::string& path) {
  const json& v = require(obj, key, path);
  const std::string p = path + "." + key;
  GridAxis ax;
  ax.log10_lo = get_double(v, "log10_lo", p);
  ax.log10_hi = get_double_or(v, "log10_hi", p, ax.log10_lo);
  long count = get_int_or(v, "count", p, 1);
  if (count < 1) fail(p + ".count", "must be >= 1");
  if (count > 1 && !(ax.log10_hi >= ax.log10_lo)) {
    fail(p, "log10_hi must be >= log10_lo");
  }
  ax.count = static_cast<int>(count);
  return ax;
}

KernelKind parse_kind(const std::string& kind, const std::string& path) {
  if (kind == "poly" || kind == "polynomial") return KernelKind::Polynomial;
  if (kind == "gaussian") return KernelKind::Gaussian;
  if (kind == "laplacian") return KernelKind::Laplacian;
  fail(path, "must be 'poly', 'gaussian', or 'laplacian'");
}

Configuration parse_configuration(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a configuration name string");
  auto c = configuration_from_name(v.get<std::string>());
  if (!c) {
    fail(path, "unknown configuration '" + v.get<std::string>() +
                   "' (monazite, xenotime, fused)");
  }
  return *c;
}

json scheme_to_json(const DescriptorScheme& s) {
  json j;
  j["family"] = s.family == DescriptorFamily::KrrOriginal ? "krr_original"
                                                          : "prior_knowledge";
  json props = json::array();
  for (auto p : s.properties) props.push_back(std::string(property_name(p)));
  j["properties"] = props;
  j["include_inverses"] = s.include_inverses;
  j["mix_powers"] = s.mix_powers;
  j["mix_inverse_powers"] = s.mix_inverse_powers;
  json blocks = json::array();
  for (const auto& [prop, powers] : s.power_blocks) {
    json b;
    b["property"] = std::string(property_name(prop));
    b["powers"] = powers;
    blocks.push_back(b);
  }
  j["power_blocks"] = blocks;
  return j;
}

}  // namespace

KernelSpec KrrFitSpec::kernel() const {
  switch (kind) {
    case KernelKind::Polynomial:
      return KernelSpec::polynomial(degree, gamma, c);
    case KernelKind::Gaussian:
      return KernelSpec::gaussian(gamma);
    default:
      return KernelSpec::laplacian(gamma);
  }
}

RunConfig parse_config(const std::string& json_text,
                       const std::string& source_name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(source_name + ": not a JSON object");

  RunConfig cfg;

  const json& paths = require(root, "paths", "config");
  cfg.elemental_table = get_string(paths, "elemental_table", "paths");
  cfg.out_dir = get_string(paths, "out_dir", "paths");
  if (cfg.elemental_table.empty()) fail("paths.elemental_table", "must be non-empty");
  if (cfg.out_dir.empty()) fail("paths.out_dir", "must be non-empty");
  if (!std::filesystem::exists(cfg.elemental_table)) {
    fail("paths.elemental_table", "file not found: " + cfg.elemental_table);
  }

  long threads = get_int_or(root, "threads", "config", 1);
  if (threads < 1 || threads > 256) fail("threads", "must be in [1, 256]");
  cfg.threads = static_cast<int>(threads);

  if (root.find("seeds") != root.end()) {
    const json& seeds = root.at("seeds");
    cfg.seeds.noise = get_u64_or(seeds, "noise", "seeds", cfg.seeds.noise);
    cfg.seeds.split = get_u64_or(seeds, "split", "seeds", cfg.seeds.split);
    cfg.seeds.cv = get_u64_or(seeds, "cv", "seeds", cfg.seeds.cv);
  }

  // --- dataset ---------------------------------------------------------
  const json& ds = require(root, "dataset", "config");
  const json& configs = get_array(ds, "configurations", "dataset");
  if (configs.empty()) fail("dataset.configurations", "must be non-empty");
  for (size_t i = 0; i < configs.size(); ++i) {
    cfg.dataset.configurations.push_back(parse_configuration(
        configs[i], "dataset.configurations[" + std::to_string(i) + "]"));
  }
  {
    std::set<Configuration> uniq(cfg.dataset.configurations.begin(),
                                 cfg.dataset.configurations.end());
    if (uniq.size() != cfg.dataset.configurations.size()) {
      fail("dataset.configurations", "contains duplicates");
    }
  }
  const json& ratios = get_array(ds, "ratios", "dataset");
  if (ratios.empty()) fail("dataset.ratios", "must be non-empty");
  for (size_t i = 0; i < ratios.size(); ++i) {
    const std::string p = "dataset.ratios[" + std::to_string(i) + "]";
    if (!ratios[i].is_number()) fail(p, "must be a number");
    double r = ratios[i].get<double>();
    if (!(r > 0) || !(r < 1)) fail(p, "must be in (0, 1)");
    cfg.dataset.ratios.push_back(r);
  }
  cfg.dataset.source = get_string(ds, "source", "dataset");
  if (cfg.dataset.source == "csv") {
    cfg.dataset.csv_path = get_string(ds, "csv_path", "dataset");
    if (!std::filesystem::exists(cfg.dataset.csv_path)) {
      fail("dataset.csv_path", "file not found: " + cfg.dataset.csv_path);
    }
    if (cfg.dataset.configurations.size() != 1) {
      fail("dataset.configurations",
           "an external csv holds one dataset; list exactly one configuration");
    }
  } else if (cfg.dataset.source == "synthetic") {
    const json& model = require(ds, "model", "dataset");
    const json& terms = get_array(model, "terms", "dataset.model");
    if (terms.empty()) fail("dataset.model.terms", "must be non-empty");
    for (size_t i = 0; i < terms.size(); ++i) {
      const std::string p = "dataset.model.terms[" + std::to_string(i) + "]";
      PlantedTerm term;
      term.coefficient = get_double(terms[i], "coefficient", p);
      const json& factors = get_array(terms[i], "factors", p);
      if (factors.empty()) fail(p + ".factors", "must be non-empty");
      for (size_t q = 0; q < factors.size(); ++q) {
        const std::string pq = p + ".factors[" + std::to_string(q) + "]";
        if (!factors[q].is_string()) fail(pq, "must be a label string");
        term.factors.push_back(factors[q].get<std::string>());
      }
      cfg.dataset.model.terms.push_back(std::move(term));
    }
    const bool has_rel = model.find("noise_relative") != model.end();
    const bool has_abs = model.find("noise_sigma") != model.end();
    if (!has_rel && !has_abs) {
      fail("dataset.model", "needs noise_relative or noise_sigma");
    }
    if (has_rel) {
      double rel = get_double(model, "noise_relative", "dataset.model");
      if (!(rel >= 0) || rel >= 1) {
        fail("dataset.model.noise_relative", "must be in [0, 1)");
      }
      cfg.dataset.model.noise_relative = rel;
    }
    if (has_abs) {
      double sig = get_double(model, "noise_sigma", "dataset.model");
      if (!(sig >= 0)) fail("dataset.model.noise_sigma", "must be >= 0");
      cfg.dataset.model.noise_sigma = sig;
    }
    cfg.dataset.model.seed = cfg.seeds.noise;
  } else {
    fail("dataset.source", "must be 'synthetic' or 'csv'");
  }

  // --- schemes ----------------------------------------------------------
  cfg.scheme = parse_scheme(require(root, "scheme", "config"), "scheme");

  // --- krr --------------------------------------------------------------
  const json& krr = require(root, "krr", "config");
  cfg.krr.configuration =
      parse_configuration(require(krr, "configuration", "krr"),
                          "krr.configuration");
  cfg.krr.scheme = parse_scheme(require(krr, "scheme", "krr"), "krr.scheme");
  cfg.krr.split_fraction = get_double(krr, "split_fraction", "krr");
  if (!(cfg.krr.split_fraction > 0) || !(cfg.krr.split_fraction < 1)) {
    fail("krr.split_fraction", "must be in (0, 1)");
  }
  cfg.krr.standardize = get_bool_or(krr, "standardize", "krr", true);
  long rounds = get_int_or(krr, "refine_rounds", "krr", 0);
  if (rounds < 0 || rounds > 16) fail("krr.refine_rounds", "must be in [0, 16]");
  cfg.krr.refine_rounds = static_cast<int>(rounds);
  cfg.krr.overfit_threshold =
      get_double_or(krr, "overfit_threshold", "krr", 10.0);
  if (!(cfg.krr.overfit_threshold > 0)) {
    fail("krr.overfit_threshold", "must be > 0");
  }
  long folds = get_int_or(krr, "cv_folds", "krr", 5);
  if (folds < 2 || folds > 100) fail("krr.cv_folds", "must be in [2, 100]");
  cfg.krr.cv_folds = static_cast<int>(folds);

  const json& families = get_array(krr, "families", "krr");
  if (families.empty()) fail("krr.families", "must be non-empty");
  for (size_t i = 0; i < families.size(); ++i) {
    const std::string p = "krr.families[" + std::to_string(i) + "]";
    KernelFamily fam;
    fam.kind = parse_kind(get_string(families[i], "kind", p), p + ".kind");
    if (fam.kind == KernelKind::Polynomial) {
      long deg = get_int(families[i], "degree", p);
      if (deg < 1 || deg > 12) fail(p + ".degree", "must be in [1, 12]");
      fam.degree = static_cast<int>(deg);
    }
    fam.lambda = parse_axis(families[i], "lambda", p);
    fam.gamma = parse_axis(families[i], "gamma", p);
    if (fam.kind == KernelKind::Polynomial) {
      fam.c = parse_axis(families[i], "c", p);
    }
    cfg.krr.families.push_back(fam);
  }

  const json& fit = require(krr, "fit", "krr");
  cfg.krr.fit.kind = parse_kind(get_string(fit, "kind", "krr.fit"),
                                "krr.fit.kind");
  if (cfg.krr.fit.kind == KernelKind::Polynomial) {
    long deg = get_int(fit, "degree", "krr.fit");
    if (deg < 1 || deg > 12) fail("krr.fit.degree", "must be in [1, 12]");
    cfg.krr.fit.degree = static_cast<int>(deg);
    cfg.krr.fit.c = get_double_or(fit, "c", "krr.fit", 1.0);
    if (cfg.krr.fit.c < 0) fail("krr.fit.c", "must be >= 0");
  }
  cfg.krr.fit.lambda = get_double(fit, "lambda", "krr.fit");
  if (!(cfg.krr.fit.lambda >= 0)) fail("krr.fit.lambda", "must be >= 0");
  cfg.krr.fit.gamma = get_double(fit, "gamma", "krr.fit");
  if (!(cfg.krr.fit.gamma > 0)) fail("krr.fit.gamma", "must be > 0");

  // --- sparsify ----------------------------------------------------------
  const json& sp = require(root, "sparsify", "config");
  long deg = get_int_or(sp, "max_degree", "sparsify", 3);
  if (deg < 2 || deg > 3) fail("sparsify.max_degree", "must be 2 or 3");
  cfg.sparsify.max_degree = static_cast<int>(deg);
  const json& path = require(sp, "lambda_path", "sparsify");
  cfg.sparsify.path_start = get_double(path, "start", "sparsify.lambda_path");
  cfg.sparsify.path_step = get_double(path, "step", "sparsify.lambda_path");
  cfg.sparsify.path_stop = get_double(path, "stop", "sparsify.lambda_path");
  if (!(cfg.sparsify.path_start >= 0)) {
    fail("sparsify.lambda_path.start", "must be >= 0");
  }
  if (!(cfg.sparsify.path_step > 0)) {
    fail("sparsify.lambda_path.step", "must be > 0");
  }
  if (!(cfg.sparsify.path_stop >= cfg.sparsify.path_start)) {
    fail("sparsify.lambda_path.stop", "must be >= start");
  }
  long cap = get_int_or(sp, "support_cap", "sparsify", 30);
  if (cap < 1 || cap > 40) fail("sparsify.support_cap", "must be in [1, 40]");
  cfg.sparsify.support_cap = static_cast<int>(cap);
  long kmax = get_int_or(sp, "k_max", "sparsify", 5);
  if (kmax < 1 || kmax > 5) fail("sparsify.k_max", "must be in [1, 5]");
  cfg.sparsify.k_max = static_cast<int>(kmax);
  cfg.sparsify.tolerance_scale =
      get_double_or(sp, "tolerance_scale", "sparsify", 1e-8);
  if (!(cfg.sparsify.tolerance_scale > 0)) {
    fail("sparsify.tolerance_scale", "must be > 0");
  }
  long sweeps = get_int_or(sp, "max_sweeps", "sparsify", 2000);
  if (sweeps < 1) fail("sparsify.max_sweeps", "must be >= 1");
  cfg.sparsify.max_sweeps = static_cast<int>(sweeps);
  cfg.sparsify.cache = get_bool_or(sp, "cache", "sparsify", false);

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string canonical_config(const RunConfig& cfg) {
  json j;
  j["paths"]["elemental_table"] = cfg.elemental_table;
  j["paths"]["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["seeds"]["noise"] = cfg.seeds.noise;
  j["seeds"]["split"] = cfg.seeds.split;
  j["seeds"]["cv"] = cfg.seeds.cv;

  json configs = json::array();
  for (auto c : cfg.dataset.configurations) {
    configs.push_back(std::string(configuration_name(c)));
  }
  j["dataset"]["configurations"] = configs;
  j["dataset"]["ratios"] = cfg.dataset.ratios;
  j["dataset"]["source"] = cfg.dataset.source;
  j["dataset"]["csv_path"] = cfg.dataset.csv_path;
  json terms = json::array();
  for (const auto& t : cfg.dataset.model.terms) {
    json jt;
    jt["coefficient"] = t.coefficient;
    jt["factors"] = t.factors;
    terms.push_back(jt);
  }
  j["dataset"]["model"]["terms"] = terms;
  j["dataset"]["model"]["noise_sigma"] = cfg.dataset.model.noise_sigma;
  if (cfg.dataset.model.noise_relative) {
    j["dataset"]["model"]["noise_relative"] = *cfg.dataset.model.noise_relative;
  }

  j["scheme"] = scheme_to_json(cfg.scheme);

  j["krr"]["configuration"] =
      std::string(configuration_name(cfg.krr.configuration));
  j["krr"]["scheme"] = scheme_to_json(cfg.krr.scheme);
  j["krr"]["split_fraction"] = cfg.krr.split_fraction;
  j["krr"]["standardize"] = cfg.krr.standardize;
  j["krr"]["refine_rounds"] = cfg.krr.refine_rounds;
  j["krr"]["overfit_threshold"] = cfg.krr.overfit_threshold;
  j["krr"]["cv_folds"] = cfg.krr.cv_folds;
  json fams = json::array();
  for (const auto& f : cfg.krr.families) {
    json jf;
    jf["kind"] = std::string(kernel_kind_name(f.kind));
    jf["degree"] = f.degree;
    for (const auto& [name, ax] :
         {std::pair<const char*, const GridAxis*>{"lambda", &f.lambda},
          {"gamma", &f.gamma},
          {"c", &f.c}}) {
      jf[name]["log10_lo"] = ax->log10_lo;
      jf[name]["log10_hi"] = ax->log10_hi;
      jf[name]["count"] = ax->count;
    }
    fams.push_back(jf);
  }
  j["krr"]["families"] = fams;
  j["krr"]["fit"]["kind"] = std::string(kernel_kind_name(cfg.krr.fit.kind));
  j["krr"]["fit"]["degree"] = cfg.krr.fit.degree;
  j["krr"]["fit"]["lambda"] = cfg.krr.fit.lambda;
  j["krr"]["fit"]["gamma"] = cfg.krr.fit.gamma;
  j["krr"]["fit"]["c"] = cfg.krr.fit.c;

  j["sparsify"]["max_degree"] = cfg.sparsify.max_degree;
  j["sparsify"]["lambda_path"]["start"] = cfg.sparsify.path_start;
  j["sparsify"]["lambda_path"]["step"] = cfg.sparsify.path_step;
  j["sparsify"]["lambda_path"]["stop"] = cfg.sparsify.path_stop;
  j["sparsify"]["support_cap"] = cfg.sparsify.support_cap;
  j["sparsify"]["k_max"] = cfg.sparsify.k_max;
  j["sparsify"]["tolerance_scale"] = cfg.sparsify.tolerance_scale;
  j["sparsify"]["max_sweeps"] = cfg.sparsify.max_sweeps;
  j["sparsify"]["cache"] = cfg.sparsify.cache;

  return j.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

}  // namespace lnmix
