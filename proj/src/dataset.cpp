#include "lnmix/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "lnmix/csv.hpp"
#include "lnmix/errors.hpp"
#include "lnmix/rng.hpp"

namespace lnmix {

std::string_view configuration_name(Configuration c) {
  switch (c) {
    case Configuration::Monazite:
      return "monazite";
    case Configuration::Xenotime:
      return "xenotime";
    default:
      return "fused";
  }
}

std::optional<Configuration> configuration_from_name(std::string_view name) {
  if (name == "monazite") return Configuration::Monazite;
  if (name == "xenotime") return Configuration::Xenotime;
  if (name == "fused") return Configuration::Fused;
  return std::nullopt;
}

std::vector<MixPair> enumerate_pairs(Phase phase,
                                     const std::vector<double>& ratios) {
  if (ratios.empty()) {
    throw PreconditionError("pair enumeration needs at least one mixing ratio");
  }
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw PreconditionError("mixing ratio must lie in (0, 1), got " +
                              std::to_string(r));
    }
  }
  std::vector<MixPair> pairs;
  auto elems = all_elements();
  for (int i = 0; i < kElementCount; ++i) {
    for (int j = i + 1; j < kElementCount; ++j) {
      for (double m : ratios) {
        pairs.push_back(MixPair::make(elems[i], elems[j], m, phase));
      }
    }
  }
  return pairs;
}

double margules_baseline(const ElementalTable& t, const MixPair& pair) {
  double yi = t.property(pair.li, pair.phase, PropertyId::Y);
  double yj = t.property(pair.lj, pair.phase, PropertyId::Y);
  double vi = t.property(pair.li, pair.phase, PropertyId::V);
  double vj = t.property(pair.lj, pair.phase, PropertyId::V);
  double mean_y = (yi + yj) / 2.0;
  double mean_v = (vi + vj) / 2.0;
  double dv = vi - vj;
  return pair.m * (1.0 - pair.m) * (mean_y / (6.0 * mean_v)) * (dv * dv) *
         kGpaA3ToKjPerMol;
}

namespace {

std::vector<MixPair> configuration_pairs(Configuration config,
                                         const std::vector<double>& ratios) {
  std::vector<MixPair> pairs;
  if (config == Configuration::Monazite || config == Configuration::Fused) {
    auto p = enumerate_pairs(Phase::Monazite, ratios);
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  if (config == Configuration::Xenotime || config == Configuration::Fused) {
    auto p = enumerate_pairs(Phase::Xenotime, ratios);
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  return pairs;
}

}  // namespace

DataSet generate_synthetic(const ElementalTable& t,
                           const DescriptorScheme& x_scheme,
                           const DescriptorScheme& eval_scheme,
                           const PlantedModel& model, Configuration config,
                           const std::vector<double>& ratios) {
  auto pairs = configuration_pairs(config, ratios);
  const auto n = static_cast<Eigen::Index>(pairs.size());

  // Resolve planted factors against the evaluation scheme.
  auto eval_descriptors = eval_scheme.base_descriptors();
  std::map<std::string, int> eval_index;
  for (int i = 0; i < static_cast<int>(eval_descriptors.size()); ++i) {
    eval_index.emplace(eval_descriptors[i].label(), i);
  }
  std::vector<std::vector<int>> term_factors;
  for (const auto& term : model.terms) {
    std::vector<int> idx;
    for (const auto& f : term.factors) {
      auto it = eval_index.find(f);
      if (it == eval_index.end()) {
        throw PreconditionError(
            "planted model factor not expressible over the scheme: '" + f +
            "'");
      }
      idx.push_back(it->second);
    }
    term_factors.push_back(std::move(idx));
  }

  // Descriptor rows; labels dropped for any pair leave the whole schema.
  auto x_labels = x_scheme.labels();
  const auto d_full = static_cast<Eigen::Index>(x_labels.size());
  Eigen::MatrixXd x_full(n, d_full);
  std::set<std::string> dropped;
  auto x_descriptors = x_scheme.base_descriptors();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d_full; ++c) {
      double v = evaluate_descriptor(x_descriptors[c], t, pairs[r]);
      if (!std::isfinite(v)) {
        dropped.insert(x_labels[c]);
        v = 0.0;  // column will be removed below
      }
      x_full(r, c) = v;
    }
  }

  DataSet ds;
  ds.pairs = std::move(pairs);
  if (dropped.empty()) {
    ds.labels = std::move(x_labels);
    ds.X = std::move(x_full);
  } else {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < d_full; ++c) {
      if (dropped.count(x_labels[c]) == 0) {
        keep.push_back(c);
      }
    }
    ds.X.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(keep.size()); ++k) {
      ds.X.col(k) = x_full.col(keep[k]);
      ds.labels.push_back(x_labels[keep[k]]);
    }
    ds.dropped_labels.assign(dropped.begin(), dropped.end());
  }

  // Noiseless targets from the planted terms.
  ds.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double y = 0.0;
    for (std::size_t ti = 0; ti < model.terms.size(); ++ti) {
      double prod = model.terms[ti].coefficient;
      for (int fi : term_factors[ti]) {
        prod *= evaluate_descriptor(eval_descriptors[fi], t, ds.pairs[r]);
      }
      if (!std::isfinite(prod)) {
        throw PreconditionError(
            "planted model evaluates to a non-finite target at pair " +
            ds.pairs[r].name());
      }
      y += prod;
    }
    ds.y(r) = y;
  }

  double sigma = model.noise_sigma;
  if (model.noise_relative) {
    double range = ds.y.maxCoeff() - ds.y.minCoeff();
    sigma = *model.noise_relative * range;
  }
  if (sigma < 0) throw PreconditionError("noise sigma must be >= 0");
  ds.noise_sigma_used = sigma;
  if (sigma > 0) {
    Rng rng(model.seed);
    for (Eigen::Index r = 0; r < n; ++r) {
      ds.y(r) += sigma * rng.normal();
    }
  }
  return ds;
}

DataSet generate_synthetic(const ElementalTable& t,
                           const DescriptorScheme& scheme,
                           const PlantedModel& model, Configuration config,
                           const std::vector<double>& ratios) {
  return generate_synthetic(t, scheme, scheme, model, config, ratios);
}

SplitPlan split(int n, double train_fraction, std::uint64_t seed) {
  if (n < 2) {
    throw PreconditionError("split needs at least 2 points, got " +
                            std::to_string(n));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw PreconditionError("train fraction must lie in (0, 1)");
  }
  auto n_train = static_cast<int>(std::llround(train_fraction * n));
  n_train = std::clamp(n_train, 1, n - 1);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  SplitPlan plan;
  plan.train.assign(idx.begin(), idx.begin() + n_train);
  plan.test.assign(idx.begin() + n_train, idx.end());
  return plan;
}

std::vector<SplitPlan> cv_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw PreconditionError("cross validation needs k >= 2");
  if (k > n) {
    throw PreconditionError("cross validation needs k <= n, got k = " +
                            std::to_string(k) + ", n = " + std::to_string(n));
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  std::vector<SplitPlan> folds(k);
  // Balanced contiguous blocks of the shuffled order: first (n mod k) folds
  // get one extra point.
  int base = n / k;
  int extra = n % k;
  int start = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    folds[f].test.assign(idx.begin() + start, idx.begin() + start + size);
    folds[f].train.reserve(n - size);
    folds[f].train.insert(folds[f].train.end(), idx.begin(),
                          idx.begin() + start);
    folds[f].train.insert(folds[f].train.end(), idx.begin() + start + size,
                          idx.end());
    start += size;
  }
  return folds;
}

void write_dataset_csv(const DataSet& ds, const std::string& path) {
  std::ostringstream out;
  for (const auto& label : ds.labels) out << label << ',';
  out << "y,pair,phase,m\n";
  for (Eigen::Index r = 0; r < ds.n(); ++r) {
    for (Eigen::Index c = 0; c < ds.d(); ++c) {
      out << csv::format_double(ds.X(r, c)) << ',';
    }
    out << csv::format_double(ds.y(r)) << ',' << ds.pairs[r].name() << ','
        << phase_name(ds.pairs[r].phase) << ','
        << csv::format_double(ds.pairs[r].m) << "\n";
  }
  csv::write_text(path, out.str());
}

DataSet read_dataset_csv(const std::string& path) {
  auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty dataset file");
  auto header = csv::split(lines[0]);
  // Descriptor labels are everything before the fixed tail columns.
  auto y_pos = std::find(header.begin(), header.end(), "y");
  if (y_pos == header.end() || header.end() - y_pos != 4) {
    throw SchemaError(path + ": dataset header must end with y,pair,phase,m");
  }
  DataSet ds;
  ds.labels.assign(header.begin(), y_pos);
  const auto d = static_cast<Eigen::Index>(ds.labels.size());

  std::vector<std::vector<double>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    auto ctx = path + " row " + std::to_string(r);
    auto fields = csv::split(lines[r]);
    if (fields.size() != header.size()) {
      throw ParseError(ctx + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> vals(d + 1);
    for (Eigen::Index c = 0; c < d; ++c) {
      vals[c] = csv::parse_double(fields[c], ctx);
    }
    vals[d] = csv::parse_double(fields[d], ctx + " (y)");

    auto dash = fields[d + 1].find('-');
    if (dash == std::string::npos) {
      throw ParseError(ctx + ": bad pair field '" + fields[d + 1] + "'");
    }
    auto ea = element_from_name(fields[d + 1].substr(0, dash));
    auto eb = element_from_name(fields[d + 1].substr(dash + 1));
    auto ph = phase_from_name(fields[d + 2]);
    if (!ea || !eb || !ph) {
      throw ParseError(ctx + ": bad pair or phase");
    }
    double m = csv::parse_double(fields[d + 3], ctx + " (m)");
    ds.pairs.push_back(MixPair::make(*ea, *eb, m, *ph));
    rows.push_back(std::move(vals));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) ds.X(r, c) = rows[r][c];
    ds.y(r) = rows[r][d];
  }
  return ds;
}

}  // namespace lnmix
