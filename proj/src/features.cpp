#include "lnmix/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <thread>

#include "lnmix/errors.hpp"

namespace lnmix {

namespace {

// All multisets of {0..d-1} of size 1..max_degree as non-decreasing index
// tuples, graded lexicographic: by size, then lex within a size.
std::vector<std::vector<int>> enumerate_multisets(int d, int max_degree,
                                                  std::vector<long>& tiers) {
  std::vector<std::vector<int>> out;
  tiers.assign(static_cast<size_t>(max_degree), 0);
  for (int k = 1; k <= max_degree; ++k) {
    std::vector<int> idx(static_cast<size_t>(k), 0);
    while (true) {
      out.push_back(idx);
      ++tiers[static_cast<size_t>(k - 1)];
      int pos = k - 1;
      while (pos >= 0 && idx[static_cast<size_t>(pos)] == d - 1) --pos;
      if (pos < 0) break;
      int v = idx[static_cast<size_t>(pos)] + 1;
      for (int q = pos; q < k; ++q) idx[static_cast<size_t>(q)] = v;
    }
  }
  return out;
}

std::string render_label(const std::vector<int>& factors,
                         const std::vector<std::string>& base_labels) {
  std::string s;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) s += '*';
    s += base_labels[static_cast<size_t>(factors[i])];
  }
  return s;
}

Eigen::VectorXd product_column(const Eigen::MatrixXd& base,
                               const std::vector<int>& factors) {
  Eigen::VectorXd col = base.col(factors[0]);
  for (size_t f = 1; f < factors.size(); ++f) {
    col = col.cwiseProduct(base.col(factors[f]));
  }
  return col;
}

constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(uint64_t& h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

FeatureMatrix expand(const Eigen::MatrixXd& base,
                     const std::vector<std::string>& base_labels,
                     int max_degree, int threads) {
  const auto n = base.rows();
  const auto d = base.cols();
  if (d < 1) throw PreconditionError("expand needs at least one base column");
  if (n < 2) throw PreconditionError("expand needs at least two rows");
  if (max_degree < 1 || max_degree > 3) {
    throw PreconditionError("expand degree must be 1, 2, or 3");
  }
  if (static_cast<Eigen::Index>(base_labels.size()) != d) {
    throw PreconditionError("base label count does not match base columns");
  }
  if (std::set<std::string>(base_labels.begin(), base_labels.end()).size() !=
      base_labels.size()) {
    throw PreconditionError("base labels must be unique");
  }
  if (threads < 1) throw PreconditionError("threads must be >= 1");

  FeatureMatrix fm;
  fm.base_labels = base_labels;
  fm.max_degree = max_degree;
  auto multisets =
      enumerate_multisets(static_cast<int>(d), max_degree, fm.tier_counts);
  const auto total = static_cast<Eigen::Index>(multisets.size());

  Eigen::MatrixXd all(n, total);
  auto fill_range = [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index c = lo; c < hi; ++c) {
      all.col(c) = product_column(base, multisets[static_cast<size_t>(c)]);
    }
  };
  if (threads == 1 || total < 64) {
    fill_range(0, total);
  } else {
    const auto nt = std::min<Eigen::Index>(threads, total);
    std::vector<std::thread> pool;
    for (Eigen::Index t = 0; t < nt; ++t) {
      Eigen::Index lo = total * t / nt;
      Eigen::Index hi = total * (t + 1) / nt;
      pool.emplace_back(fill_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Prune in enumeration order, compacting kept columns to the front.
  fm.values.resize(n, total);
  std::vector<double> means, stds;
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < total; ++c) {
    const auto& col = all.col(c);
    std::string label = render_label(multisets[static_cast<size_t>(c)],
                                     base_labels);
    if (!col.allFinite()) {
      fm.removed.push_back({std::move(label), "non-finite"});
      continue;
    }
    const double mean = col.mean();
    const double var =
        (col.array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(std::max(var, 0.0));
    const double rms = std::sqrt(col.squaredNorm() / static_cast<double>(n));
    if (sd <= 1e-10 * rms) {
      fm.removed.push_back({std::move(label), "zero-variance"});
      continue;
    }
    fm.values.col(kept) = col;
    fm.columns.push_back({multisets[static_cast<size_t>(c)], std::move(label)});
    means.push_back(mean);
    stds.push_back(sd);
    ++kept;
  }
  fm.values.conservativeResize(n, kept);
  fm.col_mean = Eigen::Map<Eigen::VectorXd>(means.data(), kept);
  fm.col_std = Eigen::Map<Eigen::VectorXd>(stds.data(), kept);
  return fm;
}

ColumnTransform standardize(FeatureMatrix& fm) {
  for (Eigen::Index j = 0; j < fm.m(); ++j) {
    if (!(fm.col_std[j] > 0)) {
      throw PreconditionError("standardize hit a zero-variance column: " +
                              fm.columns[static_cast<size_t>(j)].label);
    }
  }
  ColumnTransform t;
  t.mean = fm.col_mean;
  t.scale = fm.col_std;
  fm.values = (fm.values.rowwise() - t.mean.transpose()).array().rowwise() /
              t.scale.transpose().array();
  fm.col_mean.setZero();
  fm.col_std.setOnes();
  return t;
}

RawCoefficients unstandardize_coeffs(const Eigen::VectorXd& gamma_std,
                                     double intercept_std,
                                     const ColumnTransform& transform) {
  if (gamma_std.size() != transform.scale.size()) {
    throw PreconditionError("coefficient/transform length mismatch");
  }
  RawCoefficients raw;
  raw.gamma = gamma_std.cwiseQuotient(transform.scale);
  raw.intercept = intercept_std - raw.gamma.dot(transform.mean);
  return raw;
}

Eigen::MatrixXd materialize_columns(const Eigen::MatrixXd& base,
                                    const std::vector<FeatureColumn>& columns,
                                    const std::vector<int>& indices) {
  Eigen::MatrixXd out(base.rows(), indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    const auto idx = indices[i];
    if (idx < 0 || idx >= static_cast<int>(columns.size())) {
      throw PreconditionError("feature index out of range: " +
                              std::to_string(idx));
    }
    for (int f : columns[static_cast<size_t>(idx)].factors) {
      if (f < 0 || f >= base.cols()) {
        throw PreconditionError("base index out of range in feature " +
                                columns[static_cast<size_t>(idx)].label);
      }
    }
    out.col(static_cast<Eigen::Index>(i)) =
        product_column(base, columns[static_cast<size_t>(idx)].factors);
  }
  return out;
}

uint64_t feature_cache_key(const Eigen::MatrixXd& base,
                           const std::vector<std::string>& base_labels,
                           int max_degree) {
  uint64_t h = kFnvOffset;
  const uint64_t n = static_cast<uint64_t>(base.rows());
  const uint64_t d = static_cast<uint64_t>(base.cols());
  const uint64_t deg = static_cast<uint64_t>(max_degree);
  fnv_bytes(h, &n, sizeof n);
  fnv_bytes(h, &d, sizeof d);
  fnv_bytes(h, &deg, sizeof deg);
  for (const auto& l : base_labels) {
    fnv_bytes(h, l.data(), l.size());
    fnv_bytes(h, "\0", 1);
  }
  fnv_bytes(h, base.data(),
            sizeof(double) * static_cast<size_t>(base.size()));
  return h;
}

namespace {

void put_u64(std::ofstream& f, uint64_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_str(std::ofstream& f, const std::string& s) {
  put_u64(f, s.size());
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

bool get_u64(std::ifstream& f, uint64_t& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  return f.good();
}

bool get_str(std::ifstream& f, std::string& s, uint64_t limit = 1 << 20) {
  uint64_t len = 0;
  if (!get_u64(f, len) || len > limit) return false;
  s.resize(len);
  f.read(s.data(), static_cast<std::streamsize>(len));
  return f.good() || (len == 0 && !f.bad());
}

}  // namespace

void save_cache(const std::string& path, const FeatureMatrix& fm,
                uint64_t key) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError("cannot open cache file for writing: " + path);
  f.write("LNFM", 4);
  uint32_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), sizeof version);
  put_u64(f, key);
  put_u64(f, static_cast<uint64_t>(fm.n()));
  put_u64(f, static_cast<uint64_t>(fm.m()));
  uint32_t deg = static_cast<uint32_t>(fm.max_degree);
  f.write(reinterpret_cast<const char*>(&deg), sizeof deg);
  put_u64(f, fm.base_labels.size());
  for (const auto& l : fm.base_labels) put_str(f, l);
  for (const auto& col : fm.columns) {
    put_u64(f, col.factors.size());
    for (int x : col.factors) {
      int64_t v = x;
      f.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    put_str(f, col.label);
  }
  put_u64(f, fm.removed.size());
  for (const auto& r : fm.removed) {
    put_str(f, r.label);
    put_str(f, r.reason);
  }
  put_u64(f, fm.tier_counts.size());
  for (long t : fm.tier_counts) put_u64(f, static_cast<uint64_t>(t));
  f.write(reinterpret_cast<const char*>(fm.col_mean.data()),
          static_cast<std::streamsize>(sizeof(double) * fm.m()));
  f.write(reinterpret_cast<const char*>(fm.col_std.data()),
          static_cast<std::streamsize>(sizeof(double) * fm.m()));
  f.write(reinterpret_cast<const char*>(fm.values.data()),
          static_cast<std::streamsize>(sizeof(double) * fm.values.size()));
  if (!f) throw ParseError("short write to cache file: " + path);
}

std::optional<FeatureMatrix> load_cache(const std::string& path,
                                        uint64_t key) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "LNFM", 4) != 0) return std::nullopt;
  uint32_t version = 0;
  f.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!f || version != 1) return std::nullopt;
  uint64_t file_key = 0, n = 0, m = 0;
  if (!get_u64(f, file_key) || file_key != key) return std::nullopt;
  if (!get_u64(f, n) || !get_u64(f, m)) return std::nullopt;
  if (n < 1 || m < 1 || n > (1u << 24) || m > (1u << 24)) return std::nullopt;
  uint32_t deg = 0;
  f.read(reinterpret_cast<char*>(&deg), sizeof deg);
  if (!f || deg < 1 || deg > 3) return std::nullopt;

  FeatureMatrix fm;
  fm.max_degree = static_cast<int>(deg);
  uint64_t count = 0;
  if (!get_u64(f, count) || count > (1u << 20)) return std::nullopt;
  fm.base_labels.resize(count);
  for (auto& l : fm.base_labels) {
    if (!get_str(f, l)) return std::nullopt;
  }
  fm.columns.resize(m);
  for (auto& col : fm.columns) {
    uint64_t nf = 0;
    if (!get_u64(f, nf) || nf < 1 || nf > deg) return std::nullopt;
    col.factors.resize(nf);
    for (auto& x : col.factors) {
      int64_t v = 0;
      f.read(reinterpret_cast<char*>(&v), sizeof v);
      if (!f) return std::nullopt;
      x = static_cast<int>(v);
    }
    if (!get_str(f, col.label)) return std::nullopt;
  }
  if (!get_u64(f, count) || count > (1u << 26)) return std::nullopt;
  fm.removed.resize(count);
  for (auto& r : fm.removed) {
    if (!get_str(f, r.label) || !get_str(f, r.reason)) return std::nullopt;
  }
  if (!get_u64(f, count) || count != deg) return std::nullopt;
  fm.tier_counts.resize(count);
  for (auto& t : fm.tier_counts) {
    uint64_t v = 0;
    if (!get_u64(f, v)) return std::nullopt;
    t = static_cast<long>(v);
  }
  fm.col_mean.resize(static_cast<Eigen::Index>(m));
  fm.col_std.resize(static_cast<Eigen::Index>(m));
  f.read(reinterpret_cast<char*>(fm.col_mean.data()),
         static_cast<std::streamsize>(sizeof(double) * m));
  f.read(reinterpret_cast<char*>(fm.col_std.data()),
         static_cast<std::streamsize>(sizeof(double) * m));
  if (!f) return std::nullopt;
  fm.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  f.read(reinterpret_cast<char*>(fm.values.data()),
         static_cast<std::streamsize>(sizeof(double) * n * m));
  if (!f) return std::nullopt;
  return fm;
}

}  // namespace lnmix
