#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "lnmix/dataset.hpp"
#include "lnmix/descriptors.hpp"
#include "lnmix/elemental_table.hpp"
#include "lnmix/errors.hpp"
#include "lnmix/features.hpp"
#include "lnmix/rng.hpp"

using namespace lnmix;

namespace {

std::string table_path() {
  return std::string(LNMIX_SOURCE_DIR) + "/data/lanthanides.csv";
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
  return X;
}

std::vector<std::string> letters(int d) {
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i) out.push_back(std::string(1, char('a' + i)));
  return out;
}

long binom(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Same factor order as the expansion uses, so products compare bitwise.
Eigen::VectorXd reference_product(const Eigen::MatrixXd& base,
                                  const std::vector<int>& factors) {
  Eigen::VectorXd col = base.col(factors[0]);
  for (size_t f = 1; f < factors.size(); ++f) {
    col = col.cwiseProduct(base.col(factors[f]));
  }
  return col;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("three base columns expand to 19 graded-lex products at degree 3") {
  Eigen::MatrixXd base = random_matrix(6, 3, 7);
  auto fm = expand(base, letters(3), 3);

  REQUIRE(fm.tier_counts.size() == 3);
  CHECK(fm.tier_counts[0] == 3);
  CHECK(fm.tier_counts[1] == 6);
  CHECK(fm.tier_counts[2] == 10);
  REQUIRE(fm.m() == 19);  // nothing degenerate in generic data
  CHECK(fm.removed.empty());
  CHECK(fm.n() == 6);
  CHECK(fm.max_degree == 3);
  CHECK(fm.base_labels == letters(3));

  const std::vector<std::string> expected = {
      "a",     "b",     "c",     "a*a",   "a*b",   "a*c",   "b*b",
      "b*c",   "c*c",   "a*a*a", "a*a*b", "a*a*c", "a*b*b", "a*b*c",
      "a*c*c", "b*b*b", "b*b*c", "b*c*c", "c*c*c"};
  REQUIRE(fm.columns.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(fm.columns[i].label == expected[i]);
    CHECK(std::is_sorted(fm.columns[i].factors.begin(),
                         fm.columns[i].factors.end()));
    CHECK(fm.columns[i].factors.size() <= 3);
  }

  SUBCASE("each column is the element-wise product of its factors") {
    for (Eigen::Index j = 0; j < fm.m(); ++j) {
      Eigen::VectorXd ref =
          reference_product(base, fm.columns[static_cast<size_t>(j)].factors);
      CHECK((fm.values.col(j) - ref).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }

  SUBCASE("multisets are unique") {
    std::set<std::vector<int>> seen;
    for (const auto& c : fm.columns) seen.insert(c.factors);
    CHECK(seen.size() == fm.columns.size());
  }
}

TEST_CASE("tier sizes follow the multiset count for widths up to 30") {
  for (int d = 1; d <= 30; ++d) {
    CAPTURE(d);
    auto fm = expand(random_matrix(2, d, 100 + d), letters(d), 3);
    REQUIRE(fm.tier_counts.size() == 3);
    for (int k = 1; k <= 3; ++k) {
      CHECK(fm.tier_counts[k - 1] == binom(d + k - 1, k));
    }
  }

  SUBCASE("27 base descriptors give a 378-wide quadratic tier") {
    auto fm = expand(random_matrix(4, 27, 200), letters(27), 2);
    REQUIRE(fm.tier_counts.size() == 2);
    CHECK(fm.tier_counts[0] == 27);
    CHECK(fm.tier_counts[1] == 378);
  }
}

TEST_CASE("constant columns and their powers are pruned as zero-variance") {
  Eigen::MatrixXd base(4, 2);
  base.col(0) << 1.0, 2.0, 3.0, 4.0;
  base.col(1).setConstant(2.5);
  auto fm = expand(base, {"a", "k"}, 2);

  REQUIRE(fm.removed.size() == 2);
  CHECK(fm.removed[0].label == "k");
  CHECK(fm.removed[0].reason == "zero-variance");
  CHECK(fm.removed[1].label == "k*k");
  CHECK(fm.removed[1].reason == "zero-variance");

  REQUIRE(fm.m() == 3);
  CHECK(fm.columns[0].label == "a");
  CHECK(fm.columns[1].label == "a*a");
  CHECK(fm.columns[2].label == "a*k");  // constant times varying stays
  CHECK(fm.tier_counts[0] == 2);        // tiers count before pruning
  CHECK(fm.tier_counts[1] == 3);
}

TEST_CASE("products that overflow are pruned as non-finite") {
  Eigen::MatrixXd base(3, 2);
  base.col(0) << 1.0, 2.0, 3.0;
  base.col(1) << 1e200, 2e200, 3e200;
  auto fm = expand(base, {"a", "h"}, 2);

  // h and a*h hold finite values but their second moments overflow, which
  // trips the variance guard; h*h overflows in the values themselves and is
  // the one logged as non-finite. Either way nothing unusable survives.
  REQUIRE(fm.removed.size() == 3);
  CHECK(fm.removed[0].label == "h");
  CHECK(fm.removed[0].reason == "zero-variance");
  CHECK(fm.removed[1].label == "a*h");
  CHECK(fm.removed[1].reason == "zero-variance");
  CHECK(fm.removed[2].label == "h*h");
  CHECK(fm.removed[2].reason == "non-finite");
  REQUIRE(fm.m() == 2);
  CHECK(fm.columns[0].label == "a");
  CHECK(fm.columns[1].label == "a*a");
  CHECK(fm.values.allFinite());
}

TEST_CASE("expand validates its inputs") {
  Eigen::MatrixXd ok = random_matrix(3, 2, 300);
  CHECK_THROWS_WITH_AS(expand(Eigen::MatrixXd(3, 0), {}, 2),
                       doctest::Contains("at least one base column"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(expand(random_matrix(1, 2, 301), letters(2), 2),
                       doctest::Contains("at least two rows"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(expand(ok, letters(2), 0),
                       doctest::Contains("degree"), PreconditionError);
  CHECK_THROWS_WITH_AS(expand(ok, letters(2), 4),
                       doctest::Contains("degree"), PreconditionError);
  CHECK_THROWS_WITH_AS(expand(ok, letters(3), 2),
                       doctest::Contains("label count"), PreconditionError);
  CHECK_THROWS_WITH_AS(expand(ok, {"a", "a"}, 2),
                       doctest::Contains("unique"), PreconditionError);
  CHECK_THROWS_WITH_AS(expand(ok, letters(2), 2, 0),
                       doctest::Contains("threads"), PreconditionError);
}

TEST_CASE("threaded expansion is bit-identical to the serial one") {
  // 6 columns at degree 3 is 83 products, enough to engage the thread pool.
  Eigen::MatrixXd base = random_matrix(20, 6, 400);
  auto serial = expand(base, letters(6), 3, 1);
  auto parallel = expand(base, letters(6), 3, 4);

  REQUIRE(serial.m() == parallel.m());
  CHECK((serial.values - parallel.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(serial.tier_counts == parallel.tier_counts);
  REQUIRE(serial.columns.size() == parallel.columns.size());
  for (size_t i = 0; i < serial.columns.size(); ++i) {
    CHECK(serial.columns[i].label == parallel.columns[i].label);
    CHECK(serial.columns[i].factors == parallel.columns[i].factors);
  }
  CHECK((serial.col_mean - parallel.col_mean).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((serial.col_std - parallel.col_std).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("standardize centers and scales every kept column") {
  Eigen::MatrixXd base = random_matrix(25, 4, 500);
  base.col(1) *= 37.0;  // mixed scales
  base.col(2).array() += 5.0;
  auto fm = expand(base, letters(4), 2);
  const Eigen::VectorXd mean_before = fm.col_mean;
  const Eigen::VectorXd std_before = fm.col_std;
  const Eigen::MatrixXd raw = fm.values;

  auto t = standardize(fm);
  CHECK((t.mean - mean_before).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((t.scale - std_before).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(fm.col_mean.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((fm.col_std.array() - 1.0).matrix().lpNorm<Eigen::Infinity>() == 0.0);

  const double n = static_cast<double>(fm.n());
  for (Eigen::Index j = 0; j < fm.m(); ++j) {
    CHECK(std::abs(fm.values.col(j).mean()) <= 1e-12);
    const double var = fm.values.col(j).squaredNorm() / n -
                       fm.values.col(j).mean() * fm.values.col(j).mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("standardizing again changes nothing beyond roundoff") {
    FeatureMatrix again = fm;
    auto t2 = standardize(again);
    CHECK((again.values - fm.values).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(t2.mean.lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((t2.scale.array() - 1.0).matrix().lpNorm<Eigen::Infinity>() <=
          1e-12);
  }

  SUBCASE("a constant shift of a base column leaves its standardized column") {
    Eigen::MatrixXd shifted = base;
    shifted.col(0).array() += 11.0;
    auto fm2 = expand(shifted, letters(4), 1);  // degree 1: column 0 is base 0
    standardize(fm2);
    auto fm1 = expand(base, letters(4), 1);
    standardize(fm1);
    CHECK((fm1.values.col(0) - fm2.values.col(0)).lpNorm<Eigen::Infinity>() <=
          1e-12);
  }

  SUBCASE("raw values are recoverable through the transform") {
    Eigen::MatrixXd back =
        (fm.values.array().rowwise() * t.scale.transpose().array())
            .matrix()
            .rowwise() +
        t.mean.transpose();
    CHECK((back - raw).lpNorm<Eigen::Infinity>() <= 1e-10);
  }

  SUBCASE("zero-variance column is rejected") {
    FeatureMatrix broken = fm;
    broken.col_std[0] = 0.0;
    CHECK_THROWS_WITH_AS(standardize(broken),
                         doctest::Contains("zero-variance"),
                         PreconditionError);
  }
}

TEST_CASE("unstandardized coefficients predict identically") {
  Eigen::MatrixXd base = random_matrix(30, 3, 600);
  auto fm = expand(base, letters(3), 2);
  const Eigen::MatrixXd raw = fm.values;
  auto t = standardize(fm);

  Rng rng(601);
  Eigen::VectorXd gamma_std(fm.m());
  for (Eigen::Index j = 0; j < fm.m(); ++j) gamma_std[j] = rng.normal();
  const double intercept_std = 0.7;

  auto rawc = unstandardize_coeffs(gamma_std, intercept_std, t);
  Eigen::VectorXd pred_std =
      fm.values * gamma_std + Eigen::VectorXd::Constant(fm.n(), intercept_std);
  Eigen::VectorXd pred_raw =
      raw * rawc.gamma + Eigen::VectorXd::Constant(fm.n(), rawc.intercept);
  const double scale = pred_std.lpNorm<Eigen::Infinity>();
  CHECK((pred_std - pred_raw).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);

  SUBCASE("identity transform is a no-op") {
    ColumnTransform id;
    id.mean = Eigen::VectorXd::Zero(3);
    id.scale = Eigen::VectorXd::Ones(3);
    Eigen::VectorXd g(3);
    g << 1.5, -2.0, 0.25;
    auto out = unstandardize_coeffs(g, 3.25, id);
    CHECK((out.gamma - g).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(out.intercept == 3.25);
  }

  SUBCASE("single scaled feature divides the coefficient") {
    ColumnTransform tr;
    tr.mean = Eigen::VectorXd::Constant(1, 2.0);
    tr.scale = Eigen::VectorXd::Constant(1, 4.0);
    Eigen::VectorXd g(1);
    g << 8.0;
    auto out = unstandardize_coeffs(g, 1.0, tr);
    CHECK(out.gamma[0] == 2.0);             // 8 / 4
    CHECK(out.intercept == 1.0 - 2.0 * 2.0);  // shift the mean back out
  }

  SUBCASE("length mismatch throws") {
    CHECK_THROWS_WITH_AS(
        unstandardize_coeffs(Eigen::VectorXd::Ones(2), 0.0, t),
        doctest::Contains("mismatch"), PreconditionError);
  }
}

TEST_CASE("materialize rebuilds raw columns bit for bit") {
  Eigen::MatrixXd base = random_matrix(12, 4, 700);
  auto fm = expand(base, letters(4), 3);
  const Eigen::MatrixXd raw = fm.values;
  standardize(fm);  // materialize must not care about later standardization

  std::vector<int> idx = {0, 5, static_cast<int>(fm.m()) - 1};
  Eigen::MatrixXd sub = materialize_columns(base, fm.columns, idx);
  REQUIRE(sub.cols() == 3);
  for (size_t i = 0; i < idx.size(); ++i) {
    CHECK((sub.col(static_cast<Eigen::Index>(i)) - raw.col(idx[i]))
              .lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("bad feature index") {
    CHECK_THROWS_WITH_AS(materialize_columns(base, fm.columns, {-1}),
                         doctest::Contains("out of range"), PreconditionError);
    CHECK_THROWS_WITH_AS(
        materialize_columns(base, fm.columns, {static_cast<int>(fm.m())}),
        doctest::Contains("out of range"), PreconditionError);
  }

  SUBCASE("bad base index inside a column") {
    std::vector<FeatureColumn> cols = {{{99}, "bogus"}};
    CHECK_THROWS_WITH_AS(materialize_columns(base, cols, {0}),
                         doctest::Contains("base index"), PreconditionError);
  }
}

TEST_CASE("reciprocal descriptor pairs vanish from the default expansion") {
  // Build the bundled 58-descriptor base over one phase and a coarse ratio
  // grid; every product of a quantity with its own reciprocal is constant and
  // must be logged as zero-variance.
  auto table = load_table(table_path());
  auto scheme = DescriptorScheme::prior_default();
  auto pairs = enumerate_pairs(Phase::Monazite, {0.25, 0.5, 0.75});
  const auto labels = scheme.labels();
  REQUIRE(labels.size() == 58);

  Eigen::MatrixXd base(static_cast<Eigen::Index>(pairs.size()),
                       static_cast<Eigen::Index>(labels.size()));
  for (size_t i = 0; i < pairs.size(); ++i) {
    auto vec = build_descriptors(table, scheme, pairs[i]);
    REQUIRE(vec.dropped.empty());
    REQUIRE(vec.values.size() == labels.size());
    for (size_t j = 0; j < vec.values.size(); ++j) {
      base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          vec.values[j];
    }
  }

  auto fm = expand(base, labels, 2);
  CHECK(fm.tier_counts[0] == 58);
  CHECK(fm.tier_counts[1] == 58 * 59 / 2);

  // Partner table: label <-> inv(label).
  std::set<std::string> label_set(labels.begin(), labels.end());
  std::set<std::string> expected_removed;
  for (const auto& l : labels) {
    if (label_set.count("inv(" + l + ")")) {
      // Orientation in the product follows base-column order.
      const auto a = std::find(labels.begin(), labels.end(), l);
      const auto b = std::find(labels.begin(), labels.end(), "inv(" + l + ")");
      expected_removed.insert(a < b ? l + "*inv(" + l + ")"
                                    : "inv(" + l + ")*" + l);
    }
  }
  CHECK(!expected_removed.empty());
  CHECK(expected_removed.count("m*inv(m)") == 1);

  std::set<std::string> removed;
  for (const auto& r : fm.removed) {
    CHECK(r.reason == "zero-variance");
    removed.insert(r.label);
  }
  CHECK(removed == expected_removed);
  CHECK(fm.m() == 58 + 58 * 59 / 2 - static_cast<Eigen::Index>(removed.size()));

  // No kept column is one of the constant products.
  for (const auto& c : fm.columns) CHECK(expected_removed.count(c.label) == 0);
}

TEST_CASE("cache round-trips the expansion and rejects imposters") {
  Eigen::MatrixXd base = random_matrix(9, 3, 800);
  auto labels = letters(3);
  auto fm = expand(base, labels, 3);
  const uint64_t key = feature_cache_key(base, labels, 3);
  const std::string path = temp_file("lnmix_feature_cache_test.bin");
  save_cache(path, fm, key);

  auto loaded = load_cache(path, key);
  REQUIRE(loaded.has_value());
  CHECK(loaded->max_degree == 3);
  CHECK(loaded->base_labels == labels);
  CHECK(loaded->tier_counts == fm.tier_counts);
  REQUIRE(loaded->m() == fm.m());
  REQUIRE(loaded->n() == fm.n());
  CHECK((loaded->values - fm.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((loaded->col_mean - fm.col_mean).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((loaded->col_std - fm.col_std).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(loaded->columns.size() == fm.columns.size());
  for (size_t i = 0; i < fm.columns.size(); ++i) {
    CHECK(loaded->columns[i].label == fm.columns[i].label);
    CHECK(loaded->columns[i].factors == fm.columns[i].factors);
  }
  CHECK(loaded->removed.size() == fm.removed.size());

  SUBCASE("wrong key misses") {
    CHECK(!load_cache(path, key + 1).has_value());
  }

  SUBCASE("missing file misses") {
    CHECK(!load_cache(temp_file("lnmix_no_such_cache.bin"), key).has_value());
  }

  SUBCASE("corrupt magic misses") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    CHECK(!load_cache(path, key).has_value());
  }

  SUBCASE("truncated file misses") {
    const auto full = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, full / 2);
    CHECK(!load_cache(path, key).has_value());
  }

  std::filesystem::remove(path);
}

TEST_CASE("cache keys react to every input") {
  Eigen::MatrixXd base = random_matrix(5, 2, 900);
  auto labels = letters(2);
  const uint64_t key = feature_cache_key(base, labels, 2);

  Eigen::MatrixXd other = base;
  other(0, 0) += 1e-9;
  CHECK(feature_cache_key(other, labels, 2) != key);
  CHECK(feature_cache_key(base, {"a", "z"}, 2) != key);
  CHECK(feature_cache_key(base, labels, 3) != key);
  CHECK(feature_cache_key(base, labels, 2) == key);
}

}  // TEST_SUITE
