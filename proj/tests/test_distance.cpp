#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "deepdist/distance.hpp"
#include "deepdist/errors.hpp"
#include "deepdist/phylogeny.hpp"

using namespace deepdist;

TEST_CASE("correlation matrix by counting") {
  const std::vector<State> a{0, 0, 1}, b{0, 1, 1};
  const auto f = correlation_matrix(a, b, 2);
  CHECK(f.count(0, 0) == 1);
  CHECK(f.count(0, 1) == 1);
  CHECK(f.count(1, 0) == 0);
  CHECK(f.count(1, 1) == 1);
  CHECK(f(0, 1) == doctest::Approx(1.0 / 3));

  const std::vector<State> s{0, 2, 1, 2, 2, 0};
  const auto same = correlation_matrix(s, s, 3);
  CHECK(same(0, 0) == doctest::Approx(2.0 / 6));
  CHECK(same(2, 2) == doctest::Approx(3.0 / 6));
  CHECK(same.frequencies().sum() == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(same.count(i, j) == 0);

  CHECK_THROWS_AS(correlation_matrix(a, s, 2), InputError);
  CHECK_THROWS_AS(correlation_matrix(std::vector<State>{}, std::vector<State>{}, 2), InputError);
  CHECK_THROWS_AS(correlation_matrix(s, s, 2), InputError);
}

TEST_CASE("estimates on exact two-point tables") {
  const auto cfn = cfn_model();
  const Eigen::MatrixXd f = exact_correlation(cfn, std::log(2.0));
  CHECK(f(0, 0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(f(0, 1) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(tau_hat(f, cfn.nu()) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(tau_hat(exact_correlation(cfn, 0.0), cfn.nu()) == 0.0);

  // The same table as counts over 8 sites.
  const CorrelationMatrix c(2, 8, {3, 1, 1, 3});
  CHECK(tau_hat(c, cfn.nu()) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(cfn_distance(c) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(logdet_distance(c) == doctest::Approx(3 * std::log(2.0)).epsilon(1e-14));
  CHECK(scaled_logdet_distance(c, cfn) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const auto both = baseline_metrics(c);
  CHECK(both.cfn == cfn_distance(c));
  CHECK(both.logdet == logdet_distance(c));

  CHECK(cfn_distance(CorrelationMatrix(2, 4, {1, 1, 1, 1})) == infinity);
  CHECK(logdet_distance(CorrelationMatrix(2, 4, {1, 1, 1, 1})) == infinity);
  // nu'F nu = -0.01
  CHECK(tau_hat(CorrelationMatrix(2, 200, {50, 50, 51, 49}), cfn.nu()) == infinity);
  CHECK_THROWS_AS(cfn_distance(CorrelationMatrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})),
                  UnsupportedError);
}

TEST_CASE("exact tables recover the distance under other models") {
  for (const auto& m : {binary_asymmetric_model(0.8, 0.2), jukes_cantor_like_model(4),
                        preset_model("jukes_cantor", {3})}) {
    for (double t : {0.05, 0.5, 1.7}) {
      const Eigen::MatrixXd f = exact_correlation(m, t);
      CHECK(tau_hat(f, m.nu()) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("random CFN count tables: tau_hat equals the CFN formula") {
  std::mt19937_64 rng(21);
  const auto nu = cfn_model().nu();
  for (int rep = 0; rep < 200; ++rep) {
    std::uniform_int_distribution<long long> u(0, 5000);
    std::vector<long long> c{u(rng), u(rng) / 5, u(rng) / 5, u(rng)};
    const long long k = c[0] + c[1] + c[2] + c[3];
    const CorrelationMatrix f(2, k, c);
    const double a = tau_hat(f, nu), b = cfn_distance(f);
    if (std::isinf(b)) {
      CHECK(std::isinf(a));
    } else {
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }
}

TEST_CASE("all-pairs distances") {
  const auto t = Phylogeny::homogeneous(3, 0.25);
  const auto model = cfn_model();
  const auto a = sample_alignment(t, model, 2000, 31);
  const auto d = all_pairs_distances(a, model.nu());
  for (int i = 0; i < 8; ++i) {
    CHECK(d(i, i) == 0.0);
    for (int j = 0; j < 8; ++j) {
      CHECK(d(i, j) == tau_hat(correlation_matrix(a.leaf(i), a.leaf(j), 2), model.nu()));
      CHECK(d(i, j) == doctest::Approx(tau_hat_from_sites(a.leaf(i), a.leaf(j), model.nu())));
    }
  }
  CHECK(all_pairs_distances(a, model, Estimator::cfn) == d);
  CHECK(all_pairs_distances(a, model, Estimator::eigenvector) == d);

  // Relabelling the leaves permutes the matrix.
  std::vector<int> perm{3, 1, 7, 0, 2, 6, 4, 5};
  Alignment b(8, a.site_count(), 2);
  for (int l = 0; l < 8; ++l)
    for (int s = 0; s < a.site_count(); ++s) b.set(perm[l], s, a.at(l, s));
  CHECK(all_pairs_distances(b, model.nu()) == d.permuted(perm));

  const Phylogeny two({-1, 0, 0}, {0.0, 0.3, 0.2}, {-1, 0, 1});
  const auto a2 = sample_alignment(two, model, 100, 1);
  const auto d2 = all_pairs_distances(a2, model.nu());
  CHECK(d2.size() == 2);
  CHECK(d2(0, 1) == tau_hat(correlation_matrix(a2.leaf(0), a2.leaf(1), 2), model.nu()));

  CHECK(parse_estimator("logdet") == Estimator::logdet);
  CHECK(estimator_name(Estimator::eigenvector) == "eigenvector");
  CHECK_THROWS_AS(parse_estimator("ml"), ConfigError);
}

TEST_CASE("small-diameter concentration at k = 1e5") {
  // Homogeneous h = 3, edges 0.25: all leaf distances at most 1.5.
  const auto t = Phylogeny::homogeneous(3, 0.25);
  const auto truth = t.metric();
  const auto model = cfn_model();
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = all_pairs_distances(sample_alignment(t, model, 100000, seed), model.nu());
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) worst = std::max(worst, std::abs(d(i, j) - truth(i, j)));
    good += worst < 0.05;
  }
  CHECK(good >= 19);
}

TEST_CASE("distance CSV") {
  DistanceMatrix d(3);
  d.set(0, 1, 0.1);
  d.set(0, 2, infinity);
  d.set(1, 2, 1.0 / 3);
  std::stringstream ss;
  write_distance_csv(ss, d);
  CHECK(read_distance_csv(ss) == d);
  std::istringstream asym("#deepdist-distances v1\nlabel,0,1\n0,0,1\n1,2,0\n");
  CHECK_THROWS_AS(read_distance_csv(asym), FormatError);
  std::istringstream neg("#deepdist-distances v1\nlabel,0,1\n0,0,-1\n1,-1,0\n");
  CHECK_THROWS_AS(read_distance_csv(neg), FormatError);
  std::istringstream no_header("label,0,1\n0,0,1\n1,1,0\n");
  CHECK_THROWS_AS(read_distance_csv(no_header), FormatError);
}
