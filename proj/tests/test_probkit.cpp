#include <doctest.h>

#include <cmath>
#include <numeric>

#include "parasim/errors.hpp"
#include "parasim/probkit.hpp"
#include "parasim/rng.hpp"

using namespace parasim;

namespace {

std::vector<double> random_simplex(Rng& rng, std::size_t k, double zero_share = 0.2) {
  std::vector<double> p(k);
  double z = 0;
  for (auto& v : p) z += (v = rng.bernoulli(zero_share) ? 0.0 : rng.uniform01());
  if (z == 0) {
    p[0] = 1;
    z = 1;
  }
  for (auto& v : p) v /= z;
  return p;
}

Dist2 random_dist2(Rng& rng) {
  const std::size_t r = 1 + rng.uniform_index(5), c = 1 + rng.uniform_index(5);
  return Dist2(r, c, random_simplex(rng, r * c));
}

Dist3 random_dist3(Rng& rng) {
  const std::array<std::size_t, 3> shape = {1 + rng.uniform_index(4), 1 + rng.uniform_index(4),
                                            1 + rng.uniform_index(4)};
  return Dist3(shape, random_simplex(rng, shape[0] * shape[1] * shape[2]));
}

}  // namespace

TEST_CASE("entropy of simple distributions") {
  CHECK(entropy(Dist1::uniform(16)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(entropy(Dist1::point_mass(5, 2)) == 0.0);
  CHECK(entropy(Dist1({0.25, 0.75})) == doctest::Approx(0.811278124459).epsilon(1e-12));
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(Dist1({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(Dist1({-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(Dist1({std::nan(""), 1.0}), ValidationError);
  CHECK_THROWS_AS(Dist2(2, 2, {0.25, 0.25, 0.25}), UsageError);
}

TEST_CASE("small drift is renormalized") {
  const Dist1 d({0.5, 0.5 + 5e-10});
  CHECK(d[0] + d[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mutual information examples") {
  std::vector<double> diag(256, 0.0);
  for (std::size_t i = 0; i < 16; ++i) diag[i * 16 + i] = 1.0 / 16;
  CHECK(mutual_information(Dist2(16, 16, diag)) == doctest::Approx(4.0).epsilon(1e-12));

  const std::vector<double> a = {0.2, 0.3, 0.5}, b = {0.6, 0.4};
  std::vector<double> prod;
  for (double x : a) {
    for (double y : b) prod.push_back(x * y);
  }
  CHECK(std::abs(mutual_information(Dist2(3, 2, prod))) < 1e-12);
  CHECK(mutual_information(Dist2(2, 2, {0.25, 0.25, 0.25, 0.25})) == 0.0);
}

TEST_CASE("conditional mutual information") {
  // C uniform bit, A uniform bit, B = A: I(A;B|C) = 1.
  std::vector<double> copy(8, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t a = 0; a < 2; ++a) copy[(a * 2 + a) * 2 + c] = 0.25;
  }
  const Dist3 j({2, 2, 2}, copy);
  CHECK(conditional_mutual_information(j, Axis::First, Axis::Second, Axis::Third) == doctest::Approx(1.0));

  // A and B independent given C.
  std::vector<double> indep(8, 0.125);
  CHECK(std::abs(conditional_mutual_information(Dist3({2, 2, 2}, indep), Axis::First, Axis::Second, Axis::Third)) <
        1e-12);

  CHECK_THROWS_AS(conditional_mutual_information(j, Axis::First, Axis::First, Axis::Third), UsageError);
}

TEST_CASE("kl divergence") {
  const Dist1 u = Dist1::uniform(8);
  CHECK(kl_divergence(u, u) == 0.0);
  CHECK(kl_divergence(Dist1::point_mass(8, 3), u) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(kl_divergence(Dist2(2, 2, {1, 0, 0, 0}), Dist2(2, 2, {0.25, 0.25, 0.25, 0.25})) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(kl_divergence(Dist1::uniform(2), Dist1::point_mass(2, 0)), AbsoluteContinuityError);
  CHECK_THROWS_AS(kl_divergence(Dist1::uniform(2), Dist1::uniform(3)), UsageError);
}

TEST_CASE("jensen-shannon divergence") {
  const Dist1 a({1.0, 0.0}), b({0.5, 0.5});
  CHECK(js_divergence(a, a) == 0.0);
  CHECK(js_divergence(Dist1::point_mass(2, 0), Dist1::point_mass(2, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(js_divergence(a, b) == doctest::Approx(0.311278124459).epsilon(1e-11));
  CHECK_THROWS_AS(js_divergence(a, Dist1::uniform(3)), UsageError);
}

TEST_CASE("marginals stay normalized and transpose is exact") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Dist3 j = random_dist3(rng);
    for (auto ax : {Axis::First, Axis::Second, Axis::Third}) {
      const Dist1 m = marginal(j, ax);
      CHECK(std::accumulate(m.values().begin(), m.values().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      const Dist2 p = marginal_pair(j, ax);
      CHECK(std::accumulate(p.values().begin(), p.values().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    const Dist2 d = random_dist2(rng);
    const Dist2 back = transpose(transpose(d));
    REQUIRE(back.rows() == d.rows());
    for (std::size_t i = 0; i < d.values().size(); ++i) CHECK(std::abs(back.values()[i] - d.values()[i]) <= 1e-15);
  }
}

TEST_CASE("mutual information properties on random joints") {
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const Dist2 d = random_dist2(rng);
    const double i = mutual_information(d);
    CHECK(i >= 0.0);
    CHECK(i == doctest::Approx(mutual_information(transpose(d))).epsilon(1e-12));
    const double bound = std::min(entropy(marginal(d, Axis::First)), entropy(marginal(d, Axis::Second)));
    CHECK(i <= bound + 1e-12);
  }
}

TEST_CASE("chain rule I(A;B,C) = I(A;B) + I(A;C|B)") {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const Dist3 j = random_dist3(rng);
    const double lhs = mutual_information_with_rest(j, Axis::First);
    const double rhs = mutual_information(j, Axis::First, Axis::Second) +
                       conditional_mutual_information(j, Axis::First, Axis::Third, Axis::Second);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("kl and jsd properties on random distributions") {
  Rng rng(14);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + rng.uniform_index(6);
    const Dist1 a(random_simplex(rng, k)), b(random_simplex(rng, k, 0.0)), c(random_simplex(rng, k));
    CHECK(kl_divergence(a, b) >= 0.0);
    CHECK(kl_divergence(b, b) == 0.0);
    if (a != b) CHECK(kl_divergence(a, b) > 0.0);
    const double ab = js_divergence(a, b);
    CHECK(ab == doctest::Approx(js_divergence(b, a)).epsilon(1e-12));
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(std::sqrt(js_divergence(a, c)) <= std::sqrt(ab) + std::sqrt(js_divergence(b, c)) + 1e-9);
  }
}
