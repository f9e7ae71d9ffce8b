// Random populations (N <= 6, M <= 4, S <= 4) against the brute-force oracle
// and the information identities every valid population satisfies.

#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "parasim/metrics.hpp"

using namespace parasim;

namespace {

constexpr int kPopulations = 1000;

double receiver_env_info(const Population& pop, std::size_t a) {
  return mutual_information_with_rest(joint_messages_env(pop, RoleCondition{Role::Receiver, AgentId{a}}), Axis::First);
}

}  // namespace

TEST_CASE("measures match the enumeration oracle") {
  Rng rng(101);
  for (int t = 0; t < kPopulations; ++t) {
    const Population pop = oracle::random_population(rng);
    CAPTURE(t);
    CHECK(std::abs(mutual_understanding(pop) - oracle::mutual_understanding(pop)) <= 1e-12);
    CHECK(std::abs(identifiability(pop) - oracle::identifiability(pop)) <= 1e-12);
    CHECK(std::abs(avg_env_info(pop) - oracle::p_weighted_env_info(pop)) <= 1e-12);
    for (std::size_t a = 0; a < pop.size(); ++a) {
      CHECK(std::abs(env_info(pop, {a}) - oracle::env_info(pop, a)) <= 1e-12);
      CHECK(std::abs(sensor_info(pop, {a}) - oracle::sensor_info(pop, a)) <= 1e-12);
    }
    for (const auto& p : pop.parasites()) {
      CHECK(std::abs(blend_kl(pop, p) - oracle::blend_kl(pop, p.index)) <= 1e-12);
      CHECK(std::abs(missing_info(pop, p) - oracle::missing_info(pop, p.index)) <= 1e-12);
    }
  }
}

TEST_CASE("sender and receiver readings of environmental information agree") {
  Rng rng(102);
  for (int t = 0; t < kPopulations; ++t) {
    const Population pop = oracle::random_population(rng);
    for (std::size_t a = 0; a < pop.size(); ++a) {
      CHECK(std::abs(env_info(pop, {a}) - receiver_env_info(pop, a)) <= 1e-9);
      CHECK(std::abs(oracle::env_info_as_receiver(pop, a) - receiver_env_info(pop, a)) <= 1e-12);
    }
  }
}

TEST_CASE("message joints are symmetric") {
  Rng rng(103);
  for (int t = 0; t < kPopulations; ++t) {
    const Dist2 j = joint_messages(oracle::random_population(rng));
    for (std::size_t x = 0; x < j.rows(); ++x) {
      for (std::size_t y = 0; y < x; ++y) CHECK(std::abs(j(x, y) - j(y, x)) <= 1e-12);
    }
  }
}

TEST_CASE("measures are nonnegative, finite and bounded") {
  Rng rng(104);
  for (int t = 0; t < kPopulations; ++t) {
    const Population pop = oracle::random_population(rng);
    const double log_s = std::log2(static_cast<double>(pop.alphabet_size()));
    const double log_m = std::log2(static_cast<double>(pop.num_states()));
    const double mu = mutual_understanding(pop);
    CHECK(mu >= 0.0);
    CHECK(mu <= log_s + 1e-12);
    CHECK(identifiability(pop) >= 0.0);
    CHECK(identifiability(pop) <= std::log2(static_cast<double>(pop.size())) + 1e-12);
    for (std::size_t a = 0; a < pop.size(); ++a) {
      const double e = env_info(pop, {a});
      CHECK(e >= 0.0);
      CHECK(e <= log_m + 1e-12);
      CHECK(sensor_info(pop, {a}) <= e + 1e-12);
    }
    for (const auto& p : pop.parasites()) {
      const double kl = blend_kl(pop, p);
      CHECK(std::isfinite(kl));
      CHECK(kl >= 0.0);
      const double miss = missing_info(pop, p);
      CHECK(miss >= 0.0);
      // I(mu; X' | X) <= H(mu | X) under the receiver condition.
      const auto outs = oracle::where_receiver(oracle::enumerate(pop), p.index);
      const double h_mu_given_x = oracle::entropy(outs, oracle::MU | oracle::X) - oracle::entropy(outs, oracle::X);
      CHECK(miss <= h_mu_given_x + 1e-12);
    }
  }
}

TEST_CASE("code distance is a metric") {
  Rng rng(105);
  for (int t = 0; t < kPopulations; ++t) {
    const Population pop = oracle::random_population(rng);
    const auto& c = pop.codes();
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(code_distance(c[i], c[i]) == 0.0);
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double dij = code_distance(c[i], c[j]);
        CHECK(dij == doctest::Approx(code_distance(c[j], c[i])).epsilon(1e-12));
        if (c[i] != c[j]) CHECK(dij > 0.0);
        CHECK(dij <= std::sqrt(static_cast<double>(pop.num_states())) + 1e-12);
        for (std::size_t k = 0; k < c.size(); ++k) {
          CHECK(code_distance(c[i], c[k]) <= dij + code_distance(c[j], c[k]) + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("mutual understanding can exceed average environmental information") {
  // Two separate pairs, each speaking one constant symbol: the symbol heard
  // fixes the symbol spoken, yet nobody learns anything about the state.
  const std::vector<std::uint32_t> zero(4, 0), one(4, 1);
  const Code c0 = Code::deterministic(zero, 2), c1 = Code::deterministic(one, 2);
  const std::vector<std::pair<std::size_t, std::size_t>> edges = {{0, 1}, {2, 3}};
  const Population pop(Environment::uniform(4), 2, {c0, c0, c1, c1}, {}, InteractionGraph::edge_uniform(4, edges));
  CHECK(mutual_understanding(pop) == doctest::Approx(1.0));
  CHECK(avg_env_info(pop) == 0.0);
}
