#include <doctest.h>

#include <cmath>

#include "dsehs/model.hpp"
#include "dsehs/structure.hpp"

using namespace dsehs;

TEST_CASE("state indexing is a bijection") {
  const Model model(ModelConfig::reference());
  CHECK(model.num_states() == 26 * 26 * 8);
  for (int i = 0; i < model.num_states(); ++i) CHECK(model.flatten(model.unflatten(i)) == i);
  CHECK_THROWS_AS(model.flatten({26, 0, 0}), std::out_of_range);
  CHECK_THROWS_AS(model.flatten({0, 0, 8}), std::out_of_range);
  CHECK_THROWS_AS(model.unflatten(model.num_states()), std::out_of_range);
}

TEST_CASE("feasible actions") {
  const Model model(ModelConfig::reference());
  CHECK(model.feasible_actions(0, 25) == std::vector<int>{0});
  CHECK(model.feasible_actions(5, 0) == std::vector<int>{0});
  CHECK(model.feasible_actions(5, 1) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(model.feasible_actions(-1, 0), std::out_of_range);
}

TEST_CASE("goodput distribution") {
  const Model model(ModelConfig::reference());
  for (int h = 0; h < 8; ++h) {
    const Pmf idle = model.goodput_pmf(0, h);
    CHECK(idle.prob_of(0) == 1.0);
    CHECK(idle.prob_of(1) == 0.0);
  }
  const Pmf worst = model.goodput_pmf(1, 0);  // q = 0.8
  CHECK(worst.prob_of(1) == doctest::Approx(0.2));
  CHECK(worst.prob_of(0) == doctest::Approx(0.8));

  ModelConfig lossless = ModelConfig::reference();
  lossless.plr = {0.5, 0.0};
  lossless.channel_kernel = ModelConfig::birth_death_kernel(2);
  const Model m2(lossless);
  CHECK(m2.goodput_pmf(1, 1).prob_of(1) == 1.0);
}

TEST_CASE("buffer cost hand-expansions") {
  const double p = 0.4;
  const Model model(ModelConfig::reference(p));
  CHECK(model.buffer_cost(0, 3, 0) == 0.0);
  // full buffer, idle: overflow only when l = 1
  CHECK(model.buffer_cost(25, 3, 0) == doctest::Approx(25 + 50 * p));
  // full buffer, transmit in q = 0.8: overflow needs f = 0 and l = 1
  CHECK(model.buffer_cost(25, 0, 1) == doctest::Approx(25 + 50 * 0.8 * p));
}

TEST_CASE("battery kernel enumeration") {
  const Model model(ModelConfig::reference());
  SUBCASE("saturation at full battery") {
    const Pmf k = model.battery_kernel(25, 0);
    CHECK(k.prob_of(25) == doctest::Approx(1.0));
  }
  SUBCASE("mid battery, transmit") {
    const Pmf k = model.battery_kernel(5, 1);
    CHECK(k.prob_of(4) == doctest::Approx(0.3));
    CHECK(k.prob_of(5) == doctest::Approx(0.7));
  }
  SUBCASE("empty battery, idle") {
    const Pmf k = model.battery_kernel(0, 0);
    CHECK(k.prob_of(0) == doctest::Approx(0.3));
    CHECK(k.prob_of(1) == doctest::Approx(0.7));
  }
  CHECK_THROWS_AS(model.battery_kernel(0, 1), std::invalid_argument);
}

TEST_CASE("buffer kernel enumeration") {
  const Model model(ModelConfig::reference(0.4));
  SUBCASE("empty buffer, idle") {
    const Pmf k = model.buffer_kernel(0, 0, 0);
    CHECK(k.prob_of(0) == doctest::Approx(0.6));
    CHECK(k.prob_of(1) == doctest::Approx(0.4));
  }
  SUBCASE("full buffer clips") {
    const Pmf k = model.buffer_kernel(25, 0, 0);
    CHECK(k.prob_of(25) == doctest::Approx(1.0));
  }
  SUBCASE("transmit in the worst channel") {
    const Pmf k = model.buffer_kernel(3, 0, 1);
    CHECK(k.prob_of(2) == doctest::Approx(0.12));
    CHECK(k.prob_of(3) == doctest::Approx(0.56));
    CHECK(k.prob_of(4) == doctest::Approx(0.32));
  }
  CHECK_THROWS_AS(model.buffer_kernel(0, 0, 1), std::invalid_argument);
}

TEST_CASE("kernels sum to 1 for every feasible state-action pair") {
  const Model model(ModelConfig::reference());
  for (int i = 0; i < model.num_states(); ++i) {
    const StateIndex s = model.unflatten(i);
    for (int a : model.feasible_actions(s.b, s.e)) {
      CHECK(model.buffer_kernel(s.b, s.h, a).mass() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(model.battery_kernel(s.e, a).mass() == doctest::Approx(1.0).epsilon(1e-12));
      double joint_mass = 0.0;
      for (const auto& [j, p] : model.joint_kernel(s, a)) joint_mass += p;
      CHECK(joint_mass == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint kernel factorizes") {
  const Model model(ModelConfig::reference(0.4));
  SUBCASE("marginal over next buffer equals the buffer kernel") {
    const StateIndex s{3, 5, 2};
    for (int a : model.feasible_actions(s.b, s.e)) {
      std::vector<double> marginal(26, 0.0);
      for (const auto& [j, p] : model.joint_kernel(s, a)) marginal[model.unflatten(j).b] += p;
      const Pmf expected = model.buffer_kernel(s.b, s.h, a);
      for (int bn = 0; bn <= 25; ++bn)
        CHECK(marginal[bn] == doctest::Approx(expected.prob_of(bn)).epsilon(1e-12));
    }
  }
  SUBCASE("frozen dynamics give a self-loop") {
    ModelConfig cfg = ModelConfig::reference();
    cfg.arrival_pmf = Pmf::point(0);
    cfg.harvest_pmf = Pmf::point(0);
    cfg.channel_kernel.assign(8, std::vector<double>(8, 0.0));
    for (int h = 0; h < 8; ++h) cfg.channel_kernel[h][h] = 1.0;
    const Model frozen(cfg);
    const StateIndex s{4, 7, 3};
    const auto kernel = frozen.joint_kernel(s, 0);
    REQUIRE(kernel.size() == 1);
    CHECK(kernel[0].first == frozen.flatten(s));
    CHECK(kernel[0].second == doctest::Approx(1.0));
  }
  SUBCASE("outer product of the marginals") {
    const StateIndex s{3, 5, 0};
    const Pmf pb = model.buffer_kernel(3, 0, 1);
    const Pmf pe = model.battery_kernel(5, 1);
    const auto& ph = model.config().channel_kernel[0];
    for (const auto& [j, p] : model.joint_kernel(s, 1)) {
      const StateIndex t = model.unflatten(j);
      CHECK(p == doctest::Approx(pb.prob_of(t.b) * pe.prob_of(t.e) * ph[t.h]).epsilon(1e-12));
    }
  }
}

TEST_CASE("post-decision state") {
  const Model model(ModelConfig::reference());
  const StateIndex s{5, 3, 2};
  CHECK(model.post_decision(s, 0, 0) == StateIndex{5, 3, 2});
  CHECK(model.post_decision(s, 1, 1) == StateIndex{4, 2, 2});
  CHECK(model.post_decision(s, 1, 0) == StateIndex{5, 2, 2});
  CHECK_THROWS_AS(model.post_decision(s, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(model.post_decision({0, 3, 2}, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(model.post_decision({5, 0, 2}, 1, 0), std::invalid_argument);
}

TEST_CASE("kernel stochastic dominance holds exhaustively") {
  const Model model(ModelConfig::reference(0.4));
  CHECK(check_stochastic_dominance(model, Axis::Battery).pass);
  CHECK(check_stochastic_dominance(model, Axis::Buffer).pass);

  SUBCASE("deterministic arrivals give shifted point masses") {
    ModelConfig cfg = ModelConfig::reference();
    cfg.arrival_pmf = Pmf::point(0);
    cfg.harvest_pmf = Pmf::point(0);
    const Model det(cfg);
    CHECK(check_stochastic_dominance(det, Axis::Battery).pass);
    CHECK(check_stochastic_dominance(det, Axis::Buffer).pass);
  }
}

TEST_CASE("auxiliary cost monotonicity") {
  SUBCASE("reference config") {
    const Model model(ModelConfig::reference(0.4));
    CHECK(check_cost_monotonicity(model).pass);
  }
  SUBCASE("eta = 0 reduces to the holding cost") {
    ModelConfig cfg = ModelConfig::reference();
    cfg.overflow_penalty = 0.0;
    const Model model(cfg);
    CHECK(check_cost_monotonicity(model).pass);
    CHECK(model.auxiliary_cost(7, 3, 0, 1) == 7.0);
  }
  SUBCASE("e-dependence enters only through the feasibility switch") {
    const Model model(ModelConfig::reference(0.4));
    // below e_TX the transmit request is coerced to idle
    CHECK(model.auxiliary_cost(5, 0, 0, 1) == model.buffer_cost(5, 0, 0));
    CHECK(model.auxiliary_cost(5, 1, 0, 1) == model.buffer_cost(5, 0, 1));
    // above the switch the cost is constant in e
    for (int e = 1; e < 25; ++e)
      CHECK(model.auxiliary_cost(5, e, 0, 1) == model.auxiliary_cost(5, e + 1, 0, 1));
  }
}
