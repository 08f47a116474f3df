// Copyright 2026 The cclmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "cclmarl/errors.hpp"
#include "cclmarl/particle.hpp"

using namespace ccl;

namespace {

std::vector<nn::Vector> zeros(int n) { return std::vector<nn::Vector>(static_cast<std::size_t>(n), nn::Vector::Zero(2)); }

ParticleState still_state(const ParticleConfig& c) {
  ParticleState s;
  for (int i = 0; i < c.n_good + c.n_adv; ++i) {
    s.positions.push_back(Vec2(0.1 * i, -0.1 * i));
    s.velocities.push_back(Vec2::Zero());
  }
  for (int l = 0; l < c.n_landmarks; ++l) s.landmarks.push_back(Vec2(0.5 * l, 0.5));
  return s;
}

}  // namespace

TEST_CASE("particle reset: deterministic, in bounds, keep-away target") {
  for (auto scenario : {ParticleScenario::kPhysicalDeception, ParticleScenario::kKeepAway,
                        ParticleScenario::kPredatorPrey}) {
    const ParticleConfig c = particle_preset(scenario);
    CHECK(c.n_good == 3);
    CHECK(c.n_adv == 1);
    CHECK(c.episode_length == 80);
    Rng a(4);
    Rng b(4);
    for (int e = 0; e < 20; ++e) {
      const ParticleReset ra = particle_reset(c, a);
      const ParticleReset rb = particle_reset(c, b);
      CHECK(ra.observations.good == rb.observations.good);
      for (const Vec2& p : ra.state.positions) CHECK(p.cwiseAbs().maxCoeff() <= c.half_extent);
      CHECK((ra.state.target == 0 || ra.state.target == 1));
    }
  }
}

TEST_CASE("particle physics: fixed point, one step, damping") {
  const ParticleConfig c = particle_preset(ParticleScenario::kKeepAway);
  ParticleState s = still_state(c);
  const ParticleState before = s;
  particle_step(c, s, zeros(3), zeros(1));
  CHECK(s.positions == before.positions);

  ParticleState f = still_state(c);
  const Vec2 p0 = f.positions[0];
  std::vector<nn::Vector> push = zeros(3);
  push[0] = nn::Vector{{1.0, 0.0}};
  particle_step(c, f, push, zeros(1));
  CHECK(f.velocities[0].x() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(f.positions[0].x() - p0.x() == doctest::Approx(0.01).epsilon(1e-12));

  ParticleState d = still_state(c);
  d.velocities[1] = Vec2(0.4, 0.0);
  for (int t = 1; t <= 5; ++t) {
    particle_step(c, d, zeros(3), zeros(1));
    CHECK(d.velocities[1].x() == doctest::Approx(0.4 * std::pow(0.75, t)).epsilon(1e-14));
  }
}

TEST_CASE("particle scores: scenario formulas") {
  ParticleConfig pp = particle_preset(ParticleScenario::kPredatorPrey);
  ParticleState s = still_state(pp);
  s.positions = {Vec2(-0.9, -0.9), Vec2(0.9, 0.9), Vec2(0.9, -0.9), Vec2(-0.9, 0.9)};
  CHECK(scenario_step_scores(pp, s).good == 0.0);
  s.positions[0] = s.positions[3] + Vec2(0.1, 0.0);
  const StepScores hit = scenario_step_scores(pp, s);
  CHECK(hit.good == 10.0);
  CHECK(hit.adversary == -10.0);
  CHECK(hit.contacts == 1);

  ParticleConfig ka = particle_preset(ParticleScenario::kKeepAway);
  ParticleState k = still_state(ka);
  k.target = 1;
  for (int i = 0; i < 3; ++i) k.positions[static_cast<std::size_t>(i)] = k.landmarks[1];
  CHECK(scenario_step_scores(ka, k).good == 0.0);

  ParticleConfig de = particle_preset(ParticleScenario::kPhysicalDeception);
  ParticleState x = still_state(de);
  x.target = 0;
  const double g1 = scenario_step_scores(de, x).good;
  x.positions[3] += Vec2(0.0, -0.5);
  CHECK(scenario_step_scores(de, x).good > g1);
  CHECK(scenario_step_scores(de, x).adversary == -scenario_step_scores(de, x).good);
}

TEST_CASE("particle reward: terminal only and averaged") {
  ParticleConfig c = particle_preset(ParticleScenario::kKeepAway);
  c.episode_length = 12;
  CHECK(particle_terminal_team_reward(c, 0.0) == 0.0);
  CHECK(particle_terminal_team_reward(c, 12.0 * -0.3) == doctest::Approx(-0.3).epsilon(1e-15));

  ParticleEnv env(c);
  Rng rng(5);
  env.reset(rng);
  Rng actions(6);
  double oracle_sum = 0.0;
  for (int t = 1; t <= c.episode_length; ++t) {
    std::vector<nn::Vector> good;
    for (int i = 0; i < 3; ++i) good.push_back(nn::Vector{{actions.uniform(-1, 1), actions.uniform(-1, 1)}});
    const std::vector<nn::Vector> adv{nn::Vector{{actions.uniform(-1, 1), actions.uniform(-1, 1)}}};
    const EnvStep step = env.step(good, adv);
    oracle_sum += scenario_step_scores(c, env.state()).good;
    if (t < c.episode_length) {
      CHECK(step.team_reward == 0.0);
      CHECK(step.adversary_reward == 0.0);
    } else {
      CHECK(step.done);
      CHECK(std::abs(step.team_reward - oracle_sum / c.episode_length) < 1e-12);
    }
  }
}

TEST_CASE("particle observations: masking and lengths") {
  const ParticleConfig c = particle_preset(ParticleScenario::kPhysicalDeception);
  ParticleState s = still_state(c);
  s.positions = {Vec2(0.0, 0.0), Vec2(1.9, 1.9), Vec2(0.2, 0.0), Vec2(-1.9, -1.9)};
  s.landmarks = {Vec2(0.3, 0.0), Vec2(1.9, -1.9)};
  const ParticleObservations o = particle_observations(c, s);
  CHECK(o.good[0].size() == particle_good_observation_dim(c));
  CHECK(o.adversary[0].size() == particle_adversary_observation_dim(c));
  // Layout: vel(2), pos(2), landmarks(2 each), other entities(2 each), target.
  CHECK(o.good[0][4] == doctest::Approx(0.3));
  CHECK(o.good[0][6] == 0.0);
  CHECK(o.good[0][7] == 0.0);
  CHECK(o.good[0][8] == 0.0);  // good 1 is far
  CHECK(o.good[0][10] == doctest::Approx(0.2));
  CHECK(o.good[0][12] == 0.0);  // adversary far
  CHECK(o.good[0][13] == 0.0);
}

TEST_CASE("particle physics: identical seeds and actions are bit-identical") {
  const ParticleConfig c = particle_preset(ParticleScenario::kPredatorPrey);
  ParticleEnv a(c);
  ParticleEnv b(c);
  Rng ra(7);
  Rng rb(7);
  a.reset(ra);
  b.reset(rb);
  Rng act(8);
  for (int t = 0; t < c.episode_length; ++t) {
    std::vector<nn::Vector> good;
    for (int i = 0; i < 3; ++i) good.push_back(nn::Vector{{act.normal(), act.normal()}});
    const std::vector<nn::Vector> adv{nn::Vector{{act.normal(), act.normal()}}};
    a.step(good, adv);
    b.step(good, adv);
    CHECK(a.state().positions == b.state().positions);
    for (const Vec2& v : a.state().velocities) CHECK(v.allFinite());
    for (const Vec2& p : a.state().positions) CHECK(p.cwiseAbs().maxCoeff() <= c.soft_bound());
  }
}

TEST_CASE("particle config: predator-prey team is slower") {
  ParticleConfig c = particle_preset(ParticleScenario::kPredatorPrey);
  CHECK(c.good_accel < c.adversary_accel);
  c.good_accel = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_particle_scenario("tag"), ConfigError);
}
