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

#include <algorithm>

#include "cclmarl/errors.hpp"
#include "cclmarl/rover.hpp"

using namespace ccl;

namespace {

RoverConfig single_poi(int n_agents, int coupling, Vec2 where = {15.0, 15.0}) {
  RoverConfig c;
  c.n_agents = n_agents;
  c.pois = {Poi{where, 1.0, 4.0, coupling}};
  return c;
}

RoverState placed(const std::vector<Vec2>& positions, std::size_t pois) {
  RoverState s;
  s.positions = positions;
  s.observed.assign(pois, false);
  return s;
}

std::vector<nn::Vector> zeros(int n) { return std::vector<nn::Vector>(static_cast<std::size_t>(n), nn::Vector::Zero(2)); }

}  // namespace

TEST_CASE("rover presets: POI layouts") {
  const RoverConfig two = rover_two_poi_preset(3, 2);
  CHECK(two.pois.size() == 2);
  CHECK(two.pois[0].position.x() < two.center().x());
  CHECK(two.pois[1].position.x() > two.center().x());
  const RoverConfig one = rover_one_poi_preset(3, 2);
  CHECK(one.pois.size() == 1);
  CHECK(one.pois[0].coupling == 2);
  CHECK(one.episode_length == 50);
}

TEST_CASE("rover reset: deterministic and inside the spawn disk") {
  const RoverConfig c = rover_two_poi_preset(5, 3);
  Rng a(1);
  Rng b(1);
  for (int episode = 0; episode < 20; ++episode) {
    const RoverReset ra = rover_reset(c, a);
    const RoverReset rb = rover_reset(c, b);
    CHECK(ra.observations == rb.observations);
    for (const Vec2& p : ra.state.positions) CHECK((p - c.center()).norm() <= c.spawn_radius);
    CHECK(std::none_of(ra.state.observed.begin(), ra.state.observed.end(), [](bool f) { return f; }));
  }
}

TEST_CASE("rover step: identity, clamping, clipping") {
  const RoverConfig c = single_poi(1, 1, {2.0, 2.0});
  RoverState s = placed({{10.0, 10.0}}, 1);
  rover_step(c, s, zeros(1));
  CHECK(s.positions[0] == Vec2(10.0, 10.0));
  const std::vector<nn::Vector> push{nn::Vector{{2.0, 0.0}}};
  rover_step(c, s, push);
  CHECK(s.positions[0] == Vec2(11.0, 10.0));
  s.positions[0] = {30.0, 5.0};
  rover_step(c, s, push);
  CHECK(s.positions[0] == Vec2(30.0, 5.0));
  const std::vector<nn::Vector> bad{nn::Vector{{NAN, 0.0}}};
  CHECK_THROWS_AS(rover_step(c, s, bad), ConfigError);
}

TEST_CASE("rover simultaneity: coupling counts and strict radius") {
  const RoverConfig c5 = single_poi(5, 5);
  const Vec2 poi = c5.pois[0].position;
  std::vector<Vec2> five(5, poi);
  CHECK(poi_simultaneity_check(c5, placed(five, 1), 0));
  std::vector<Vec2> four(5, poi);
  four[4] = poi + Vec2(10.0, 0.0);
  CHECK_FALSE(poi_simultaneity_check(c5, placed(four, 1), 0));

  const RoverConfig c1 = single_poi(1, 1);
  CHECK_FALSE(poi_simultaneity_check(c1, placed({poi + Vec2(4.0, 0.0)}, 1), 0));
  CHECK(poi_simultaneity_check(c1, placed({poi + Vec2(3.999999, 0.0)}, 1), 0));
}

TEST_CASE("rover reward: terminal only, monotone flags, normalization") {
  RoverConfig c = single_poi(2, 2);
  c.episode_length = 5;
  RoverEnv env(c);
  Rng rng(2);
  env.reset(rng);
  env.mutable_state().positions = {c.pois[0].position, c.pois[0].position};
  EnvStep step = env.step(zeros(2), {});
  CHECK(step.team_reward == 0.0);
  CHECK(env.state().observed[0]);
  // Leave; the flag stays set.
  env.mutable_state().positions = {Vec2(1.0, 1.0), Vec2(1.0, 1.0)};
  for (int t = 2; t <= 5; ++t) {
    step = env.step(zeros(2), {});
    CHECK(env.state().observed[0]);
    CHECK(step.done == (t == 5));
    CHECK(step.team_reward == (t == 5 ? 1.0 : 0.0));
  }

  RoverConfig two = rover_two_poi_preset(2, 1);
  RoverState s = placed({two.pois[0].position, Vec2(15.0, 15.0)}, 2);
  s.observed = {true, false};
  CHECK(rover_team_reward(two, s) == 0.5);
  s.observed = {false, false};
  CHECK(rover_team_reward(two, s) == 0.0);
}

TEST_CASE("rover reward: infeasible coupling never pays") {
  RoverConfig c = single_poi(2, 3);
  RoverEnv env(c);
  Rng rng(3);
  env.reset(rng);
  env.mutable_state().positions = {c.pois[0].position, c.pois[0].position};
  double total = 0.0;
  for (int t = 0; t < c.episode_length; ++t) total += env.step(zeros(2), {}).team_reward;
  CHECK(total == 0.0);
}

TEST_CASE("rover reward: invariant to agent relabeling") {
  const RoverConfig c = rover_two_poi_preset(3, 2);
  RoverState a = placed({c.pois[0].position, c.pois[0].position + Vec2(1.0, 0.0), Vec2(15.0, 15.0)}, 2);
  RoverState b = placed({Vec2(15.0, 15.0), c.pois[0].position + Vec2(1.0, 0.0), c.pois[0].position}, 2);
  rover_step(c, a, zeros(3));
  rover_step(c, b, zeros(3));
  CHECK(rover_team_reward(c, a) == rover_team_reward(c, b));
  CHECK(rover_team_reward(c, a) == 0.5);
}

TEST_CASE("rover saliency: gate, value, max over overlaps") {
  RoverConfig c;
  c.n_agents = 1;
  c.pois = {Poi{{10.0, 10.0}, 0.5, 4.0, 1}, Poi{{12.0, 10.0}, 1.0, 4.0, 1}};
  CHECK(rover_saliency(c, placed({{25.0, 25.0}}, 2), 0) == 0.0);
  CHECK(rover_saliency(c, placed({{7.0, 10.0}}, 2), 0) == 0.5);
  CHECK(rover_saliency(c, placed({{11.0, 10.0}}, 2), 0) == 1.0);
}

TEST_CASE("rover observations: quadrant densities") {
  RoverConfig c;
  c.n_agents = 2;
  c.pois = {Poi{{12.0, 10.0}, 1.0, 4.0, 1}};
  const RoverState s = placed({{10.0, 10.0}, {10.0, 13.0}}, 1);
  const auto obs = rover_observations(c, s);
  REQUIRE(obs.size() == 2);
  // POI straight east of agent 0 (angle 0, quadrant 0), distance 2.
  CHECK(obs[0][0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(obs[0][1] == 0.0);
  // Rover 1 straight north of agent 0 (angle 90, quadrant 1), distance 3.
  CHECK(obs[0][5] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  // Seen from rover 1, agent 0 is due south (270, quadrant 3).
  CHECK(obs[1][7] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  for (const auto& o : obs) {
    CHECK(o.size() == kRoverObservationDim);
    CHECK(o.minCoeff() >= 0.0);
    CHECK(o.maxCoeff() <= kRoverSensorClip);
  }
  const RoverState close = placed({{12.0, 10.0}, {12.0, 10.0}}, 1);
  for (const auto& o : rover_observations(c, close)) CHECK(o.maxCoeff() == kRoverSensorClip);
}

TEST_CASE("rover config: validation") {
  RoverConfig c = single_poi(3, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = single_poi(3, 1);
  c.pois[0].value = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = single_poi(3, 1, {40.0, 1.0});
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
