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

#include "cclmarl/density.hpp"
#include "cclmarl/errors.hpp"
#include "cclmarl/rng.hpp"
#include "oracles.hpp"

using namespace ccl;

namespace {

PointSet line(std::initializer_list<double> xs) {
  PointSet s(1, Metric::kEuclidean);
  for (double x : xs) s.append(std::vector<double>{x});
  return s;
}

}  // namespace

TEST_CASE("kth_nearest_radius: hand cases") {
  const PointSet s = line({0.0, 10.0});
  CHECK(kth_nearest_radius(std::vector<double>{1.0}, s, 1) == 1.0);

  PointSet c(2, Metric::kChebyshev);
  c.append(std::vector<double>{0.0, 0.0});
  c.append(std::vector<double>{3.0, 4.0});
  CHECK(kth_nearest_radius(std::vector<double>{1.0, 1.0}, c, 2) == 3.0);
}

TEST_CASE("kth_nearest_radius: k beyond the set shrinks, empty set throws") {
  const PointSet s = line({0.0, 2.0, 5.0});
  CHECK(kth_nearest_radius(std::vector<double>{0.0}, s, 7) == 5.0);
  const PointSet empty(1, Metric::kEuclidean);
  CHECK_THROWS_AS(kth_nearest_radius(std::vector<double>{0.0}, empty, 1), InsufficientMemory);
}

TEST_CASE("kth_nearest_radius: matches full-sort oracle in 8-D") {
  Rng rng(1);
  for (Metric metric : {Metric::kEuclidean, Metric::kChebyshev}) {
    PointSet s(8, metric);
    std::vector<oracle::Point> pts;
    for (int i = 0; i < 200; ++i) {
      oracle::Point p(8);
      for (double& v : p) v = rng.normal();
      pts.push_back(p);
      s.append(p);
    }
    for (int q = 0; q < 20; ++q) {
      oracle::Point query(8);
      for (double& v : query) v = rng.normal();
      std::vector<double> d;
      for (const auto& p : pts) {
        d.push_back(metric == Metric::kEuclidean ? oracle::euclidean(query, p)
                                                 : oracle::chebyshev(query, p, 0, 8));
      }
      for (int k : {1, 5, 17}) CHECK(kth_nearest_radius(query, s, k) == oracle::kth_distance(d, k));
    }
  }
}

TEST_CASE("kth_nearest: ties keep insertion order") {
  const PointSet s = line({1.0, -1.0, 1.0, 3.0});
  const KnnQueryResult r = kth_nearest(std::vector<double>{0.0}, s, 3);
  CHECK(r.radius == 1.0);
  REQUIRE(r.neighbor_order.size() == 3);
  CHECK(r.neighbor_order[0] == 0);
  CHECK(r.neighbor_order[1] == 1);
  CHECK(r.neighbor_order[2] == 2);
}

TEST_CASE("count_within_radius: strict inequality") {
  const PointSet s = line({0.0, 1.0, 2.0});
  CHECK(count_within_radius(std::vector<double>{0.0}, s, 0.0) == 0);
  CHECK(count_within_radius(std::vector<double>{0.0}, s, 1.5) == 2);
  CHECK(count_within_radius(std::vector<double>{0.0}, s, 1.0) == 1);
}

TEST_CASE("count_within_radius: matches linear scan and the k-1 bound") {
  Rng rng(2);
  PointSet s(3, Metric::kChebyshev);
  std::vector<oracle::Point> pts;
  for (int i = 0; i < 60; ++i) {
    oracle::Point p{std::round(rng.normal() * 2.0), std::round(rng.normal() * 2.0), rng.normal()};
    pts.push_back(p);
    s.append(p);
  }
  for (int q = 0; q < 50; ++q) {
    oracle::Point query{std::round(rng.normal() * 2.0), std::round(rng.normal() * 2.0), rng.normal()};
    const double radius = rng.uniform(0.0, 3.0);
    std::size_t want = 0;
    for (const auto& p : pts) want += oracle::chebyshev(query, p, 0, 3) < radius ? 1 : 0;
    CHECK(count_within_radius(query, s, radius) == want);
    for (int k = 1; k <= 9; ++k) {
      const double r = kth_nearest_radius(query, s, k);
      CHECK(count_within_radius(query, s, r) <= static_cast<std::size_t>(k - 1));
      if (k > 1) CHECK(r >= kth_nearest_radius(query, s, k - 1));
    }
  }
}

TEST_CASE("block views select columns") {
  PointSet s(4, Metric::kChebyshev);
  s.append(std::vector<double>{0.0, 0.0, 5.0, 5.0});
  const PointSetView v(s, 2, 2);
  CHECK(v.dim() == 2);
  CHECK(kth_nearest_radius(std::vector<double>{5.0, 6.0}, v, 1) == 1.0);
}

TEST_CASE("metric axioms on random triples") {
  Rng rng(3);
  for (Metric m : {Metric::kEuclidean, Metric::kChebyshev}) {
    for (int i = 0; i < 200; ++i) {
      std::vector<double> a(5), b(5), c(5);
      for (int j = 0; j < 5; ++j) {
        a[j] = rng.normal();
        b[j] = rng.normal();
        c[j] = rng.normal();
      }
      CHECK(distance(a, b, m) == distance(b, a, m));
      CHECK(distance(a, c, m) <= distance(a, b, m) + distance(b, c, m) + 1e-12);
    }
  }
}

TEST_CASE("digamma_of_count: recurrence, constant, H_10") {
  CHECK(digamma_of_count(1) - digamma_of_count(0) == 1.0);
  CHECK(digamma_of_count(0) == doctest::Approx(-0.5772156649).epsilon(1e-10));
  CHECK(std::abs(digamma_of_count(10) - (-kEulerMascheroni + 7381.0 / 2520.0)) < 1e-15);
  for (std::size_t n = 0; n < 2000; ++n) CHECK(digamma_of_count(n + 1) > digamma_of_count(n));
}

TEST_CASE("digamma_of_count: large arguments continue smoothly") {
  const std::vector<double> h = oracle::exact_harmonics(10);
  CHECK(h[3] == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  // Beyond the table the asymptotic series takes over; adjacent values
  // still differ by 1/n.
  const std::size_t big = 3000000;
  CHECK(digamma_of_count(big) - digamma_of_count(big - 1) ==
        doctest::Approx(1.0 / static_cast<double>(big)).epsilon(1e-6));
  CHECK(std::abs(digamma_of_count(big) - (std::log(big + 1.0) - 0.5 / (big + 1.0))) < 1e-12);
}
