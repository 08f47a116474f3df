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

#include "cclmarl/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cclmarl/errors.hpp"

namespace ccl {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size()) throw ConfigError("distance: dimension mismatch");
  double acc = 0.0;
  if (metric == Metric::kChebyshev) {
    for (std::size_t d = 0; d < a.size(); ++d) acc = std::max(acc, std::abs(a[d] - b[d]));
    return acc;
  }
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

void PointSet::append(std::span<const double> point) {
  if (point.size() != dim_) {
    throw ConfigError("PointSet: expected dimension " + std::to_string(dim_) + ", got " +
                      std::to_string(point.size()));
  }
  data_.insert(data_.end(), point.begin(), point.end());
}

PointSetView::PointSetView(const PointSet& set, std::size_t offset, std::size_t dim)
    : PointSetView(set, offset, dim, set.metric()) {}

PointSetView::PointSetView(const PointSet& set, std::size_t offset, std::size_t dim,
                           Metric metric)
    : set_(&set), offset_(offset), dim_(dim), metric_(metric) {
  if (offset + dim > set.dim()) throw ConfigError("PointSetView: block outside point dimension");
}

KnnQueryResult kth_nearest(std::span<const double> query, const PointSetView& points, int k) {
  if (points.empty()) throw InsufficientMemory();
  if (k < 1) throw ConfigError("kth_nearest: k must be positive");
  if (query.size() != points.dim()) throw ConfigError("kth_nearest: query dimension mismatch");
  const std::size_t n = points.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = distance(query, points.point(i), points.metric());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  order.resize(kk);
  return {dist[order.back()], std::move(order)};
}

double kth_nearest_radius(std::span<const double> query, const PointSetView& points, int k) {
  if (points.empty()) throw InsufficientMemory();
  if (k < 1) throw ConfigError("kth_nearest_radius: k must be positive");
  if (query.size() != points.dim()) {
    throw ConfigError("kth_nearest_radius: query dimension mismatch");
  }
  const std::size_t n = points.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = distance(query, points.point(i), points.metric());
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk - 1), dist.end());
  return dist[kk - 1];
}

std::size_t count_within_radius(std::span<const double> query, const PointSetView& points,
                                 double radius) {
  if (query.size() != points.dim()) throw ConfigError("count_within_radius: dimension mismatch");
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (distance(query, points.point(i), points.metric()) < radius) ++count;
  }
  return count;
}

namespace {

constexpr std::size_t kHarmonicTableSize = 1'000'001;

// H_n for n < kHarmonicTableSize, summed with Neumaier compensation.
const std::vector<double>& harmonic_table() {
  static const std::vector<double> table = [] {
    std::vector<double> h(kHarmonicTableSize);
    long double sum = 0.0L;
    long double carry = 0.0L;
    h[0] = 0.0;
    for (std::size_t j = 1; j < kHarmonicTableSize; ++j) {
      const long double term = 1.0L / static_cast<long double>(j);
      const long double t = sum + term;
      if (std::abs(sum) >= std::abs(term)) {
        carry += (sum - t) + term;
      } else {
        carry += (term - t) + sum;
      }
      sum = t;
      h[j] = static_cast<double>(sum + carry);
    }
    return h;
  }();
  return table;
}

// Asymptotic series for psi(x), x large.
double digamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
}

}  // namespace

double digamma_of_count(std::size_t n) {
  if (n < kHarmonicTableSize) return -kEulerMascheroni + harmonic_table()[n];
  return digamma_asymptotic(static_cast<double>(n) + 1.0);
}

}  // namespace ccl
