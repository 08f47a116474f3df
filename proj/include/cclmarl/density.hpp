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

#ifndef CCLMARL_DENSITY_HPP_
#define CCLMARL_DENSITY_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace ccl {

enum class Metric { kEuclidean, kChebyshev };

double distance(std::span<const double> a, std::span<const double> b, Metric metric);

// Append-only list of equal-length points, stored row-major in insertion order.
class PointSet {
 public:
  PointSet(std::size_t dim, Metric metric) : dim_(dim), metric_(metric) {}

  void append(std::span<const double> point);
  void clear() { data_.clear(); }

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }
  std::size_t dim() const { return dim_; }
  Metric metric() const { return metric_; }
  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_;
  Metric metric_;
  std::vector<double> data_;
};

// A column block [offset, offset + dim) of every point in a PointSet. The
// whole set is the block starting at 0 spanning all columns.
class PointSetView {
 public:
  PointSetView(const PointSet& set)  // NOLINT(google-explicit-constructor)
      : set_(&set), offset_(0), dim_(set.dim()), metric_(set.metric()) {}
  PointSetView(const PointSet& set, std::size_t offset, std::size_t dim);
  PointSetView(const PointSet& set, std::size_t offset, std::size_t dim, Metric metric);

  std::size_t size() const { return set_->size(); }
  bool empty() const { return set_->empty(); }
  std::size_t dim() const { return dim_; }
  Metric metric() const { return metric_; }
  std::span<const double> point(std::size_t i) const {
    return set_->point(i).subspan(offset_, dim_);
  }

 private:
  const PointSet* set_;
  std::size_t offset_;
  std::size_t dim_;
  Metric metric_;
};

struct KnnQueryResult {
  double radius = 0.0;
  // Indices of the k nearest points, closest first; equal distances keep
  // insertion order.
  std::vector<std::size_t> neighbor_order;
};

// When the set holds fewer than k points, k is reduced to the set size.
// Throws InsufficientMemory on an empty set.
KnnQueryResult kth_nearest(std::span<const double> query, const PointSetView& points, int k);
double kth_nearest_radius(std::span<const double> query, const PointSetView& points, int k);

// Number of points at distance strictly less than radius.
std::size_t count_within_radius(std::span<const double> query, const PointSetView& points,
                                 double radius);

// psi(n + 1) = -gamma + H_n.
double digamma_of_count(std::size_t n);

inline constexpr double kEulerMascheroni = 0.57721566490153286060651209008240243;

}  // namespace ccl

#endif  // CCLMARL_DENSITY_HPP_
