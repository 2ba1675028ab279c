// Copyright 2026 The convduel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convduel/mnl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace convduel {

double assortment_value(const Vector& utilities, const Vector& revenues,
                        const std::vector<Index>& items) {
  if (items.empty()) return 0.0;
  double shift = 0.0;
  for (Index i : items) shift = std::max(shift, utilities(i));
  double num = 0.0;
  double den = std::exp(-shift);
  for (Index i : items) {
    const double w = std::exp(utilities(i) - shift);
    num += revenues(i) * w;
    den += w;
  }
  return num / den;
}

double expected_revenue(const std::vector<Index>& items, const RowMatrix& features,
                        const Vector& theta, const Vector& revenues) {
  if (items.empty()) return 0.0;
  Vector utilities = features * theta;
  return assortment_value(utilities, revenues, items);
}

namespace {

// Up to max_size items with the largest positive (r_i - threshold) exp(u_i),
// ranked in log space; ties go to the lower index.
std::vector<Index> threshold_set(const Vector& u, const Vector& r, double threshold,
                                 Index max_size) {
  std::vector<std::pair<double, Index>> keyed;
  for (Index i = 0; i < u.size(); ++i) {
    if (r(i) > threshold) keyed.emplace_back(std::log(r(i) - threshold) + u(i), i);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Index> out;
  for (std::size_t j = 0; j < keyed.size() && static_cast<Index>(j) < max_size; ++j) {
    out.push_back(keyed[j].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Index> optimal_assortment(const Vector& utilities, const Vector& revenues,
                                      Index max_size) {
  if (max_size < 1) throw DomainError("assortment size cap must be at least 1");
  if (utilities.size() != revenues.size()) {
    throw StructuralError("optimal_assortment: utilities and revenues differ in length");
  }
  if (utilities.size() == 0 || revenues.maxCoeff() <= 0.0) return {};

  // R(C(lambda)) > lambda exactly when lambda is below the optimal value.
  double lo = std::min(0.0, revenues.minCoeff());
  double hi = revenues.maxCoeff();
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const auto set = threshold_set(utilities, revenues, mid, max_size);
    if (assortment_value(utilities, revenues, set) > mid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  std::vector<Index> best = threshold_set(utilities, revenues, lo, max_size);
  double best_value = assortment_value(utilities, revenues, best);
  for (double lambda : {0.5 * (lo + hi), hi}) {
    auto set = threshold_set(utilities, revenues, lambda, max_size);
    const double value = assortment_value(utilities, revenues, set);
    if (value > best_value || (value == best_value && set < best)) {
      best = std::move(set);
      best_value = value;
    }
  }
  return best;
}

}  // namespace convduel
