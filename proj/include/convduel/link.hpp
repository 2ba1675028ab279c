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

#ifndef CONVDUEL_LINK_HPP_
#define CONVDUEL_LINK_HPP_

#include <cmath>
#include <string>
#include <string_view>

#include "convduel/common.hpp"

namespace convduel {

// Link functions mapping a utility difference to a win probability.
//   Sigmoid:        mu(z) = 1 / (1 + exp(-z))
//   ClampedLinear:  mu(z) = max(0, min(1, (1 + z) / 2))
enum class LinkKind { Sigmoid, ClampedLinear };

struct LinkFunction {
  LinkKind kind = LinkKind::Sigmoid;

  // Lower bound of mu' over |z| <= 2. For the clamped link the true infimum is
  // zero; 0.5 is returned and is only meaningful while |x^T theta| < 1.
  double kappa1() const;

  // Upper bounds on mu' and mu''. Documentation only; no operation uses them.
  double lipschitz_bound() const { return kind == LinkKind::Sigmoid ? 0.25 : 0.5; }
  double curvature_bound() const { return kind == LinkKind::Sigmoid ? 0.25 : 0.0; }
};

std::string_view to_string(LinkKind kind);
LinkKind parse_link_kind(std::string_view name);

namespace detail {
template <typename Scalar>
void require_finite(Scalar z) {
  using std::isfinite;
  if (!isfinite(z)) throw DomainError("link function evaluated at a non-finite input");
}
}  // namespace detail

// Unchecked evaluators for inner loops.
template <typename Scalar>
inline Scalar link_eval_unchecked(LinkKind kind, Scalar z) {
  using std::exp;
  if (kind == LinkKind::Sigmoid) {
    if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
    const Scalar e = exp(z);
    return e / (Scalar(1) + e);
  }
  const Scalar v = Scalar(0.5) * (Scalar(1) + z);
  return v < Scalar(0) ? Scalar(0) : (v > Scalar(1) ? Scalar(1) : v);
}

template <typename Scalar>
inline Scalar link_deriv_unchecked(LinkKind kind, Scalar z) {
  using std::abs;
  if (kind == LinkKind::Sigmoid) {
    const Scalar s = link_eval_unchecked(kind, z);
    return s * (Scalar(1) - s);
  }
  // Kinks at |z| = 1 take the inside value.
  return abs(z) <= Scalar(1) ? Scalar(0.5) : Scalar(0);
}

// Antiderivative m of mu (m' = mu), used by the log-likelihood.
//   Sigmoid:       m(z) = log(1 + e^z)
//   ClampedLinear: m(z) = 0 (z <= -1), (1 + z)^2 / 4 (|z| < 1), z (z >= 1)
template <typename Scalar>
inline Scalar link_antiderivative_unchecked(LinkKind kind, Scalar z) {
  using std::exp;
  using std::log1p;
  if (kind == LinkKind::Sigmoid) {
    return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
  }
  if (z <= Scalar(-1)) return Scalar(0);
  if (z >= Scalar(1)) return z;
  return (Scalar(1) + z) * (Scalar(1) + z) / Scalar(4);
}

template <typename Scalar>
Scalar link_eval(const LinkFunction& link, Scalar z) {
  detail::require_finite(z);
  return link_eval_unchecked(link.kind, z);
}

template <typename Scalar>
Scalar link_deriv(const LinkFunction& link, Scalar z) {
  detail::require_finite(z);
  return link_deriv_unchecked(link.kind, z);
}

template <typename Scalar>
Scalar link_antiderivative(const LinkFunction& link, Scalar z) {
  detail::require_finite(z);
  return link_antiderivative_unchecked(link.kind, z);
}

inline double LinkFunction::kappa1() const {
  return kind == LinkKind::Sigmoid ? link_deriv_unchecked(kind, 2.0) : 0.5;
}

}  // namespace convduel

#endif  // CONVDUEL_LINK_HPP_
