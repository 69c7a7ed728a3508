// Copyright 2026 The revrec Authors.
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

#ifndef REVREC_METRICS_HPP_
#define REVREC_METRICS_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "revrec/errors.hpp"

namespace revrec {

/// KL(P || Q) = sum_k P_k ln(P_k / Q_k), in nats. Terms with P_k = 0
/// contribute nothing; any Q_k <= 0 is a NumericError because smoothed
/// estimators never produce one.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("distributions differ in length");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(q[k] > 0.0))
      throw NumericError("KL divergence: Q has non-positive mass at topic " + std::to_string(k));
    if (p[k] < 0.0) throw NumericError("KL divergence: P has negative mass");
    if (p[k] > 0.0) d += p[k] * std::log(p[k] / q[k]);
  }
  // Rounding can leave a tiny negative for P ~= Q.
  return d < 0.0 ? 0.0 : d;
}

inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("distributions differ in length");
  std::vector<double> mid(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) mid[k] = 0.5 * (p[k] + q[k]);
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < 0.0 || q[k] < 0.0) throw NumericError("Jensen-Shannon: negative mass");
    if (p[k] > 0.0) d += 0.5 * p[k] * std::log(p[k] / mid[k]);
    if (q[k] > 0.0) d += 0.5 * q[k] * std::log(q[k] / mid[k]);
  }
  return d < 0.0 ? 0.0 : d;
}

inline double cosine_similarity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("vectors differ in length");
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    dot += p[k] * q[k];
    np += p[k] * p[k];
    nq += q[k] * q[k];
  }
  if (np == 0.0 || nq == 0.0) throw NumericError("cosine similarity of a zero vector");
  return dot / (std::sqrt(np) * std::sqrt(nq));
}

}  // namespace revrec

#endif  // REVREC_METRICS_HPP_
