// Copyright 2026 The qsplit Authors
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

#ifndef QSPLIT_TRAJECTORY_STATISTICS_HPP_
#define QSPLIT_TRAJECTORY_STATISTICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/entropy_splitting.hpp"

namespace qsplit {

enum class Quantity { kSigma, kGammaCl, kGammaQu, kLambdaCl, kLambdaQu };

inline constexpr std::array<Quantity, 5> kAllQuantities = {
    Quantity::kSigma, Quantity::kGammaCl, Quantity::kGammaQu, Quantity::kLambdaCl,
    Quantity::kLambdaQu};

inline std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::kSigma: return "sigma";
    case Quantity::kGammaCl: return "gamma_cl";
    case Quantity::kGammaQu: return "gamma_qu";
    case Quantity::kLambdaCl: return "lambda_cl";
    case Quantity::kLambdaQu: return "lambda_qu";
  }
  return "?";
}

inline std::optional<Quantity> parse_quantity(std::string_view s) {
  for (Quantity q : kAllQuantities)
    if (to_string(q) == s) return q;
  return std::nullopt;
}

inline double select(const AverageSplit& a, Quantity q) {
  switch (q) {
    case Quantity::kSigma: return a.sigma;
    case Quantity::kGammaCl: return a.gamma_cl;
    case Quantity::kGammaQu: return a.gamma_qu;
    case Quantity::kLambdaCl: return a.lambda_cl;
    case Quantity::kLambdaQu: return a.lambda_qu;
  }
  return 0.0;
}

// A table invariant failed; the protocol is not physical (typically U is not
// unitary).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-point-measurement statistics. Index i labels the initial energy
// eigenstate, j the final one, both in ascending energy order.
struct TrajectoryTable {
  Index dim = 0;
  RealVector p0, ptau, q, ptilde;
  RealVector log_p0, log_ptau, log_q, log_ptilde;
  RealMatrix overlap;  // (j, i)
  RealMatrix forward;  // (i, j)
  RealMatrix log_forward;
  RealMatrix sigma, gamma_cl, gamma_qu, lambda_cl, lambda_qu;  // (i, j)

  const RealMatrix& values(Quantity which) const {
    switch (which) {
      case Quantity::kSigma: return sigma;
      case Quantity::kGammaCl: return gamma_cl;
      case Quantity::kGammaQu: return gamma_qu;
      case Quantity::kLambdaCl: return lambda_cl;
      case Quantity::kLambdaQu: return lambda_qu;
    }
    return sigma;
  }

  // Total forward probability carried by infinite entries.
  double infinite_weight(Quantity which) const {
    const RealMatrix& x = values(which);
    double w = 0.0;
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j)
        if (std::isinf(x(i, j))) w += forward(i, j);
    return w;
  }

  // Forward average; entries with zero probability are skipped.
  double mean(Quantity which) const {
    const RealMatrix& x = values(which);
    double m = 0.0;
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j)
        if (forward(i, j) > 0.0) m += forward(i, j) * x(i, j);
    return m;
  }
};

inline constexpr double kDoublyStochasticTol = 1e-9;

inline TrajectoryTable build_table(const ReferenceStates& r) {
  if (!(r.beta > 0.0)) throw std::invalid_argument("build_table: beta must be positive");
  TrajectoryTable t;
  const Index d = r.dim();
  t.dim = d;
  t.overlap = r.overlap;
  {
    const double rows = (t.overlap.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double cols = (t.overlap.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (std::max(rows, cols) > kDoublyStochasticTol) {
      std::ostringstream os;
      os << "doubly-stochastic violation: overlap matrix row sums deviate by " << rows
         << " and column sums by " << cols << " (tolerance " << kDoublyStochasticTol << ")";
      throw InvariantViolation(os.str());
    }
  }
  t.log_p0 = r.rho_tau.log_weights();
  t.log_ptau = r.rho_tau_th.log_weights();
  t.log_q = r.rho_tau_dephased.log_weights();
  t.log_ptilde = r.rho_tilde_th.log_weights();
  t.p0 = detail::exp_elementwise(t.log_p0);
  t.ptau = detail::exp_elementwise(t.log_ptau);
  t.q = detail::exp_elementwise(t.log_q);
  t.ptilde = detail::exp_elementwise(t.log_ptilde);

  t.forward.resize(d, d);
  t.log_forward.resize(d, d);
  t.sigma.resize(d, d);
  t.gamma_cl.resize(d, d);
  t.gamma_qu.resize(d, d);
  t.lambda_cl.resize(d, d);
  t.lambda_qu.resize(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double w = t.overlap(j, i);
      t.log_forward(i, j) = w > 0.0 ? std::log(w) + t.log_p0[i] : -kInf;
      t.forward(i, j) = std::exp(t.log_forward(i, j));
      t.sigma(i, j) = t.log_p0[i] - t.log_ptau[j];
      t.gamma_cl(i, j) = t.log_q[j] - t.log_ptau[j];
      t.gamma_qu(i, j) = t.log_p0[i] - t.log_q[j];
      t.lambda_cl(i, j) = t.log_p0[i] - t.log_ptilde[i];
      t.lambda_qu(i, j) = t.log_ptilde[i] - t.log_ptau[j];
    }
  }
  return t;
}

inline TrajectoryTable build_table(const WorkProtocol& p) { return build_table(reference_states(p)); }

// P_B[i, j] = |<i_0| U^dag |j_tau>|^2 p_j^tau, computed from U^dag directly.
inline RealMatrix backward_probabilities(const WorkProtocol& p, const ReferenceStates& r) {
  const Matrix amp = r.initial_basis.adjoint() * p.U.matrix().adjoint() * r.final_basis;
  const RealVector ptau = r.rho_tau_th.weights();
  RealMatrix pb = amp.cwiseAbs2();
  for (Index j = 0; j < pb.cols(); ++j) pb.col(j) *= ptau[j];
  return pb;
}

struct Atom {
  double value = 0.0;
  double probability = 0.0;
};

struct DiscreteDistribution {
  std::string label;
  std::vector<Atom> atoms;  // ascending value

  double total_probability() const {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.probability;
    return s;
  }
};

inline constexpr double kValueMergeTol = 1e-10;

// Atoms closer than merge_tol to the first member of their run are merged; the
// merged value is the probability-weighted mean. Zero-probability entries are
// dropped.
inline DiscreteDistribution distribution(const TrajectoryTable& t, Quantity which,
                                         double merge_tol = kValueMergeTol) {
  const RealMatrix& x = t.values(which);
  std::vector<Atom> raw;
  raw.reserve(static_cast<std::size_t>(t.dim * t.dim));
  for (Index i = 0; i < t.dim; ++i)
    for (Index j = 0; j < t.dim; ++j)
      if (t.forward(i, j) > 0.0) raw.push_back({x(i, j), t.forward(i, j)});
  std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });

  DiscreteDistribution dist;
  dist.label = std::string(to_string(which));
  std::size_t k = 0;
  while (k < raw.size()) {
    const double start = raw[k].value;
    double mass = 0.0, moment = 0.0;
    std::size_t m = k;
    for (; m < raw.size(); ++m) {
      const bool same = std::isinf(start) ? raw[m].value == start
                                          : raw[m].value - start <= merge_tol;
      if (!same) break;
      mass += raw[m].probability;
      if (!std::isinf(start)) moment += raw[m].probability * raw[m].value;
    }
    dist.atoms.push_back({std::isinf(start) ? start : moment / mass, mass});
    k = m;
  }
  return dist;
}

struct CumulantSet {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;

  double operator[](int n) const {
    switch (n) {
      case 1: return kappa1;
      case 2: return kappa2;
      case 3: return kappa3;
      case 4: return kappa4;
    }
    throw std::out_of_range("CumulantSet: order must be 1..4");
  }
};

inline constexpr double kInfiniteAtomTol = 1e-14;

// Moments are taken about the mean, which is algebraically the same as the
// raw-moment relations but loses less precision.
inline CumulantSet cumulants(const DiscreteDistribution& dist) {
  double inf_mass = 0.0, mass = 0.0, mean = 0.0;
  for (const Atom& a : dist.atoms) {
    if (std::isinf(a.value)) {
      inf_mass += a.probability;
      continue;
    }
    mass += a.probability;
    mean += a.probability * a.value;
  }
  if (inf_mass >= kInfiniteAtomTol) {
    std::ostringstream os;
    os << "cumulants: " << (dist.label.empty() ? "quantity" : dist.label)
       << " has infinite values with probability " << inf_mass;
    throw DivergenceError(os.str());
  }
  if (!(mass > 0.0)) throw std::invalid_argument("cumulants: empty distribution");
  mean /= mass;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const Atom& a : dist.atoms) {
    if (std::isinf(a.value)) continue;
    const double c = a.value - mean;
    const double c2 = c * c;
    m2 += a.probability * c2;
    m3 += a.probability * c2 * c;
    m4 += a.probability * c2 * c2;
  }
  m2 /= mass;
  m3 /= mass;
  m4 /= mass;
  return {mean, m2, m3, m4 - 3.0 * m2 * m2};
}

enum class CgfKind { kSigma, kGamma, kLambda };

namespace detail {

// ln(a^x b^y) for two commuting weights sharing an eigenvector.
inline double combine_powers(double la, double x, double lb, double y) {
  const double s = log_power(la, x), t = log_power(lb, y);
  if ((s == kInf && t == -kInf) || (s == -kInf && t == kInf)) return log_power(-kInf, x + y);
  return s + t;
}

}  // namespace detail

// Trace formulas:
//   K_sigma(v)   = ln tr{rho_th^v rho_tau^(1-v)}
//   K_gamma(v,u) = ln tr{rho_th^v D^(u-v) rho_tau^(1-u)}
//   K_lambda(v,u)= ln tr{rho_th^u rho_tilde^(v-u) rho_tau^(1-v)}
// Each product splits into a commuting pair in the final basis and one in the
// evolved basis, joined by the overlap matrix.
inline ExtendedValue cgf_trace(const ReferenceStates& r, CgfKind which, double v, double u = 0.0,
                               double support_tol = kSupportTol) {
  const Index d = r.dim();
  const RealVector& lth = r.rho_tau_th.log_weights();
  const RealVector& lq = r.rho_tau_dephased.log_weights();
  const RealVector& lp = r.rho_tau.log_weights();
  const RealVector& lt = r.rho_tilde_th.log_weights();
  RealVector left(d), right(d);
  for (Index k = 0; k < d; ++k) {
    switch (which) {
      case CgfKind::kSigma:
        left[k] = detail::log_power(lth[k], v);
        right[k] = detail::log_power(lp[k], 1.0 - v);
        break;
      case CgfKind::kGamma:
        left[k] = detail::combine_powers(lth[k], v, lq[k], u - v);
        right[k] = detail::log_power(lp[k], 1.0 - u);
        break;
      case CgfKind::kLambda:
        left[k] = detail::log_power(lth[k], u);
        right[k] = detail::combine_powers(lt[k], v - u, lp[k], 1.0 - v);
        break;
    }
  }
  return detail::log_overlap_sum(r.overlap, left, right, support_tol);
}

inline ExtendedValue cgf_trace(const WorkProtocol& p, CgfKind which, double v, double u = 0.0) {
  return cgf_trace(reference_states(p), which, v, u);
}

// ln sum_{ij} P_F[i,j] exp(-v X[i,j] - u Y[i,j]) straight from the table.
inline ExtendedValue cgf_empirical(const TrajectoryTable& t, CgfKind which, double v,
                                   double u = 0.0) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(t.dim * t.dim));
  for (Index i = 0; i < t.dim; ++i) {
    for (Index j = 0; j < t.dim; ++j) {
      if (!(t.forward(i, j) > 0.0)) continue;
      double e = 0.0;
      switch (which) {
        case CgfKind::kSigma: e = -v * t.sigma(i, j); break;
        case CgfKind::kGamma: e = -v * t.gamma_cl(i, j) - u * t.gamma_qu(i, j); break;
        case CgfKind::kLambda: e = -v * t.lambda_cl(i, j) - u * t.lambda_qu(i, j); break;
      }
      if (std::isnan(e)) continue;
      if (e == kInf) return {kInf, true};
      terms.push_back(t.log_forward(i, j) + e);
    }
  }
  return {detail::log_sum_exp(terms), false};
}

struct FluctuationReport {
  // <exp(-X)> for sigma, gamma_cl, gamma_qu, lambda_cl, lambda_qu.
  std::array<double, 5> averages{};
  double worst_deviation = 0.0;  // over the first four
  bool passed = false;
};

inline constexpr double kFluctuationTol = 1e-9;

inline FluctuationReport fluctuation_theorem_check(const TrajectoryTable& t) {
  FluctuationReport rep;
  for (std::size_t k = 0; k < kAllQuantities.size(); ++k) {
    const RealMatrix& x = t.values(kAllQuantities[k]);
    std::vector<double> terms;
    for (Index i = 0; i < t.dim; ++i)
      for (Index j = 0; j < t.dim; ++j)
        if (t.forward(i, j) > 0.0) terms.push_back(t.log_forward(i, j) - x(i, j));
    rep.averages[k] = std::exp(detail::log_sum_exp(terms));
    if (k < 4) rep.worst_deviation = std::max(rep.worst_deviation, std::abs(rep.averages[k] - 1.0));
  }
  rep.passed = rep.worst_deviation <= kFluctuationTol;
  return rep;
}

struct Histogram {
  double bin_width = 0.0;
  std::vector<double> edges;        // size = bins + 1
  std::vector<double> probability;  // per bin
};

// Smallest atom value whose cumulative probability reaches q.
inline double weighted_quantile(const DiscreteDistribution& dist, double q) {
  double c = 0.0;
  for (const Atom& a : dist.atoms) {
    c += a.probability;
    if (c >= q) return a.value;
  }
  return dist.atoms.back().value;
}

// 2 IQR n^(-1/3), with n the number of distinct atoms.
inline double freedman_diaconis_width(const DiscreteDistribution& dist) {
  if (dist.atoms.empty()) throw std::invalid_argument("histogram: empty distribution");
  const double n = static_cast<double>(dist.atoms.size());
  const double iqr = weighted_quantile(dist, 0.75) - weighted_quantile(dist, 0.25);
  if (iqr > 0.0) return 2.0 * iqr / std::cbrt(n);
  const double span = dist.atoms.back().value - dist.atoms.front().value;
  return span > 0.0 ? span / std::sqrt(n) : 1.0;
}

inline Histogram histogram(const DiscreteDistribution& dist,
                           std::optional<double> bin_width = std::nullopt) {
  for (const Atom& a : dist.atoms)
    if (std::isinf(a.value) && a.probability > 0.0)
      throw DivergenceError("histogram: " + dist.label + " has infinite values");
  Histogram h;
  h.bin_width = bin_width ? *bin_width : freedman_diaconis_width(dist);
  if (!(h.bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
  const double lo = std::floor(dist.atoms.front().value / h.bin_width) * h.bin_width;
  const auto bins = static_cast<std::size_t>(
      std::floor((dist.atoms.back().value - lo) / h.bin_width)) + 1;
  h.probability.assign(bins, 0.0);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + static_cast<double>(b) * h.bin_width);
  for (const Atom& a : dist.atoms) {
    auto b = static_cast<std::size_t>(std::floor((a.value - lo) / h.bin_width));
    h.probability[std::min(b, bins - 1)] += a.probability;
  }
  return h;
}

}  // namespace qsplit

#endif  // QSPLIT_TRAJECTORY_STATISTICS_HPP_
