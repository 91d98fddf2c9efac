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

#ifndef QSPLIT_MODEL_TFIM_HPP_
#define QSPLIT_MODEL_TFIM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <variant>

#include "qsplit/entropy_splitting.hpp"
#include "qsplit/quadrature.hpp"

namespace qsplit {

// Transverse-field Ising chain quenched g0 -> g0 + delta_g (J = 1).
//
// Finite chains report extensive values, summed over the pair modes
// k = (2n + 1) pi / N. The thermodynamic limit reports the same quantities
// per site, i.e. int_0^pi dk / 2pi of the pair-mode integrand.
struct FiniteChain {
  int N = 0;
};
struct ThermodynamicLimit {};
using ChainSize = std::variant<FiniteChain, ThermodynamicLimit>;

struct TfimParams {
  double g0 = 1.0;
  double delta_g = 0.0;
  double beta = 1.0;
  ChainSize size = ThermodynamicLimit{};
  int quad_nodes = 512;

  void validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("TfimParams: beta must be finite and non-negative");
    if (!std::isfinite(g0) || !std::isfinite(delta_g))
      throw std::invalid_argument("TfimParams: fields must be finite");
    if (const auto* c = std::get_if<FiniteChain>(&size)) {
      if (c->N < 4 || c->N % 2 != 0)
        throw std::invalid_argument("TfimParams: N must be even and at least 4");
    }
    if (quad_nodes < 2) throw std::invalid_argument("TfimParams: quad_nodes must be at least 2");
  }
};

struct ModeData {
  double k = 0.0;
  double eps0 = 0.0;
  double eps_tau = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  double eps_tilde = 0.0;
  double cos_theta = 1.0, sin_theta = 0.0;
  double cos_delta = 1.0, sin_delta = 0.0;
};

inline double dispersion(double g, double k) { return std::hypot(g - std::cos(k), std::sin(k)); }

inline ModeData mode_data(const TfimParams& p, double k) {
  if (!(k > 0.0 && k < std::numbers::pi))
    throw std::invalid_argument("mode_data: k must lie in (0, pi)");
  ModeData m;
  m.k = k;
  m.eps0 = dispersion(p.g0, k);
  m.eps_tau = dispersion(p.g0 + p.delta_g, k);
  m.cos_theta = (p.g0 - std::cos(k)) / m.eps0;
  m.sin_theta = std::sin(k) / m.eps0;
  m.theta = std::atan2(m.sin_theta, m.cos_theta);
  m.eps_tilde = m.eps0 + p.delta_g * m.cos_theta;
  m.cos_delta = m.eps_tilde / m.eps_tau;
  m.sin_delta = -p.delta_g * std::sin(k) / (m.eps_tau * m.eps0);
  m.delta = std::atan2(m.sin_delta, m.cos_delta);
  return m;
}

namespace detail {

inline double lncosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  return x < 0.0 ? std::log1p(std::exp(x)) : x + std::log1p(std::exp(-x));
}

}  // namespace detail

// Per pair mode (+k, -k): all five quantities in closed form. The Gamma
// expressions are rewritten so that no 1 - tanh is formed by subtraction.
inline AverageSplit mode_split(const TfimParams& p, double k) {
  const ModeData m = mode_data(p, k);
  const double b = p.beta;
  const double t0 = std::tanh(b * m.eps0);
  AverageSplit s;
  s.lambda_cl = 2.0 * (detail::lncosh(b * m.eps_tilde) - detail::lncosh(b * m.eps0) +
                       b * (m.eps0 - m.eps_tilde) * t0);
  s.lambda_qu = 2.0 * (detail::lncosh(b * m.eps_tau) - detail::lncosh(b * m.eps_tilde));
  s.sigma = s.lambda_cl + s.lambda_qu;

  const double x0 = 2.0 * b * m.eps0;
  const double xt = 2.0 * b * m.eps_tau;
  const double cd = m.cos_delta, sd2 = m.sin_delta * m.sin_delta;
  const double e2 = std::exp(-2.0 * x0);
  const double one_minus_t0 = 2.0 * e2 / (1.0 + e2);           // 1 - tanh(x0)
  const double one_minus_cd = cd > 0.0 ? sd2 / (1.0 + cd) : 1.0 - cd;
  const double one_minus_prod = cd > 0.0 ? one_minus_cd + cd * one_minus_t0
                                         : 1.0 - std::tanh(x0) * cd;
  // ln((1 + y) / (1 - y)) for y = tanh(x0), tanh(xt), tanh(x0) cos(delta).
  const double l0 = 2.0 * x0;
  const double lt = 2.0 * xt;
  const double l0c = std::log1p(std::tanh(x0) * cd) - std::log(one_minus_prod);
  // cosh(2a) / (4 cosh^2 a) with a = beta eps0.
  const double pref = 0.25 * (1.0 + t0 * t0);
  // ln(1 + sinh^2(x0) sin^2(delta)).
  double lg = 0.0;
  if (sd2 > 0.0 && x0 > 0.0) {
    const double lnx =
        2.0 * (x0 - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x0))) + std::log(sd2);
    lg = detail::softplus(lnx);
  }
  s.gamma_qu = 0.5 * t0 * (l0 - cd * l0c) - pref * lg;
  s.gamma_cl = 2.0 * detail::lncosh(b * m.eps_tau) - 2.0 * detail::lncosh(b * m.eps0) -
               0.5 * t0 * cd * (lt - l0c) + pref * lg;
  return s;
}

// Leading order in delta_g, per pair mode.
inline std::pair<double, double> mode_split_infinitesimal(const TfimParams& p, double k) {
  const ModeData m = mode_data(p, k);
  const double b = p.beta, dg2 = p.delta_g * p.delta_g;
  const double sech = 1.0 / std::cosh(b * m.eps0);
  const double x = b * m.eps0;
  const double ratio = x > 0.0 ? std::tanh(x) / x : 1.0;
  return {b * b * dg2 * sech * sech * m.cos_theta * m.cos_theta,
          b * b * dg2 * ratio * m.sin_theta * m.sin_theta};
}

namespace detail {

// Split point for the k integral near criticality. The gap closes at k = 0,
// the edge of the domain, so the first panel resolves the scale of the
// smaller of the two gaps and the thermal length.
inline double tfim_panel_split(const TfimParams& p) {
  const double scale = std::max({std::abs(p.g0 - 1.0), std::abs(p.g0 + p.delta_g - 1.0),
                                 p.beta > 0.0 ? 1.0 / p.beta : std::numbers::pi});
  return std::clamp(8.0 * scale, 1e-3, 0.5 * std::numbers::pi);
}

// Sum over pair modes (finite N) or int_0^pi dk / 2pi (thermodynamic limit)
// of an array-valued per-mode function.
template <std::size_t M, typename F>
std::array<double, M> sum_modes(const TfimParams& p, F&& f) {
  p.validate();
  std::array<double, M> acc{};
  auto add = [&](double k, double w) {
    const std::array<double, M> v = f(k);
    for (std::size_t q = 0; q < M; ++q) acc[q] += w * v[q];
  };
  if (const auto* c = std::get_if<FiniteChain>(&p.size)) {
    for (int n = 0; n < c->N / 2; ++n)
      add((2.0 * n + 1.0) * std::numbers::pi / c->N, 1.0);
    return acc;
  }
  auto panel = [&](double a, double b, int nodes) {
    const GaussLegendre rule = gauss_legendre(nodes);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < rule.size(); ++i)
      add(mid + half * rule.nodes[i], half * rule.weights[i] / (2.0 * std::numbers::pi));
  };
  if (p.g0 >= 0.9 && p.g0 <= 1.1 && p.quad_nodes >= 4) {
    const double kc = tfim_panel_split(p);
    const int first = (p.quad_nodes + 1) / 2;
    panel(0.0, kc, first);
    panel(kc, std::numbers::pi, p.quad_nodes - first);
  } else {
    panel(0.0, std::numbers::pi, p.quad_nodes);
  }
  return acc;
}

}  // namespace detail

inline AverageSplit tfim_split(const TfimParams& p) {
  const auto v = detail::sum_modes<5>(p, [&](double k) {
    const AverageSplit s = mode_split(p, k);
    return std::array<double, 5>{s.sigma, s.gamma_cl, s.gamma_qu, s.lambda_cl, s.lambda_qu};
  });
  return {v[0], v[1], v[2], v[3], v[4]};
}

struct TfimLambdaSplit {
  double lambda_cl = 0.0;
  double lambda_qu = 0.0;
  double sigma = 0.0;
};

inline TfimLambdaSplit lambda_split_tfim(const TfimParams& p) {
  const auto v = detail::sum_modes<3>(p, [&](double k) {
    const AverageSplit s = mode_split(p, k);
    return std::array<double, 3>{s.lambda_cl, s.lambda_qu, s.sigma};
  });
  return {v[0], v[1], v[2]};
}

inline std::pair<double, double> gamma_split_tfim(const TfimParams& p) {
  const auto v = detail::sum_modes<2>(p, [&](double k) {
    const AverageSplit s = mode_split(p, k);
    return std::array<double, 2>{s.gamma_cl, s.gamma_qu};
  });
  return {v[0], v[1]};
}

inline std::pair<double, double> infinitesimal_tfim(const TfimParams& p) {
  const auto v = detail::sum_modes<2>(p, [&](double k) {
    const auto [cl, qu] = mode_split_infinitesimal(p, k);
    return std::array<double, 2>{cl, qu};
  });
  return {v[0], v[1]};
}

// Equilibrium free energy at field g, same size convention as above:
// -(1/beta) sum over pairs of 2 ln(2 cosh(beta eps_k)).
inline double tfim_free_energy(double g, const TfimParams& p) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("tfim_free_energy: beta must be positive");
  TfimParams q = p;
  q.g0 = g;
  const auto v = detail::sum_modes<1>(q, [&](double k) {
    return std::array<double, 1>{
        -2.0 * (std::numbers::ln2 + detail::lncosh(p.beta * dispersion(g, k))) / p.beta};
  });
  return v[0];
}

// Dense 4-level model of one pair mode in the |n_-k n_k> basis
// (|00>, |01>, |10>, |11>), run through the generic engine with U = 1.
struct PairModeHamiltonians {
  HermitianMatrix H0;
  HermitianMatrix dH_d;
  HermitianMatrix dH_c;
};

inline PairModeHamiltonians pair_mode_hamiltonians(const TfimParams& p, double k) {
  const ModeData m = mode_data(p, k);
  RealVector h0(4);
  h0 << -2.0 * m.eps0, 0.0, 0.0, 2.0 * m.eps0;
  RealVector dd(4);
  dd << -1.0, 0.0, 0.0, 1.0;
  dd *= 2.0 * p.delta_g * m.cos_theta;
  RealMatrix dc = RealMatrix::Zero(4, 4);
  dc(0, 3) = dc(3, 0) = 2.0 * p.delta_g * std::sin(k) / m.eps0;
  return {HermitianMatrix::diagonal(h0), HermitianMatrix::diagonal(dd), HermitianMatrix(dc)};
}

inline AverageSplit pair_mode_oracle(const TfimParams& p, double k) {
  const PairModeHamiltonians h = pair_mode_hamiltonians(p, k);
  const WorkProtocol w{h.H0, h.H0 + h.dH_d + h.dH_c, UnitaryMatrix::identity(4), p.beta};
  return average_split(w);
}

}  // namespace qsplit

#endif  // QSPLIT_MODEL_TFIM_HPP_
