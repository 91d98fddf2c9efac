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

#ifndef QSPLIT_MODEL_FINITE_HPP_
#define QSPLIT_MODEL_FINITE_HPP_

#include <cmath>
#include <stdexcept>

#include "qsplit/entropy_splitting.hpp"
#include "qsplit/model_tfim.hpp"

namespace qsplit {

namespace pauli {

inline Matrix x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix y() { Matrix m(2, 2); m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Matrix z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }

}  // namespace pauli

struct QubitQuenchParams {
  double omega = 1.0;
  double theta = 0.0;
  double beta = 1.0;
};

// H0 = omega sz, Htau = omega (sz cos(theta) + sx sin(theta)), U = 1.
inline WorkProtocol qubit_quench_protocol(const QubitQuenchParams& p) {
  if (!(p.omega > 0.0)) throw std::invalid_argument("qubit_quench_protocol: omega must be positive");
  const HermitianMatrix h0(Matrix(p.omega * pauli::z()));
  const HermitianMatrix ht(
      Matrix(p.omega * (std::cos(p.theta) * pauli::z() + std::sin(p.theta) * pauli::x())));
  return {h0, ht, UnitaryMatrix::identity(2), p.beta};
}

struct QubitClosedForms {
  double sigma = 0.0;
  double gamma_qu = 0.0;
  double lambda_qu = 0.0;
};

// atanh(tanh(x)) = x is used in place of forming tanh and inverting it.
inline QubitClosedForms qubit_closed_forms(const QubitQuenchParams& p) {
  if (!(p.omega > 0.0)) throw std::invalid_argument("qubit_closed_forms: omega must be positive");
  const double x = p.beta * p.omega;
  const double t = std::tanh(x);
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double half = std::sin(0.5 * p.theta);
  QubitClosedForms r;
  r.sigma = 2.0 * t * x * half * half;
  // ln(1 + sinh^2(x) sin^2(theta)) in the log domain.
  double lg = 0.0;
  if (x > 0.0 && s != 0.0) {
    const double lnx =
        2.0 * (x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x))) + std::log(s * s);
    lg = detail::softplus(lnx);
  }
  // At |cos(theta)| = 1 the product t c can round to +-1.
  const double atanh_tc = std::abs(c) == 1.0 ? c * x : std::atanh(t * c);
  r.gamma_qu = t * x - t * c * atanh_tc - 0.5 * lg;
  // 1/2 ln[(1 - tanh^2(x c)) / (1 - tanh^2 x)] = ln cosh x - ln cosh(x c).
  r.lambda_qu = detail::lncosh(x) - detail::lncosh(x * c);
  return r;
}

// Cyclic pulse: Htau = H0 = omega sz, U = exp(-i tau (H0 + hx sx)).
inline WorkProtocol qubit_pulse_protocol(double omega, double hx, double tau, double beta) {
  if (!(tau >= 0.0)) throw std::invalid_argument("qubit_pulse_protocol: tau must be non-negative");
  const HermitianMatrix h0(Matrix(omega * pauli::z()));
  const HermitianMatrix gen(Matrix(omega * pauli::z() + hx * pauli::x()));
  return {h0, h0, unitary_from_generator(gen, tau), beta};
}

struct SpinOperators {
  HermitianMatrix Sx, Sy, Sz;
};

// Spin S = (d - 1)/2 in the basis m = S, S - 1, ..., -S.
inline SpinOperators spin_operators(int d) {
  if (d < 2) throw std::invalid_argument("spin_operators: d must be at least 2");
  const double s = 0.5 * (d - 1);
  Matrix plus = Matrix::Zero(d, d);
  RealVector sz(d);
  for (int a = 0; a < d; ++a) {
    const double m = s - a;
    sz[a] = m;
    if (a > 0) plus(a - 1, a) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const Matrix minus = plus.adjoint();
  return {HermitianMatrix(Matrix(0.5 * (plus + minus))),
          HermitianMatrix(Matrix(Complex(0.0, -0.5) * (plus - minus))),
          HermitianMatrix::diagonal(sz)};
}

struct MacrospinParams {
  int d = 2;
  double hz = 1.0;
  double hx = 0.5;
  double tau = 2.0;
  double beta = 1.0;
};

inline constexpr int kMacrospinDimCap = 400;

// H0 = Htau = -hz Sz, U = exp(-i (H0 - hx Sx) tau).
inline WorkProtocol macrospin_protocol(const MacrospinParams& p, int dim_cap = kMacrospinDimCap) {
  if (p.d < 2) throw std::invalid_argument("macrospin_protocol: d must be at least 2");
  if (p.d > dim_cap)
    throw std::invalid_argument("macrospin_protocol: d exceeds the dimension cap");
  const SpinOperators s = spin_operators(p.d);
  const HermitianMatrix h0 = -p.hz * s.Sz;
  return {h0, h0, unitary_from_generator(h0 - p.hx * s.Sx, p.tau), p.beta};
}

}  // namespace qsplit

#endif  // QSPLIT_MODEL_FINITE_HPP_
