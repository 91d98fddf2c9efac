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

// Dense reference implementations used as test oracles. The exponential is
// Eigen's Pade-based matrix exponential; logarithms and powers of Hermitian
// positive matrices use a plain eigendecomposition of the dense matrix, with
// no log-domain bookkeeping or eigenvalue clustering. Eigen's general matrix
// logarithm is avoided: it stalls on ill-conditioned, degenerate inputs.

#ifndef QSPLIT_TESTS_ORACLES_HPP_
#define QSPLIT_TESTS_ORACLES_HPP_

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qsplit/operator_algebra.hpp"

namespace qsplit::oracle {

inline Matrix expm(const Matrix& a) { return a.exp(); }
template <typename F>
Matrix hermitian_function(const Matrix& a, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
  const RealVector w = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix logm(const Matrix& a) {
  return hermitian_function(a, [](double x) { return std::log(x); });
}
inline Matrix powm(const Matrix& a, double t) {
  return hermitian_function(a, [t](double x) { return std::pow(x, t); });
}

inline Matrix gibbs(const Matrix& h, double beta) {
  const Matrix e = expm(-beta * h);
  return e / e.trace();
}

inline double entropy(const Matrix& rho) { return -(rho * logm(rho)).trace().real(); }

inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  return (rho * (logm(rho) - logm(sigma))).trace().real();
}

// Midpoint rule for int_0^1 rho^t X rho^(1-t) dt.
inline Matrix j_midpoint(const Matrix& rho, const Matrix& x, int nodes) {
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  for (int k = 0; k < nodes; ++k) {
    const double t = (k + 0.5) / nodes;
    acc += powm(rho, t) * x * powm(rho, 1.0 - t);
  }
  return acc / nodes;
}

// -1/2 tr{[rho^y, X][rho^(1-y), X]}.
inline double skew(const Matrix& rho, const Matrix& x, double y) {
  const Matrix a = powm(rho, y), b = powm(rho, 1.0 - y);
  const Matrix ca = a * x - x * a, cb = b * x - x * b;
  return -0.5 * (ca * cb).trace().real();
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Random full-rank density matrix.
template <typename Gen>
Matrix random_state(Gen& gen, Index d) {
  const Matrix a = gen.ginibre(d);
  Matrix rho = a * a.adjoint() + 0.05 * Matrix::Identity(d, d);
  return rho / rho.trace();
}

}  // namespace qsplit::oracle

#endif  // QSPLIT_TESTS_ORACLES_HPP_
