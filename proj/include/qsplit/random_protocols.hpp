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

#ifndef QSPLIT_RANDOM_PROTOCOLS_HPP_
#define QSPLIT_RANDOM_PROTOCOLS_HPP_

#include <cmath>
#include <random>

#include "qsplit/entropy_splitting.hpp"

namespace qsplit {

// Seeded generators for the property suites.
class RandomProtocols {
 public:
  explicit RandomProtocols(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  Matrix ginibre(Index d) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng_), n(rng_));
    return m;
  }

  // GUE-like, entries of order `scale`.
  HermitianMatrix hermitian(Index d, double scale = 1.0) {
    const Matrix a = ginibre(d);
    return HermitianMatrix(Matrix(0.5 * scale * (a + a.adjoint())));
  }

  // Haar measure via QR of a Ginibre matrix with the phases of R removed.
  UnitaryMatrix unitary(Index d) {
    Eigen::HouseholderQR<Matrix> qr(ginibre(d));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Index j = 0; j < d; ++j) {
      const Complex rj = r(j, j);
      if (std::abs(rj) > 0.0) q.col(j) *= rj / std::abs(rj);
    }
    return UnitaryMatrix(q);
  }

  HermitianMatrix diagonal_in(const Matrix& basis, double lo, double hi) {
    RealVector e(basis.cols());
    for (Index i = 0; i < e.size(); ++i) e[i] = uniform(lo, hi);
    return HermitianMatrix(Matrix(basis * e.cast<Complex>().asDiagonal() * basis.adjoint()));
  }

  WorkProtocol protocol(Index d, double beta) {
    return {hermitian(d), hermitian(d), unitary(d), beta};
  }

  // Htau shares eigenvectors with rho_tau = U rho0 U^dag, so the final state
  // commutes with the final Hamiltonian.
  WorkProtocol commuting_protocol(Index d, double beta) {
    WorkProtocol p{hermitian(d), HermitianMatrix::zero(d), unitary(d), beta};
    Eigen::SelfAdjointEigenSolver<Matrix> solver(p.H0.matrix());
    p.Htau = diagonal_in(p.U.matrix() * solver.eigenvectors(), -2.0, 2.0);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qsplit

#endif  // QSPLIT_RANDOM_PROTOCOLS_HPP_
