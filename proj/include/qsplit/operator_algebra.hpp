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

#ifndef QSPLIT_OPERATOR_ALGEBRA_HPP_
#define QSPLIT_OPERATOR_ALGEBRA_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsplit/quadrature.hpp"

namespace qsplit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline constexpr double kHermitianTol = 1e-12;   // relative to max |entry|
inline constexpr double kDegeneracyTol = 1e-9;   // relative to spectral range
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

// Raised when two redundant formulas for the same quantity disagree.
class CrossCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a statistic is requested of a quantity that carries infinite
// values with non-negligible probability.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_same_dim(Index a, Index b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(os.str());
  }
}

// Element-wise std::exp. Eigen's vectorised exp clamps its argument near
// -709, which turns exact underflow into a spurious subnormal.
inline RealVector exp_elementwise(const RealVector& x) {
  return x.unaryExpr([](double v) { return std::exp(v); });
}

// ln sum exp(x_k), ignoring -inf entries. Returns -inf for an empty sum.
inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Single-linkage clustering. Returns cluster ids numbered in ascending order
// of value. Entries equal to -inf always share one cluster.
inline std::vector<int> cluster_values(const RealVector& values, double tol) {
  const Index n = values.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });
  std::vector<int> ids(n, 0);
  int id = 0;
  for (Index k = 0; k < n; ++k) {
    if (k > 0) {
      const double lo = values[order[k - 1]], hi = values[order[k]];
      const bool both_inf = lo == -kInf && hi == -kInf;
      if (!both_inf && !(hi - lo <= tol)) ++id;
    }
    ids[order[k]] = id;
  }
  return ids;
}

inline double finite_range(const RealVector& values) {
  double lo = kInf, hi = -kInf;
  for (Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

inline int count_clusters(const std::vector<int>& ids) {
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

// Sum of projectors-sandwiches: V (mask .* V^dag A V) V^dag.
inline Matrix block_diagonal_part(const Matrix& a, const Matrix& v,
                                  const std::vector<int>& clusters) {
  Matrix b = v.adjoint() * a * v;
  for (Index i = 0; i < b.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      if (clusters[i] != clusters[j]) b(i, j) = 0.0;
  return v * b * v.adjoint();
}

// Logarithm of w^a given ln w, with 0^0 = 1.
inline double log_power(double log_w, double a) {
  if (a == 0.0) return 0.0;
  if (log_w == -kInf) return a > 0.0 ? -kInf : kInf;
  return a * log_w;
}

// (p - q) / (ln p - ln q), with the coincident limit p and 0 if either is 0.
inline double log_mean(double lp, double lq) {
  if (lp == -kInf || lq == -kInf) return 0.0;
  const double d = std::abs(lp - lq);
  const double hi = std::max(lp, lq);
  if (d == 0.0) return std::exp(hi);
  return std::exp(hi) * (-std::expm1(-d)) / d;
}

}  // namespace detail

class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  // Validates symmetry to kHermitianTol times the largest entry and stores the
  // exactly symmetrized matrix.
  explicit HermitianMatrix(const Matrix& m, double tol = kHermitianTol) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw std::invalid_argument("HermitianMatrix: expected a non-empty square matrix");
    const double scale = m.cwiseAbs().maxCoeff();
    double worst = 0.0;
    Index wi = 0, wj = 0;
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = i; j < m.cols(); ++j) {
        const double dev = std::abs(m(i, j) - std::conj(m(j, i)));
        if (dev > worst) { worst = dev; wi = i; wj = j; }
      }
    if (worst > tol * scale) {
      std::ostringstream os;
      os << "HermitianMatrix: symmetry violation |A(" << wi << "," << wj
         << ") - conj(A(" << wj << "," << wi << "))| = " << worst
         << " exceeds " << tol << " * max|A| = " << tol * scale;
      throw std::invalid_argument(os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
  }

  explicit HermitianMatrix(const RealMatrix& m, double tol = kHermitianTol)
      : HermitianMatrix(Matrix(m.cast<Complex>()), tol) {}

  static HermitianMatrix zero(Index d) { return HermitianMatrix(Matrix(Matrix::Zero(d, d)), 0.0); }
  static HermitianMatrix identity(Index d) {
    return HermitianMatrix(Matrix(Matrix::Identity(d, d)), 0.0);
  }
  static HermitianMatrix diagonal(const RealVector& diag) {
    return HermitianMatrix(Matrix(diag.cast<Complex>().asDiagonal()), 0.0);
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "HermitianMatrix::operator+");
    return HermitianMatrix(Matrix(a.m_ + b.m_));
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "HermitianMatrix::operator-");
    return HermitianMatrix(Matrix(a.m_ - b.m_));
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    return HermitianMatrix(Matrix(s * a.m_));
  }

 private:
  Matrix m_;
};

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  explicit UnitaryMatrix(const Matrix& m, double tol = kUnitaryTol) : m_(m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw std::invalid_argument("UnitaryMatrix: expected a non-empty square matrix");
    const double dev =
        (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) {
      std::ostringstream os;
      os << "UnitaryMatrix: max |U^dag U - I| = " << dev << " exceeds " << tol;
      throw std::invalid_argument(os.str());
    }
  }

  // Skips validation. Used to build negative controls.
  static UnitaryMatrix unchecked(const Matrix& m) {
    UnitaryMatrix u;
    u.m_ = m;
    return u;
  }
  static UnitaryMatrix identity(Index d) { return unchecked(Matrix::Identity(d, d)); }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;       // ascending
  Matrix eigenvectors;          // columns
  std::vector<int> cluster_index;
  int cluster_count = 0;

  Index dim() const { return eigenvalues.size(); }
  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

// Absolute degeneracy threshold. Clusters are single-linkage on the sorted
// spectrum.
inline SpectralDecomposition spectral_decompose(const HermitianMatrix& h,
                                                double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver failed");
  SpectralDecomposition s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.cluster_index = detail::cluster_values(s.eigenvalues, degeneracy_tol);
  s.cluster_count = detail::count_clusters(s.cluster_index);
  return s;
}

// Default threshold kDegeneracyTol times the spectral range.
inline SpectralDecomposition spectral_decompose(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  const RealVector& ev = solver.eigenvalues();
  return spectral_decompose(h, kDegeneracyTol * (ev[ev.size() - 1] - ev[0]));
}

// A density matrix held in spectral form. Weights are stored as logarithms so
// that Gibbs states at large beta keep their exact tails; a weight declared
// zero is stored as -inf.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  // Validates Hermiticity, unit trace (1e-10) and positivity (-1e-10).
  // Eigenvalues at or below support_tol are declared zero.
  static DensityMatrix from_matrix(const Matrix& rho, double support_tol = kSupportTol) {
    const HermitianMatrix h(rho);
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << tr.real() << " differs from 1";
      throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    const RealVector& ev = solver.eigenvalues();
    if (ev[0] < -1e-10) {
      std::ostringstream os;
      os << "DensityMatrix: negative eigenvalue " << ev[0];
      throw std::invalid_argument(os.str());
    }
    DensityMatrix d;
    d.vectors_ = solver.eigenvectors();
    d.log_weights_.resize(ev.size());
    for (Index i = 0; i < ev.size(); ++i)
      d.log_weights_[i] = ev[i] > support_tol ? std::log(ev[i]) : -kInf;
    d.clusters_ = detail::cluster_values(ev, kDegeneracyTol * (ev[ev.size() - 1] - ev[0]));
    d.cluster_count_ = detail::count_clusters(d.clusters_);
    return d;
  }

  // Orthonormal columns with their log-weights. Degenerate clusters are found
  // on the log-weights.
  static DensityMatrix from_spectrum(Matrix vectors, RealVector log_weights) {
    detail::require_same_dim(vectors.cols(), log_weights.size(), "DensityMatrix::from_spectrum");
    std::vector<double> lw(log_weights.data(), log_weights.data() + log_weights.size());
    const double norm = detail::log_sum_exp(lw);
    if (!(std::abs(norm) <= 1e-10))
      throw std::invalid_argument("DensityMatrix::from_spectrum: weights do not sum to 1");
    DensityMatrix d;
    d.vectors_ = std::move(vectors);
    d.log_weights_ = std::move(log_weights);
    d.clusters_ = detail::cluster_values(d.log_weights_,
                                         kDegeneracyTol * detail::finite_range(d.log_weights_));
    d.cluster_count_ = detail::count_clusters(d.clusters_);
    return d;
  }

  Index dim() const { return log_weights_.size(); }
  const Matrix& vectors() const { return vectors_; }
  const RealVector& log_weights() const { return log_weights_; }
  RealVector weights() const { return detail::exp_elementwise(log_weights_); }
  const std::vector<int>& clusters() const { return clusters_; }
  int cluster_count() const { return cluster_count_; }

  Matrix matrix() const {
    return vectors_ * weights().cast<Complex>().asDiagonal() * vectors_.adjoint();
  }

 private:
  Matrix vectors_;
  RealVector log_weights_;
  std::vector<int> clusters_;
  int cluster_count_ = 0;
};

struct GibbsState {
  DensityMatrix state;
  double log_partition = 0.0;
};

// Gibbs weights for given energies, shifted by the ground energy so nothing
// overflows or underflows before the logarithm is taken.
inline GibbsState gibbs_from_energies(Matrix vectors, const RealVector& energies, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("gibbs_state: beta must be finite and non-negative");
  const double e_min = energies.minCoeff();
  std::vector<double> expo(energies.size());
  for (Index i = 0; i < energies.size(); ++i) expo[i] = -beta * (energies[i] - e_min);
  const double log_sum = detail::log_sum_exp(expo);
  RealVector lw(energies.size());
  for (Index i = 0; i < energies.size(); ++i) lw[i] = expo[i] - log_sum;
  GibbsState g;
  g.state = DensityMatrix::from_spectrum(std::move(vectors), std::move(lw));
  g.log_partition = -beta * e_min + log_sum;
  return g;
}

inline GibbsState gibbs_state(const HermitianMatrix& h, double beta) {
  const SpectralDecomposition s = spectral_decompose(h);
  return gibbs_from_energies(s.eigenvectors, s.eigenvalues, beta);
}

inline HermitianMatrix dephase(const HermitianMatrix& a, const SpectralDecomposition& basis_of) {
  detail::require_same_dim(a.dim(), basis_of.dim(), "dephase");
  return HermitianMatrix(
      detail::block_diagonal_part(a.matrix(), basis_of.eigenvectors, basis_of.cluster_index));
}

// Dephasing in the eigenbasis of a state, with its weight clusters as the
// projectors.
inline HermitianMatrix dephase(const HermitianMatrix& a, const DensityMatrix& basis_of) {
  detail::require_same_dim(a.dim(), basis_of.dim(), "dephase");
  return HermitianMatrix(
      detail::block_diagonal_part(a.matrix(), basis_of.vectors(), basis_of.clusters()));
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (Index i = 0; i < rho.dim(); ++i) {
    const double lw = rho.log_weights()[i];
    if (lw != -kInf) s -= std::exp(lw) * lw;
  }
  return s;
}

// |<a_i|b_j>|^2 for two orthonormal bases.
inline RealMatrix overlap_weights(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).cwiseAbs2();
}

// S(rho || sigma) in nats; +inf when rho has weight above support_tol on the
// null space of sigma.
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                               double support_tol = kSupportTol) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "relative_entropy");
  const RealVector p = rho.weights();
  double plogp = 0.0;
  for (Index i = 0; i < rho.dim(); ++i)
    if (rho.log_weights()[i] != -kInf) plogp += p[i] * rho.log_weights()[i];
  const RealMatrix w = overlap_weights(sigma.vectors(), rho.vectors());  // (j, i)
  const RealVector r = w * p;
  double cross = 0.0;
  for (Index j = 0; j < sigma.dim(); ++j) {
    const double lq = sigma.log_weights()[j];
    if (lq == -kInf) {
      if (r[j] > support_tol) return kInf;
      continue;
    }
    cross += r[j] * lq;
  }
  return plogp - cross;
}

// Value that may be +inf; the flag keeps divergence distinct from overflow.
struct ExtendedValue {
  double value = 0.0;
  bool divergent = false;
};

namespace detail {

// ln sum_{ij} W(i,j) exp(left[i] + right[j]), where left/right are already
// log-powers. Terms with an infinite exponent diverge unless their overlap is
// below support_tol.
inline ExtendedValue log_overlap_sum(const RealMatrix& w, const RealVector& left,
                                     const RealVector& right, double support_tol) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(w.size()));
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      const double o = w(i, j);
      if (o <= 0.0) continue;
      if (left[i] == kInf || right[j] == kInf) {
        if (left[i] == -kInf || right[j] == -kInf) continue;
        if (o > support_tol) return {kInf, true};
        continue;
      }
      terms.push_back(std::log(o) + left[i] + right[j]);
    }
  }
  return {log_sum_exp(terms), false};
}

}  // namespace detail

// ln tr{rho^v sigma^(1-v)}.
inline ExtendedValue log_renyi_trace(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     double v, double support_tol = kSupportTol) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "renyi_trace");
  RealVector a(rho.dim()), b(sigma.dim());
  for (Index i = 0; i < rho.dim(); ++i) a[i] = detail::log_power(rho.log_weights()[i], v);
  for (Index j = 0; j < sigma.dim(); ++j)
    b[j] = detail::log_power(sigma.log_weights()[j], 1.0 - v);
  return detail::log_overlap_sum(overlap_weights(rho.vectors(), sigma.vectors()), a, b,
                                 support_tol);
}

inline ExtendedValue renyi_trace(const DensityMatrix& rho, const DensityMatrix& sigma, double v,
                                 double support_tol = kSupportTol) {
  ExtendedValue r = log_renyi_trace(rho, sigma, v, support_tol);
  if (!r.divergent) r.value = std::exp(r.value);
  return r;
}

// J_rho[X] = int_0^1 rho^t X rho^(1-t) dt, evaluated element-wise in the
// eigenbasis of rho.
inline HermitianMatrix j_superoperator(const DensityMatrix& rho, const HermitianMatrix& x) {
  detail::require_same_dim(rho.dim(), x.dim(), "j_superoperator");
  const Matrix& v = rho.vectors();
  Matrix b = v.adjoint() * x.matrix() * v;
  const RealVector& lw = rho.log_weights();
  for (Index i = 0; i < b.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) b(i, j) *= detail::log_mean(lw[i], lw[j]);
  return HermitianMatrix(Matrix(v * b * v.adjoint()));
}

namespace detail {

inline double skew_in_eigenbasis(const RealMatrix& abs2, const RealVector& lw, double y) {
  const Index d = lw.size();
  RealVector py(d), pz(d);
  for (Index i = 0; i < d; ++i) {
    py[i] = std::exp(y * lw[i]);
    pz[i] = std::exp((1.0 - y) * lw[i]);
  }
  double s = 0.0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) s += abs2(i, j) * (py[i] - py[j]) * (pz[i] - pz[j]);
  // The double sum is symmetric; the 1/2 prefactor cancels the factor 2.
  return s;
}

}  // namespace detail

// Wigner-Yanase-Dyson skew information -1/2 tr{[rho^y, X][rho^(1-y), X]}.
inline double skew_information(const DensityMatrix& rho, const HermitianMatrix& x, double y) {
  detail::require_same_dim(rho.dim(), x.dim(), "skew_information");
  if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("skew_information: y must lie in (0, 1)");
  const Matrix b = rho.vectors().adjoint() * x.matrix() * rho.vectors();
  return detail::skew_in_eigenbasis(b.cwiseAbs2(), rho.log_weights(), y);
}

// Q = (beta / 2) int_0^1 I^y dy by Gauss-Legendre.
inline double coherence_measure_Q(const DensityMatrix& rho, const HermitianMatrix& x, double beta,
                                  int nodes = 48) {
  detail::require_same_dim(rho.dim(), x.dim(), "coherence_measure_Q");
  if (nodes < 8) throw std::invalid_argument("coherence_measure_Q: need at least 8 nodes");
  const Matrix b = rho.vectors().adjoint() * x.matrix() * rho.vectors();
  const RealMatrix abs2 = b.cwiseAbs2();
  const GaussLegendre rule = gauss_legendre(nodes);
  const double integral = integrate(rule, 0.0, 1.0, [&](double y) {
    return detail::skew_in_eigenbasis(abs2, rho.log_weights(), y);
  });
  return 0.5 * beta * integral;
}

// <X> in the state rho.
inline double expectation(const DensityMatrix& rho, const HermitianMatrix& x) {
  detail::require_same_dim(rho.dim(), x.dim(), "expectation");
  const Matrix b = rho.vectors().adjoint() * x.matrix() * rho.vectors();
  return (rho.weights().array() * b.diagonal().real().array()).sum();
}

// Var_rho[X] = <X^2> - <X>^2.
inline double variance(const DensityMatrix& rho, const HermitianMatrix& x) {
  detail::require_same_dim(rho.dim(), x.dim(), "variance");
  const Matrix b = rho.vectors().adjoint() * x.matrix() * rho.vectors();
  const RealVector p = rho.weights();
  const double mean = (p.array() * b.diagonal().real().array()).sum();
  double second = 0.0;
  for (Index i = 0; i < b.rows(); ++i) second += p[i] * b.row(i).squaredNorm();
  return second - mean * mean;
}

// exp(-i G t) by spectral decomposition of the Hermitian generator.
inline UnitaryMatrix unitary_from_generator(const HermitianMatrix& g, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g.matrix());
  Eigen::VectorXcd phases(g.dim());
  for (Index i = 0; i < g.dim(); ++i)
    phases[i] = std::exp(Complex(0.0, -solver.eigenvalues()[i] * t));
  return UnitaryMatrix(Matrix(solver.eigenvectors() * phases.asDiagonal() *
                              solver.eigenvectors().adjoint()));
}

}  // namespace qsplit

#endif  // QSPLIT_OPERATOR_ALGEBRA_HPP_
