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

#ifndef QSPLIT_ENTROPY_SPLITTING_HPP_
#define QSPLIT_ENTROPY_SPLITTING_HPP_

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsplit/operator_algebra.hpp"

namespace qsplit {

// Thermal state of H0 at inverse temperature beta, evolved by U, then compared
// against equilibrium with respect to Htau.
struct WorkProtocol {
  HermitianMatrix H0;
  HermitianMatrix Htau;
  UnitaryMatrix U;
  double beta = 0.0;

  Index dim() const { return H0.dim(); }

  void validate() const {
    detail::require_same_dim(H0.dim(), Htau.dim(), "WorkProtocol (H0 vs Htau)");
    detail::require_same_dim(H0.dim(), U.dim(), "WorkProtocol (H0 vs U)");
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("WorkProtocol: beta must be finite and non-negative");
  }
};

struct ReferenceStates {
  double beta = 0.0;
  HermitianMatrix Htau;

  DensityMatrix rho0;              // initial basis
  DensityMatrix rho_tau;           // evolved basis
  DensityMatrix rho_tau_th;        // final basis
  DensityMatrix rho_tau_dephased;  // final basis
  DensityMatrix rho_tilde_th;      // evolved basis
  HermitianMatrix H_dephased;

  double log_z0 = 0.0;
  double log_z_tau = 0.0;
  double log_z_tilde = 0.0;

  // Column j of final_basis is |j_tau>; it diagonalizes Htau, rho_tau_th and
  // rho_tau_dephased at once. Column i of evolved_basis is U|i_0> and
  // diagonalizes rho_tau and rho_tilde_th.
  Matrix initial_basis;
  Matrix evolved_basis;
  Matrix final_basis;
  RealVector initial_energies;
  RealVector final_energies;
  RealVector tilde_energies;

  // overlap(j, i) = |<j_tau| U |i_0>|^2.
  RealMatrix overlap;

  Index dim() const { return overlap.rows(); }
};

namespace detail {

inline Matrix gather_columns(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
  return out;
}

inline void scatter_columns(Matrix& m, const std::vector<Index>& cols, const Matrix& src) {
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(cols[k]) = src.col(static_cast<Index>(k));
}

inline std::vector<std::vector<Index>> cluster_members(const std::vector<int>& ids) {
  std::vector<std::vector<Index>> members(count_clusters(ids));
  for (std::size_t i = 0; i < ids.size(); ++i)
    members[ids[i]].push_back(static_cast<Index>(i));
  return members;
}

}  // namespace detail

inline ReferenceStates reference_states(const WorkProtocol& p,
                                        double support_tol = kSupportTol) {
  p.validate();
  const Index d = p.dim();
  ReferenceStates r;
  r.beta = p.beta;
  r.Htau = p.Htau;

  const SpectralDecomposition s0 = spectral_decompose(p.H0);
  GibbsState g0 = gibbs_from_energies(s0.eigenvectors, s0.eigenvalues, p.beta);
  r.log_z0 = g0.log_partition;
  const RealVector lp0 = g0.state.log_weights();
  r.initial_energies = s0.eigenvalues;

  // Inside each degenerate block of rho_tau, rotate so that the dephased
  // Hamiltonian is diagonal. The initial basis is rotated the same way so that
  // evolved = U * initial still holds.
  Matrix initial = s0.eigenvectors;
  Matrix evolved = p.U.matrix() * initial;
  const Matrix& ht = p.Htau.matrix();
  r.tilde_energies.resize(d);
  const std::vector<int> tau_clusters =
      detail::cluster_values(lp0, kDegeneracyTol * detail::finite_range(lp0));
  for (const auto& members : detail::cluster_members(tau_clusters)) {
    if (members.size() == 1) {
      const Index i = members[0];
      r.tilde_energies[i] = (evolved.col(i).adjoint() * ht * evolved.col(i))(0, 0).real();
      continue;
    }
    const Matrix psi = detail::gather_columns(evolved, members);
    const Matrix block = psi.adjoint() * ht * psi;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (block + block.adjoint()));
    detail::scatter_columns(evolved, members, psi * solver.eigenvectors());
    detail::scatter_columns(initial, members,
                            detail::gather_columns(initial, members) * solver.eigenvectors());
    for (std::size_t k = 0; k < members.size(); ++k)
      r.tilde_energies[members[k]] = solver.eigenvalues()[static_cast<Index>(k)];
  }
  r.initial_basis = initial;
  r.evolved_basis = evolved;
  r.rho0 = DensityMatrix::from_spectrum(initial, lp0);
  r.rho_tau = DensityMatrix::from_spectrum(evolved, lp0);
  r.H_dephased = dephase(p.Htau, r.rho_tau);

  GibbsState gt = gibbs_from_energies(evolved, r.tilde_energies, p.beta);
  r.log_z_tilde = gt.log_partition;
  r.rho_tilde_th = std::move(gt.state);

  // Final basis: eigenvectors of Htau, rotated inside degenerate energy
  // clusters so that the dephased state is diagonal too.
  const SpectralDecomposition st = spectral_decompose(p.Htau);
  Matrix fin = st.eigenvectors;
  Matrix m = fin.adjoint() * evolved;  // m(j, i) = <j_tau|U|i_0>
  RealVector lq(d);
  const RealVector p0 = detail::exp_elementwise(lp0);
  for (const auto& members : detail::cluster_members(st.cluster_index)) {
    if (members.size() == 1) {
      const Index j = members[0];
      std::vector<double> terms;
      terms.reserve(static_cast<std::size_t>(d));
      for (Index i = 0; i < d; ++i) {
        const double w = std::norm(m(j, i));
        if (w > 0.0) terms.push_back(std::log(w) + lp0[i]);
      }
      lq[j] = detail::log_sum_exp(terms);
      continue;
    }
    const Index k = static_cast<Index>(members.size());
    Matrix rows(k, d);
    for (Index a = 0; a < k; ++a) rows.row(a) = m.row(members[a]);
    const Matrix block = rows * p0.cast<Complex>().asDiagonal() * rows.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (block + block.adjoint()));
    const Matrix rot = solver.eigenvectors();
    const Matrix rotated_rows = rot.adjoint() * rows;
    detail::scatter_columns(fin, members, detail::gather_columns(fin, members) * rot);
    for (Index a = 0; a < k; ++a) {
      m.row(members[a]) = rotated_rows.row(a);
      const double q = solver.eigenvalues()[a];
      lq[members[a]] = q > support_tol ? std::log(q) : -kInf;
    }
  }
  // Renormalize the marginals against accumulated roundoff.
  {
    std::vector<double> lv(lq.data(), lq.data() + d);
    const double norm = detail::log_sum_exp(lv);
    for (Index j = 0; j < d; ++j)
      if (lq[j] != -kInf) lq[j] -= norm;
  }
  r.final_basis = fin;
  r.final_energies = st.eigenvalues;
  r.overlap = m.cwiseAbs2();

  GibbsState gth = gibbs_from_energies(fin, st.eigenvalues, p.beta);
  r.log_z_tau = gth.log_partition;
  r.rho_tau_th = std::move(gth.state);
  r.rho_tau_dephased = DensityMatrix::from_spectrum(fin, lq);
  return r;
}

// F(rho) = tr{Htau rho} - S(rho) / beta.
inline double nonequilibrium_free_energy(const DensityMatrix& rho, const HermitianMatrix& htau,
                                         double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument(
        "nonequilibrium_free_energy: beta must be positive (temperature undefined at beta = 0)");
  return expectation(rho, htau) - von_neumann_entropy(rho) / beta;
}

struct AverageSplit {
  double sigma = 0.0;
  double gamma_cl = 0.0;
  double gamma_qu = 0.0;
  double lambda_cl = 0.0;
  double lambda_qu = 0.0;
};

// Every component by two routes: relative entropies and traces of logarithms
// on one side, free-energy differences on the other.
struct SplitForms {
  AverageSplit entropic;
  AverageSplit free_energy;
};

inline SplitForms split_forms(const ReferenceStates& r) {
  const double beta = r.beta;
  SplitForms f;
  AverageSplit& a = f.entropic;
  a.sigma = relative_entropy(r.rho_tau, r.rho_tau_th);
  a.gamma_cl = relative_entropy(r.rho_tau_dephased, r.rho_tau_th);
  const double s_tau = von_neumann_entropy(r.rho_tau);
  const double s_deph = von_neumann_entropy(r.rho_tau_dephased);
  a.gamma_qu = s_deph - s_tau;
  a.lambda_cl = relative_entropy(r.rho_tau, r.rho_tilde_th);
  {
    // tr rho_tau ln rho_tilde - tr rho_tau ln rho_th.
    const RealVector p = r.rho_tau.weights();
    double first = 0.0;
    for (Index i = 0; i < r.dim(); ++i) first += p[i] * r.rho_tilde_th.log_weights()[i];
    const RealMatrix w = overlap_weights(r.rho_tau_th.vectors(), r.rho_tau.vectors());
    const RealVector marg = w * p;
    double second = 0.0;
    for (Index j = 0; j < r.dim(); ++j) second += marg[j] * r.rho_tau_th.log_weights()[j];
    a.lambda_qu = first - second;
  }

  // beta F(rho) with the Htau energy; beta F(rho_th) = -ln Z_tau.
  auto beta_f = [&](const DensityMatrix& rho) {
    return beta * expectation(rho, r.Htau) - von_neumann_entropy(rho);
  };
  const double f_tau = beta_f(r.rho_tau);
  const double f_deph = beta_f(r.rho_tau_dephased);
  const double f_tilde = beta_f(r.rho_tilde_th);
  const double f_th = -r.log_z_tau;
  AverageSplit& b = f.free_energy;
  b.sigma = f_tau - f_th;
  b.gamma_cl = f_deph - f_th;
  b.gamma_qu = f_tau - f_deph;
  b.lambda_cl = f_tau - f_tilde;
  b.lambda_qu = f_tilde - f_th;
  return f;
}

namespace detail {

inline void cross_check(const char* name, double x, double y, double tol) {
  if (std::isinf(x) || std::isinf(y)) {
    if (x == y) return;
  } else if (std::abs(x - y) <= tol * std::max(1.0, std::abs(x))) {
    return;
  }
  std::ostringstream os;
  os.precision(17);
  os << "cross-check failed for " << name << ": " << x << " vs " << y;
  throw CrossCheckError(os.str());
}

}  // namespace detail

inline constexpr double kCrossCheckTol = 1e-7;

// Relative-entropy values, after both cross-checks and the sign checks.
inline AverageSplit average_split(const ReferenceStates& r) {
  const SplitForms f = split_forms(r);
  const AverageSplit& a = f.entropic;
  const AverageSplit& b = f.free_energy;
  detail::cross_check("sigma", a.sigma, b.sigma, kCrossCheckTol);
  detail::cross_check("gamma_cl", a.gamma_cl, b.gamma_cl, kCrossCheckTol);
  detail::cross_check("gamma_qu", a.gamma_qu, b.gamma_qu, kCrossCheckTol);
  detail::cross_check("lambda_cl", a.lambda_cl, b.lambda_cl, kCrossCheckTol);
  detail::cross_check("lambda_qu", a.lambda_qu, b.lambda_qu, kCrossCheckTol);
  const double floor = -1e-10 * std::max(1.0, std::abs(a.sigma));
  for (auto [name, v] : {std::pair{"sigma", a.sigma}, std::pair{"gamma_cl", a.gamma_cl},
                         std::pair{"gamma_qu", a.gamma_qu}, std::pair{"lambda_cl", a.lambda_cl},
                         std::pair{"lambda_qu", a.lambda_qu}}) {
    if (v < floor) {
      std::ostringstream os;
      os.precision(17);
      os << "negative " << name << " = " << v;
      throw CrossCheckError(os.str());
    }
  }
  return a;
}

inline AverageSplit average_split(const WorkProtocol& p) {
  return average_split(reference_states(p));
}

inline double sigma(const WorkProtocol& p) { return average_split(p).sigma; }

inline std::pair<double, double> gamma_split(const WorkProtocol& p) {
  const AverageSplit a = average_split(p);
  return {a.gamma_cl, a.gamma_qu};
}

inline std::pair<double, double> lambda_split(const WorkProtocol& p) {
  const AverageSplit a = average_split(p);
  return {a.lambda_cl, a.lambda_qu};
}

}  // namespace qsplit

#endif  // QSPLIT_ENTROPY_SPLITTING_HPP_
