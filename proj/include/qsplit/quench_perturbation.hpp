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

#ifndef QSPLIT_QUENCH_PERTURBATION_HPP_
#define QSPLIT_QUENCH_PERTURBATION_HPP_

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qsplit/operator_algebra.hpp"
#include "qsplit/quadrature.hpp"

namespace qsplit {

// Sudden quench H0 -> H0 + dH with U = identity.
struct PerturbationInput {
  HermitianMatrix H0;
  HermitianMatrix dH;
  double beta = 0.0;
};

namespace detail {

struct PerturbationBasis {
  SpectralDecomposition spectrum;
  DensityMatrix rho0;
  Matrix dh;  // dH in the H0 eigenbasis
};

inline PerturbationBasis perturbation_basis(const PerturbationInput& in) {
  require_same_dim(in.H0.dim(), in.dH.dim(), "PerturbationInput");
  if (!(in.beta >= 0.0) || !std::isfinite(in.beta))
    throw std::invalid_argument("PerturbationInput: beta must be finite and non-negative");
  PerturbationBasis b;
  b.spectrum = spectral_decompose(in.H0);
  if (b.spectrum.cluster_count != in.H0.dim())
    throw std::invalid_argument(
        "PerturbationInput: H0 has a degenerate spectrum; the perturbative expansions assume "
        "non-degenerate H0");
  b.rho0 = gibbs_from_energies(b.spectrum.eigenvectors, b.spectrum.eigenvalues, in.beta).state;
  b.dh = b.spectrum.eigenvectors.adjoint() * in.dH.matrix() * b.spectrum.eigenvectors;
  return b;
}

inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  return (a.matrix().cwiseProduct(b.matrix().transpose())).sum().real();
}

}  // namespace detail

struct SplitPerturbation {
  HermitianMatrix dH_d;  // dephased in the H0 eigenbasis
  HermitianMatrix dH_c;  // the remainder
};

inline SplitPerturbation split_perturbation(const PerturbationInput& in) {
  const detail::PerturbationBasis b = detail::perturbation_basis(in);
  HermitianMatrix d = dephase(in.dH, b.spectrum);
  return {d, in.dH - d};
}

struct PerturbativeSplit {
  double sigma = 0.0;
  double lambda_cl = 0.0;
  double lambda_qu = 0.0;
};

// Second order in dH:
//   Sigma    = beta^2/2 tr{dH   J[dH - <dH>]}
//   Lambda_cl= beta^2/2 tr{dH_d J[dH_d - <dH_d>]}
//   Lambda_qu= beta^2/2 tr{dH_c J[dH_c]}
inline PerturbativeSplit perturbative_split(const PerturbationInput& in) {
  const detail::PerturbationBasis b = detail::perturbation_basis(in);
  const HermitianMatrix dd = dephase(in.dH, b.spectrum);
  const HermitianMatrix dc = in.dH - dd;
  const Index n = in.dH.dim();
  const double half_b2 = 0.5 * in.beta * in.beta;
  auto centered = [&](const HermitianMatrix& x) {
    return x - expectation(b.rho0, x) * HermitianMatrix::identity(n);
  };
  PerturbativeSplit s;
  s.sigma = half_b2 * detail::trace_product(in.dH, j_superoperator(b.rho0, centered(in.dH)));
  s.lambda_cl = half_b2 * detail::trace_product(dd, j_superoperator(b.rho0, centered(dd)));
  s.lambda_qu = half_b2 * detail::trace_product(dc, j_superoperator(b.rho0, dc));
  return s;
}

struct FdrDecomposition {
  double variance_term = 0.0;  // beta^2/2 Var0[dH]
  double q_term = 0.0;         // beta Q, Q from the skew information of dH
  double sigma = 0.0;          // variance_term - q_term
  double lambda_cl = 0.0;      // beta^2/2 Var0[dH_d]
  double lambda_qu = 0.0;      // beta^2/2 Var0[dH_c] - beta Q
};

inline FdrDecomposition fdr_decomposition(const PerturbationInput& in, int nodes = 48) {
  const detail::PerturbationBasis b = detail::perturbation_basis(in);
  const HermitianMatrix dd = dephase(in.dH, b.spectrum);
  const HermitianMatrix dc = in.dH - dd;
  const double half_b2 = 0.5 * in.beta * in.beta;
  FdrDecomposition f;
  f.variance_term = half_b2 * variance(b.rho0, in.dH);
  // Skew information only sees the part of dH off-diagonal in the rho0
  // eigenbasis, so Q is the same for dH and dH_c.
  f.q_term = in.beta * coherence_measure_Q(b.rho0, dc, in.beta, nodes);
  f.sigma = f.variance_term - f.q_term;
  f.lambda_cl = half_b2 * variance(b.rho0, dd);
  f.lambda_qu = half_b2 * variance(b.rho0, dc) - f.q_term;
  return f;
}

// Population expansions p_tilde = p0 (1 - f_tilde), p_tau = p0 (1 - f),
// q = p0 (1 - s), indices in ascending H0 energy.
struct ExpansionCoefficients {
  RealVector energies;
  RealVector p0;
  RealVector dH_diag;
  RealVector E2;
  RealVector f_tilde;
  RealVector f;
  RealVector s;
};

inline ExpansionCoefficients expansion_coefficients(const PerturbationInput& in) {
  const detail::PerturbationBasis b = detail::perturbation_basis(in);
  const RealVector& e = b.spectrum.eigenvalues;
  const Index n = e.size();
  const double range = e[n - 1] - e[0];
  for (Index j = 1; j < n; ++j) {
    if (e[j] - e[j - 1] < 1e-10 * range) {
      std::ostringstream os;
      os << "expansion_coefficients: near-degenerate levels " << j - 1 << ", " << j
         << " make the perturbative denominators singular";
      throw std::invalid_argument(os.str());
    }
  }
  const double beta = in.beta;
  ExpansionCoefficients c;
  c.energies = e;
  c.p0 = b.rho0.weights();
  c.dH_diag = b.dh.diagonal().real();
  c.E2 = RealVector::Zero(n);
  c.s = RealVector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    for (Index l = 0; l < n; ++l) {
      if (l == j) continue;
      const double gap = e[j] - e[l];
      const double w = std::norm(b.dh(j, l));
      c.E2[j] += w / gap;
      c.s[j] += -std::expm1(-beta * (e[l] - e[j])) / (gap * gap) * w;
    }
  }
  const RealVector& a = c.dH_diag;
  const double mean_a = c.p0.dot(a);
  const double mean_a2 = c.p0.dot(a.cwiseProduct(a));
  const double mean_e2 = c.p0.dot(c.E2);
  c.f_tilde.resize(n);
  c.f.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double da = a[j] - mean_a;
    c.f_tilde[j] = beta * da + beta * beta * mean_a * da -
                   0.5 * beta * beta * (a[j] * a[j] - mean_a2);
    c.f[j] = c.f_tilde[j] + beta * (c.E2[j] - mean_e2);
  }
  return c;
}

struct AnalyticityReport {
  double max_abs_s = 0.0;
  double max_abs_f = 0.0;
  double max_abs_f_tilde = 0.0;
  bool s_ok = true;
  bool f_ok = true;
  bool f_tilde_ok = true;

  bool all_ok() const { return s_ok && f_ok && f_tilde_ok; }
};

inline AnalyticityReport analyticity_report(const ExpansionCoefficients& c) {
  AnalyticityReport r;
  r.max_abs_s = c.s.cwiseAbs().maxCoeff();
  r.max_abs_f = c.f.cwiseAbs().maxCoeff();
  r.max_abs_f_tilde = c.f_tilde.cwiseAbs().maxCoeff();
  r.s_ok = r.max_abs_s < 1.0;
  r.f_ok = r.max_abs_f < 1.0;
  r.f_tilde_ok = r.max_abs_f_tilde < 1.0;
  return r;
}

inline AnalyticityReport analyticity_report(const PerturbationInput& in) {
  return analyticity_report(expansion_coefficients(in));
}

struct PerturbativeCgf {
  double K_lambda_cl = 0.0;
  double K_lambda_qu = 0.0;
};

// K_lcl(v) = beta^2/2 (v^2 - v) Var0[dH_d]
// K_lqu(u) = beta^2/2 (u^2 - u) Var0[dH_c]
//          + beta^2/2 int_0^u dx int_x^(1-x) dy I^y(rho0, dH_c)
inline PerturbativeCgf perturbative_cgf(const PerturbationInput& in, double v, double u,
                                        int nodes = 32) {
  const detail::PerturbationBasis b = detail::perturbation_basis(in);
  const HermitianMatrix dd = dephase(in.dH, b.spectrum);
  const HermitianMatrix dc = in.dH - dd;
  const double half_b2 = 0.5 * in.beta * in.beta;
  const RealMatrix abs2 =
      (b.rho0.vectors().adjoint() * dc.matrix() * b.rho0.vectors()).cwiseAbs2();
  const GaussLegendre rule = gauss_legendre(nodes);
  const double area = integrate(rule, 0.0, u, [&](double x) {
    return integrate(rule, x, 1.0 - x, [&](double y) {
      return detail::skew_in_eigenbasis(abs2, b.rho0.log_weights(), y);
    });
  });
  PerturbativeCgf k;
  k.K_lambda_cl = half_b2 * (v * v - v) * variance(b.rho0, dd);
  k.K_lambda_qu = half_b2 * (u * u - u) * variance(b.rho0, dc) + half_b2 * area;
  return k;
}

// Equilibrium free energy -ln Z / beta.
inline double equilibrium_free_energy(const HermitianMatrix& h, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("equilibrium_free_energy: beta must be positive");
  return -gibbs_state(h, beta).log_partition / beta;
}

// Sigma of the sudden quench H0 -> H1: beta tr{(H1 - H0) rho0} - beta dF.
inline double quench_sigma_exact(const HermitianMatrix& h0, const HermitianMatrix& h1,
                                 double beta) {
  const GibbsState g0 = gibbs_state(h0, beta);
  const GibbsState g1 = gibbs_state(h1, beta);
  return beta * expectation(g0.state, h1 - h0) + g1.log_partition - g0.log_partition;
}

// -(beta/2) dg^2 F''(g0) from F sampled on a uniform grid. g0 must be a grid
// node; the fourth-order five-point stencil is used when both neighbours
// exist on each side, the three-point one otherwise.
inline double susceptibility_sigma(const std::vector<double>& g, const std::vector<double>& f,
                                   double g0, double delta_g, double beta) {
  if (g.size() != f.size()) throw std::invalid_argument("susceptibility_sigma: size mismatch");
  if (g.size() < 5)
    throw std::invalid_argument("susceptibility_sigma: grid too coarse (need at least 5 points)");
  const double h = g[1] - g[0];
  if (!(h > 0.0)) throw std::invalid_argument("susceptibility_sigma: grid must be increasing");
  for (std::size_t k = 2; k < g.size(); ++k)
    if (std::abs((g[k] - g[k - 1]) - h) > 1e-9 * h)
      throw std::invalid_argument("susceptibility_sigma: grid must be uniform");
  const double pos = (g0 - g[0]) / h;
  const auto k = static_cast<long>(std::lround(pos));
  if (std::abs(pos - static_cast<double>(k)) > 1e-6)
    throw std::invalid_argument("susceptibility_sigma: g0 must be a grid node");
  const long n = static_cast<long>(g.size());
  if (k < 1 || k > n - 2)
    throw std::invalid_argument("susceptibility_sigma: g0 must be bracketed by the grid");
  double second;
  if (k >= 2 && k <= n - 3) {
    second = (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) /
             (12.0 * h * h);
  } else {
    second = (f[k - 1] - 2.0 * f[k] + f[k + 1]) / (h * h);
  }
  return -0.5 * beta * delta_g * delta_g * second;
}

}  // namespace qsplit

#endif  // QSPLIT_QUENCH_PERTURBATION_HPP_
