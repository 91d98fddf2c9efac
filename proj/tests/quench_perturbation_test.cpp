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

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qsplit/entropy_splitting.hpp"
#include "qsplit/model_finite.hpp"
#include "qsplit/quench_perturbation.hpp"
#include "qsplit/random_protocols.hpp"

namespace qsplit {
namespace {

HermitianMatrix random_spectrum_h0(RandomProtocols& gen, Index d) {
  // Well separated levels keep the expansions in their convergent regime.
  RealVector e(d);
  for (Index i = 0; i < d; ++i) e[i] = static_cast<double>(i) + gen.uniform(0.0, 0.5);
  const Matrix v = gen.unitary(d).matrix();
  return HermitianMatrix(Matrix(v * e.cast<Complex>().asDiagonal() * v.adjoint()));
}

WorkProtocol quench(const HermitianMatrix& h0, const HermitianMatrix& dh, double eps, double beta) {
  return {h0, h0 + eps * dh, UnitaryMatrix::identity(h0.dim()), beta};
}

TEST(PerturbativeSplit, AgreesWithFdrForm) {
  RandomProtocols gen(51);
  for (int c = 0; c < 20; ++c) {
    const Index d = gen.uniform_int(2, 10);
    const PerturbationInput in{random_spectrum_h0(gen, d), gen.hermitian(d), gen.uniform(0.1, 4.0)};
    const PerturbativeSplit s = perturbative_split(in);
    const FdrDecomposition f = fdr_decomposition(in);
    EXPECT_NEAR(s.sigma, f.sigma, 1e-10);
    EXPECT_NEAR(s.lambda_cl, f.lambda_cl, 1e-10);
    EXPECT_NEAR(s.lambda_qu, f.lambda_qu, 1e-10);
    EXPECT_NEAR(s.lambda_cl + s.lambda_qu, s.sigma, 1e-10);
    EXPECT_NEAR(f.variance_term - f.q_term, f.sigma, 1e-12);
    EXPECT_NEAR(f.variance_term, 0.5 * in.beta * in.beta * variance(gibbs_state(in.H0, in.beta).state, in.dH),
                1e-12);
    EXPECT_GE(f.q_term, 0.0);
    EXPECT_GE(s.lambda_qu, -1e-14);
  }
}

TEST(PerturbativeSplit, SecondOrderAccuracy) {
  // The error of the quadratic form is third order: halving the strength
  // divides it by about eight.
  RandomProtocols gen(52);
  const Index d = 5;
  const HermitianMatrix h0 = random_spectrum_h0(gen, d);
  const HermitianMatrix dh = gen.hermitian(d);
  const double beta = 0.8;
  auto err = [&](double eps) {
    const AverageSplit a = average_split(quench(h0, dh, eps, beta));
    const PerturbativeSplit s = perturbative_split({h0, eps * dh, beta});
    return std::array<double, 3>{a.sigma - s.sigma, a.lambda_cl - s.lambda_cl, a.lambda_qu - s.lambda_qu};
  };
  const auto e1 = err(0.02), e2 = err(0.01);
  for (int k = 0; k < 3; ++k) {
    const double ratio = e1[k] / e2[k];
    EXPECT_GT(ratio, 6.0) << k;
    EXPECT_LT(ratio, 10.0) << k;
  }
}

TEST(PerturbativeSplit, CommutingPerturbationHasNoCoherentPart) {
  RandomProtocols gen(53);
  const Matrix v = gen.unitary(4).matrix();
  const HermitianMatrix h0 = gen.diagonal_in(v, -2.0, 2.0);
  const HermitianMatrix dh = gen.diagonal_in(v, -1.0, 1.0);
  const FdrDecomposition f = fdr_decomposition({h0, dh, 1.5});
  EXPECT_NEAR(f.q_term, 0.0, 1e-14);
  EXPECT_NEAR(f.lambda_qu, 0.0, 1e-14);
  const SplitPerturbation sp = split_perturbation({h0, dh, 1.5});
  EXPECT_LT((sp.dH_d.matrix() - dh.matrix()).norm(), 1e-12);
  EXPECT_LT(sp.dH_c.matrix().norm(), 1e-12);
}

TEST(PerturbativeSplit, RejectsDegenerateH0) {
  try {
    perturbative_split({HermitianMatrix::identity(3), HermitianMatrix::identity(3), 1.0});
    FAIL() << "accepted a degenerate H0";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("non-degenerate H0"), std::string::npos);
  }
}

TEST(ExpansionCoefficients, MatchExactPopulations) {
  RandomProtocols gen(54);
  const Index d = 4;
  const HermitianMatrix h0 = random_spectrum_h0(gen, d);
  const HermitianMatrix dh = gen.hermitian(d);
  const double beta = 0.7;
  // Residuals of p_tilde = p0(1 - f_tilde), p_tau = p0(1 - f), q = p0(1 - s).
  auto residual = [&](double eps) {
    const ExpansionCoefficients c = expansion_coefficients({h0, eps * dh, beta});
    const ReferenceStates r = reference_states(quench(h0, dh, eps, beta));
    const RealVector pt = r.rho_tilde_th.weights();
    const RealVector pf = r.rho_tau_th.weights();
    const RealVector q = r.rho_tau_dephased.weights();
    // rho_tilde is indexed in the evolved basis (ascending H0 energy, U = 1);
    // the final-basis states are ascending in Htau energy.
    std::array<double, 3> out{};
    for (Index j = 0; j < d; ++j) {
      out[0] = std::max(out[0], std::abs(pt[j] - c.p0[j] * (1 - c.f_tilde[j])));
      out[1] = std::max(out[1], std::abs(pf[j] - c.p0[j] * (1 - c.f[j])));
      out[2] = std::max(out[2], std::abs(q[j] - c.p0[j] * (1 - c.s[j])));
    }
    return out;
  };
  const auto r1 = residual(0.02), r2 = residual(0.01);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LT(r1[k], 1e-4) << k;
    const double ratio = r1[k] / r2[k];
    EXPECT_GT(ratio, 6.0) << k;
    EXPECT_LT(ratio, 10.0) << k;
  }
}

TEST(ExpansionCoefficients, QubitClosedForms) {
  const double w = 1.0, th = 0.1;
  for (double beta : {0.1, 1.0, 3.0, 10.0}) {
    const double x = beta * w, t = std::tanh(x);
    const PerturbationInput in{HermitianMatrix(Matrix(w * pauli::z())),
                               HermitianMatrix(Matrix(w * ((std::cos(th) - 1) * pauli::z() +
                                                           std::sin(th) * pauli::x()))),
                               beta};
    const ExpansionCoefficients c = expansion_coefficients(in);
    const double h2 = std::pow(std::sin(th / 2), 2);
    const double s1 = (1 - std::exp(2 * x)) * std::pow(std::sin(th) / 2, 2);
    const double ft1 = 2 * x * h2 * (1 + t) * (1 + 2 * x * h2 * t);
    EXPECT_NEAR(c.s[1], s1, 1e-12 * std::max(1.0, std::abs(s1)));
    // Index 1 is the excited level; the population there grows, so f_tilde
    // is negative with the magnitude above.
    EXPECT_NEAR(c.f_tilde[1], -ft1, 1e-12 * std::max(1.0, ft1));
    EXPECT_NEAR(c.f[1], c.f_tilde[1] + 0.5 * x * std::sin(th) * std::sin(th) * (1 + t), 1e-12);
  }
}

TEST(AnalyticityReport, QubitThresholdOrdering) {
  // |s| crosses one near beta omega = 3, f_tilde near 73 and f near 141.
  auto report = [](double x) {
    return analyticity_report(PerturbationInput{
        HermitianMatrix(Matrix(pauli::z())),
        HermitianMatrix(Matrix((std::cos(0.1) - 1) * pauli::z() + std::sin(0.1) * pauli::x())), x});
  };
  EXPECT_TRUE(report(2.9).s_ok);
  EXPECT_FALSE(report(3.1).s_ok);
  EXPECT_TRUE(report(72.0).f_tilde_ok);
  EXPECT_FALSE(report(74.0).f_tilde_ok);
  EXPECT_TRUE(report(140.0).f_ok);
  EXPECT_FALSE(report(142.0).f_ok);
  EXPECT_FALSE(report(142.0).all_ok());
}

TEST(ExpansionCoefficients, RejectNearDegenerateLevels) {
  RealVector e(3);
  e << 0.0, 1.0, 1.0 + 1e-13;
  EXPECT_THROW(expansion_coefficients({HermitianMatrix::diagonal(e), HermitianMatrix::identity(3), 1.0}),
               std::invalid_argument);
}

TEST(PerturbativeCgf, BoundaryValues) {
  RandomProtocols gen(55);
  for (int c = 0; c < 5; ++c) {
    const Index d = gen.uniform_int(2, 8);
    const PerturbationInput in{random_spectrum_h0(gen, d), gen.hermitian(d), gen.uniform(0.2, 3.0)};
    const PerturbativeCgf k0 = perturbative_cgf(in, 0.0, 0.0);
    EXPECT_NEAR(k0.K_lambda_cl, 0.0, 1e-15);
    EXPECT_NEAR(k0.K_lambda_qu, 0.0, 1e-15);
    EXPECT_NEAR(perturbative_cgf(in, 1.0, 1.0).K_lambda_cl, 0.0, 1e-14);
    // The area term closes the u = 1 gap of the variance term.
    EXPECT_NEAR(perturbative_cgf(in, 1.0, 1.0).K_lambda_qu, 0.0, 1e-9);
    EXPECT_LT(std::abs(perturbative_cgf(in, 0.0, 0.6, 32).K_lambda_qu -
                       perturbative_cgf(in, 0.0, 0.6, 64).K_lambda_qu),
              1e-9);
  }
}

TEST(PerturbativeCgf, SlopeAtOriginIsMinusMean) {
  RandomProtocols gen(56);
  const PerturbationInput in{random_spectrum_h0(gen, 4), gen.hermitian(4), 1.3};
  const PerturbativeSplit s = perturbative_split(in);
  const double h = 1e-4;
  EXPECT_NEAR(-(perturbative_cgf(in, h, 0.0).K_lambda_cl - perturbative_cgf(in, -h, 0.0).K_lambda_cl) / (2 * h),
              s.lambda_cl, 1e-8);
  EXPECT_NEAR(-(perturbative_cgf(in, 0.0, h).K_lambda_qu - perturbative_cgf(in, 0.0, -h).K_lambda_qu) / (2 * h),
              s.lambda_qu, 1e-7);
}

TEST(QuenchSigma, MatchesGenericEngine) {
  RandomProtocols gen(57);
  const HermitianMatrix h0 = gen.hermitian(5), h1 = gen.hermitian(5);
  EXPECT_NEAR(quench_sigma_exact(h0, h1, 1.1),
              average_split(WorkProtocol{h0, h1, UnitaryMatrix::identity(5), 1.1}).sigma, 1e-11);
  EXPECT_NEAR(equilibrium_free_energy(h0, 1.1),
              -std::log(oracle::expm(-1.1 * h0.matrix()).trace().real()) / 1.1, 1e-12);
}

TEST(SusceptibilitySigma, ReproducesSecondDerivative) {
  // F(g) = -ln(2 cosh(beta g)) / beta for a qubit with H = g sz.
  const double beta = 1.3, dg = 0.01, h = 0.05;
  std::vector<double> g, f;
  for (int k = 0; k <= 20; ++k) {
    g.push_back(0.2 + k * h);
    f.push_back(equilibrium_free_energy(HermitianMatrix(Matrix(g.back() * pauli::z())), beta));
  }
  const double g0 = g[10];
  const double exact_second = -beta / std::pow(std::cosh(beta * g0), 2);
  const double expected = -0.5 * beta * dg * dg * exact_second;
  EXPECT_NEAR(susceptibility_sigma(g, f, g0, dg, beta), expected, 1e-4 * expected);
  // The exact quench differs at third order in dg.
  auto err = [&](double x) {
    return susceptibility_sigma(g, f, g0, x, beta) -
           quench_sigma_exact(HermitianMatrix(Matrix(g0 * pauli::z())),
                              HermitianMatrix(Matrix((g0 + x) * pauli::z())), beta);
  };
  const double ratio = err(dg) / err(dg / 2);
  EXPECT_GT(ratio, 7.5);
  EXPECT_LT(ratio, 8.5);
  EXPECT_THROW(susceptibility_sigma(g, f, g0 + 0.01, dg, beta), std::invalid_argument);
  EXPECT_THROW(susceptibility_sigma({0, 1, 2}, {0, 1, 2}, 1.0, dg, beta), std::invalid_argument);
  EXPECT_THROW(susceptibility_sigma(g, f, g.front(), dg, beta), std::invalid_argument);
}

}  // namespace
}  // namespace qsplit
