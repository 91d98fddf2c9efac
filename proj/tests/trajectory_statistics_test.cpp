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

#include <gtest/gtest.h>

#include "qsplit/model_finite.hpp"
#include "qsplit/random_protocols.hpp"
#include "qsplit/trajectory_statistics.hpp"

namespace qsplit {
namespace {

DiscreteDistribution atoms(std::initializer_list<Atom> a) { return {"x", a}; }

TEST(Cumulants, SymmetricTwoPoint) {
  const double a = 0.7;
  const CumulantSet k = cumulants(atoms({{-a, 0.5}, {a, 0.5}}));
  EXPECT_NEAR(k[1], 0.0, 1e-16);
  EXPECT_NEAR(k[2], a * a, 1e-15);
  EXPECT_NEAR(k[3], 0.0, 1e-16);
  EXPECT_NEAR(k[4], -2 * std::pow(a, 4), 1e-15);
  EXPECT_THROW(k[5], std::out_of_range);
}

TEST(Cumulants, Bernoulli) {
  const double p = 0.3, q = 1 - p;
  const CumulantSet k = cumulants(atoms({{0.0, q}, {1.0, p}}));
  EXPECT_NEAR(k.kappa1, p, 1e-15);
  EXPECT_NEAR(k.kappa2, p * q, 1e-15);
  EXPECT_NEAR(k.kappa3, p * q * (1 - 2 * p), 1e-15);
  EXPECT_NEAR(k.kappa4, p * q * (1 - 6 * p * q), 1e-15);
}

TEST(Cumulants, InfiniteAtomWithMassDiverges) {
  EXPECT_THROW(cumulants(atoms({{0.0, 0.5}, {kInf, 0.5}})), DivergenceError);
  // Mass below the threshold is dropped.
  const CumulantSet k = cumulants(atoms({{1.0, 1.0 - 1e-16}, {kInf, 1e-16}}));
  EXPECT_NEAR(k.kappa1, 1.0, 1e-15);
}

TEST(Cumulants, ShiftAndScaleBehaviour) {
  const DiscreteDistribution d = atoms({{-1.0, 0.2}, {0.5, 0.3}, {2.0, 0.5}});
  const CumulantSet k = cumulants(d);
  DiscreteDistribution e = d;
  for (Atom& a : e.atoms) a.value = 3.0 * a.value + 1.0;
  const CumulantSet m = cumulants(e);
  EXPECT_NEAR(m.kappa1, 3 * k.kappa1 + 1, 1e-14);
  EXPECT_NEAR(m.kappa2, 9 * k.kappa2, 1e-13);
  EXPECT_NEAR(m.kappa3, 27 * k.kappa3, 1e-12);
  EXPECT_NEAR(m.kappa4, 81 * k.kappa4, 1e-12);
}

TEST(TrajectoryTable, MarginalsAndAdditivity) {
  RandomProtocols gen(41);
  for (int c = 0; c < 30; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 16), gen.uniform(0.1, 8.0));
    const ReferenceStates r = reference_states(p);
    const TrajectoryTable t = build_table(r);
    EXPECT_NEAR(t.forward.sum(), 1.0, 1e-12);
    EXPECT_LT((t.forward.rowwise().sum() - t.p0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((t.forward.colwise().sum().transpose() - t.q).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((t.gamma_cl + t.gamma_qu - t.sigma).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((t.lambda_cl + t.lambda_qu - t.sigma).cwiseAbs().maxCoeff(), 1e-12);
    const AverageSplit a = average_split(r);
    for (Quantity q : kAllQuantities)
      EXPECT_NEAR(t.mean(q), select(a, q), 1e-10 * std::max(1.0, a.sigma)) << to_string(q);
    EXPECT_EQ(t.infinite_weight(Quantity::kSigma), 0.0);
  }
}

TEST(TrajectoryTable, BackwardRatioIsEntropyProduction) {
  RandomProtocols gen(42);
  for (int c = 0; c < 20; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 10), gen.uniform(0.1, 4.0));
    const ReferenceStates r = reference_states(p);
    const TrajectoryTable t = build_table(r);
    const RealMatrix pb = backward_probabilities(p, r);
    EXPECT_NEAR(pb.sum(), 1.0, 1e-12);
    for (Index i = 0; i < t.dim; ++i)
      for (Index j = 0; j < t.dim; ++j)
        if (pb(i, j) > 1e-12)
          EXPECT_NEAR(std::log(t.forward(i, j) / pb(i, j)), t.sigma(i, j), 1e-8);
  }
}

TEST(TrajectoryTable, RejectsNonUnitaryOverlap) {
  RandomProtocols gen(43);
  ReferenceStates r = reference_states(gen.protocol(4, 1.0));
  r.overlap(0, 0) += 1e-3;
  try {
    build_table(r);
    FAIL() << "accepted a non-doubly-stochastic overlap";
  } catch (const InvariantViolation& e) {
    EXPECT_NE(std::string(e.what()).find("doubly-stochastic violation"), std::string::npos);
  }
}

TEST(TrajectoryTable, RequiresPositiveBeta) {
  RandomProtocols gen(44);
  EXPECT_THROW(build_table(gen.protocol(3, 0.0)), std::invalid_argument);
}

TEST(FluctuationTheorems, HoldForRandomProtocols) {
  RandomProtocols gen(45);
  for (int c = 0; c < 50; ++c) {
    const FluctuationReport rep =
        fluctuation_theorem_check(build_table(gen.protocol(gen.uniform_int(2, 24), gen.uniform(0.05, 20.0))));
    EXPECT_TRUE(rep.passed) << rep.worst_deviation;
    EXPECT_LT(rep.worst_deviation, 1e-10);
  }
}

TEST(FluctuationTheorems, LambdaQuIsNotIntegral) {
  const FluctuationReport rep = fluctuation_theorem_check(build_table(qubit_quench_protocol({1.0, 1.1, 2.0})));
  EXPECT_GT(std::abs(rep.averages[4] - 1.0), 1e-3);
}

TEST(FluctuationTheorems, LambdaQuDefectIsThirdOrder) {
  // <exp(-lambda_qu)> - 1 vanishes as the cube of a generic quench strength.
  RandomProtocols gen(45);
  const Index d = 4;
  RealVector e(d);
  for (Index i = 0; i < d; ++i) e[i] = static_cast<double>(i) + gen.uniform(0.0, 0.5);
  const Matrix v = gen.unitary(d).matrix();
  const HermitianMatrix h0(Matrix(v * e.cast<Complex>().asDiagonal() * v.adjoint()));
  const HermitianMatrix dh = gen.hermitian(d, 0.5);
  auto defect = [&](double eps) {
    const WorkProtocol p{h0, h0 + eps * dh, UnitaryMatrix::identity(d), 1.0};
    return fluctuation_theorem_check(build_table(p)).averages[4] - 1.0;
  };
  const double ratio = defect(0.02) / defect(0.01);
  EXPECT_GT(ratio, 7.0);
  EXPECT_LT(ratio, 9.0);
}

TEST(FluctuationTheorems, QubitLambdaQuDefectIsFourthOrder) {
  // The qubit quench has no third-order term.
  auto defect = [](double theta) {
    return fluctuation_theorem_check(build_table(qubit_quench_protocol({1.0, theta, 1.5}))).averages[4] - 1.0;
  };
  const double ratio = defect(0.02) / defect(0.01);
  EXPECT_GT(ratio, 15.0);
  EXPECT_LT(ratio, 17.0);
}

TEST(Distribution, MergesAndSorts) {
  RandomProtocols gen(46);
  const TrajectoryTable t = build_table(qubit_pulse_protocol(1.0, 1.3, 0.4, 1.0));
  const DiscreteDistribution s = distribution(t, Quantity::kSigma);
  EXPECT_EQ(s.label, "sigma");
  EXPECT_NEAR(s.total_probability(), 1.0, 1e-14);
  for (std::size_t k = 1; k < s.atoms.size(); ++k) EXPECT_GT(s.atoms[k].value, s.atoms[k - 1].value);
  // Cyclic qubit protocol: sigma takes the values 0 and +-2 beta omega.
  EXPECT_LE(s.atoms.size(), 3u);
  const DiscreteDistribution l = distribution(t, Quantity::kLambdaCl);
  EXPECT_LE(l.atoms.size(), 2u);
}

TEST(Cgf, TraceMatchesEmpirical) {
  RandomProtocols gen(47);
  for (int c = 0; c < 20; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 12), gen.uniform(0.1, 5.0));
    const ReferenceStates r = reference_states(p);
    const TrajectoryTable t = build_table(r);
    for (CgfKind kind : {CgfKind::kSigma, CgfKind::kGamma, CgfKind::kLambda}) {
      for (int k = 0; k < 5; ++k) {
        const double v = gen.uniform(-1.0, 2.0), u = gen.uniform(-1.0, 2.0);
        const double a = cgf_trace(r, kind, v, u).value, b = cgf_empirical(t, kind, v, u).value;
        EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST(Cgf, EndpointsAndDiagonal) {
  RandomProtocols gen(48);
  const ReferenceStates r = reference_states(gen.protocol(6, 1.4));
  EXPECT_NEAR(cgf_trace(r, CgfKind::kSigma, 0.0).value, 0.0, 1e-13);
  EXPECT_NEAR(cgf_trace(r, CgfKind::kSigma, 1.0).value, 0.0, 1e-13);
  EXPECT_NEAR(cgf_trace(r, CgfKind::kGamma, 1.0, 0.0).value, 0.0, 1e-13);
  EXPECT_NEAR(cgf_trace(r, CgfKind::kGamma, 0.0, 1.0).value, 0.0, 1e-13);
  EXPECT_NEAR(cgf_trace(r, CgfKind::kLambda, 1.0, 0.0).value, 0.0, 1e-13);
  for (double v : {-0.5, 0.3, 1.7}) {
    const double ks = cgf_trace(r, CgfKind::kSigma, v).value;
    EXPECT_NEAR(cgf_trace(r, CgfKind::kGamma, v, v).value, ks, 1e-12);
    EXPECT_NEAR(cgf_trace(r, CgfKind::kLambda, v, v).value, ks, 1e-12);
  }
}

TEST(Cgf, DerivativesGiveCumulants) {
  RandomProtocols gen(49);
  const ReferenceStates r = reference_states(gen.protocol(5, 1.2));
  const CumulantSet k = cumulants(distribution(build_table(r), Quantity::kSigma));
  const double h = 1e-4;
  auto K = [&](double v) { return cgf_trace(r, CgfKind::kSigma, v).value; };
  EXPECT_NEAR(-(K(h) - K(-h)) / (2 * h), k.kappa1, 1e-6);
  EXPECT_NEAR((K(h) - 2 * K(0) + K(-h)) / (h * h), k.kappa2, 1e-5);
}

TEST(Histogram, ProbabilityIsConserved) {
  const TrajectoryTable t = build_table(macrospin_protocol({20, 1.0, 0.5, 2.0, 1.0}));
  for (Quantity q : kAllQuantities) {
    const DiscreteDistribution d = distribution(t, q);
    const Histogram h = histogram(d);
    double s = 0.0;
    for (double x : h.probability) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_EQ(h.edges.size(), h.probability.size() + 1);
    EXPECT_LE(h.edges.front(), d.atoms.front().value);
    EXPECT_GE(h.edges.back(), d.atoms.back().value);
    EXPECT_NEAR(h.bin_width, freedman_diaconis_width(d), 0.0);
  }
}

TEST(Histogram, ExplicitWidthAndErrors) {
  const DiscreteDistribution d = atoms({{0.0, 0.25}, {0.4, 0.25}, {1.0, 0.5}});
  const Histogram h = histogram(d, 0.5);
  ASSERT_EQ(h.probability.size(), 3u);
  EXPECT_DOUBLE_EQ(h.probability[0], 0.5);
  EXPECT_DOUBLE_EQ(h.probability[2], 0.5);
  EXPECT_THROW(histogram(d, 0.0), std::invalid_argument);
  EXPECT_THROW(histogram(atoms({{kInf, 1.0}})), DivergenceError);
  EXPECT_DOUBLE_EQ(weighted_quantile(d, 0.5), 0.4);
}

TEST(Quantity, NamesRoundTrip) {
  for (Quantity q : kAllQuantities) EXPECT_EQ(parse_quantity(to_string(q)), q);
  EXPECT_FALSE(parse_quantity("entropy").has_value());
}

}  // namespace
}  // namespace qsplit
