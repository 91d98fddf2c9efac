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

#ifndef QSPLIT_REPORTS_CHECKS_HPP_
#define QSPLIT_REPORTS_CHECKS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qsplit/random_protocols.hpp"
#include "qsplit/reports/sweep.hpp"
#include "qsplit/trajectory_statistics.hpp"

namespace qsplit::reports {

struct CheckResult {
  std::string suite;
  std::string invariant;
  bool passed = false;
  int cases = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;

  json to_json() const {
    json j;
    j["suite"] = suite;
    j["invariant"] = invariant;
    j["passed"] = passed;
    j["cases"] = cases;
    j["worst"] = worst;
    j["tolerance"] = tolerance;
    if (!detail.empty()) j["detail"] = detail;
    return j;
  }
};

namespace detail {

inline CheckResult finish(std::string suite, std::string invariant, int cases, double worst,
                          double tol) {
  return {std::move(suite), std::move(invariant), worst <= tol, cases, worst, tol, ""};
}

inline std::vector<CheckResult> check_fluctuation_theorems(std::uint64_t seed) {
  RandomProtocols gen(seed);
  double worst = 0.0;
  const int n = 200;
  for (int c = 0; c < n; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 16), gen.uniform(0.1, 10.0));
    worst = std::max(worst, fluctuation_theorem_check(build_table(p)).worst_deviation);
  }
  return {finish("fluctuation-theorems", "<exp(-x)> = 1 for sigma, gamma_cl, gamma_qu, lambda_cl",
                 n, worst, kFluctuationTol)};
}

inline std::vector<CheckResult> check_trajectory_table(std::uint64_t seed) {
  RandomProtocols gen(seed);
  const int n = 100;
  double marg = 0.0, reversal = 0.0, ratio = 0.0, means = 0.0, additive = 0.0;
  for (int c = 0; c < n; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 16), gen.uniform(0.1, 10.0));
    const ReferenceStates r = reference_states(p);
    const TrajectoryTable t = build_table(r);
    const RealMatrix pb = backward_probabilities(p, r);
    marg = std::max(marg, (t.forward.colwise().sum().transpose() - t.q).cwiseAbs().maxCoeff());
    for (Index i = 0; i < t.dim; ++i) {
      for (Index j = 0; j < t.dim; ++j) {
        reversal = std::max(reversal, std::abs(pb(i, j) / t.ptau[j] - t.overlap(j, i)));
        if (t.forward(i, j) > 1e-200 && pb(i, j) > 1e-200)
          ratio = std::max(ratio, std::abs(std::log(t.forward(i, j) / pb(i, j)) - t.sigma(i, j)));
        additive = std::max({additive,
                             std::abs(t.gamma_cl(i, j) + t.gamma_qu(i, j) - t.sigma(i, j)),
                             std::abs(t.lambda_cl(i, j) + t.lambda_qu(i, j) - t.sigma(i, j))});
      }
    }
    const AverageSplit a = average_split(r);
    for (Quantity q : kAllQuantities)
      means = std::max(means, std::abs(t.mean(q) - select(a, q)));
  }
  return {finish("trajectory-table", "sum_i P_F[i,j] = q_j", n, marg, 1e-10),
          finish("trajectory-table", "time-reversal symmetry of overlaps", n, reversal, 1e-10),
          finish("trajectory-table", "ln P_F / P_B = sigma", n, ratio, 1e-8),
          finish("trajectory-table", "element-wise additivity of both splits", n, additive, 1e-10),
          finish("trajectory-table", "first moments equal the averages", n, means, 1e-9)};
}

inline std::vector<CheckResult> check_lambda_qu_positivity(std::uint64_t seed) {
  RandomProtocols gen(seed);
  double most_negative = 0.0;
  int mismatches = 0;
  const int n_random = 400, n_commuting = 100;
  for (int c = 0; c < n_random + n_commuting; ++c) {
    const Index d = gen.uniform_int(2, 16);
    const double beta = gen.uniform(0.1, 10.0);
    const WorkProtocol p = c < n_random ? gen.protocol(d, beta) : gen.commuting_protocol(d, beta);
    const ReferenceStates r = reference_states(p);
    const double lqu = average_split(r).lambda_qu;
    most_negative = std::max(most_negative, -lqu);
    const Matrix rho = r.rho_tau.matrix();
    const double comm = (p.Htau.matrix() * rho - rho * p.Htau.matrix()).norm();
    if ((lqu < 1e-8) != (comm < 1e-6)) ++mismatches;
  }
  CheckResult iff = finish("lambda-qu-positivity", "lambda_qu = 0 iff [Htau, rho_tau] = 0",
                           n_random + n_commuting, mismatches, 0.0);
  return {finish("lambda-qu-positivity", "lambda_qu >= 0", n_random + n_commuting, most_negative,
                 1e-10),
          iff};
}

inline std::vector<CheckResult> check_additivity(std::uint64_t seed) {
  RandomProtocols gen(seed);
  const int n = 200;
  double sums = 0.0, forms = 0.0;
  for (int c = 0; c < n; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 32), gen.uniform(0.1, 20.0));
    const SplitForms f = split_forms(reference_states(p));
    const AverageSplit& a = f.entropic;
    sums = std::max({sums, std::abs(a.gamma_cl + a.gamma_qu - a.sigma),
                     std::abs(a.lambda_cl + a.lambda_qu - a.sigma)});
    for (Quantity q : kAllQuantities)
      forms = std::max(forms, std::abs(select(a, q) - select(f.free_energy, q)));
  }
  return {finish("additivity", "gamma_cl + gamma_qu = sigma = lambda_cl + lambda_qu", n, sums,
                 1e-9),
          finish("additivity", "relative-entropy forms equal free-energy forms", n, forms, 1e-9)};
}

inline std::vector<CheckResult> check_cgf_equivalence(std::uint64_t seed) {
  RandomProtocols gen(seed);
  const int n = 50;
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    const WorkProtocol p = gen.protocol(gen.uniform_int(2, 16), gen.uniform(0.1, 10.0));
    const ReferenceStates r = reference_states(p);
    const TrajectoryTable t = build_table(r);
    for (int k = 0; k < 20; ++k) {
      const double v = gen.uniform(-1.0, 2.0), u = gen.uniform(-1.0, 2.0);
      for (CgfKind kind : {CgfKind::kSigma, CgfKind::kGamma, CgfKind::kLambda})
        worst = std::max(worst, std::abs(cgf_trace(r, kind, v, u).value -
                                         cgf_empirical(t, kind, v, u).value));
    }
  }
  return {finish("cgf-equivalence", "trace-formula CGF equals empirical CGF", n, worst, 1e-9)};
}

// A unitary perturbed by 1e-3; the table must refuse it.
inline std::vector<CheckResult> check_negative_control(std::uint64_t seed) {
  RandomProtocols gen(seed);
  WorkProtocol p = gen.protocol(4, 1.0);
  Matrix u = p.U.matrix();
  u(0, 0) += 1e-3;
  p.U = UnitaryMatrix::unchecked(u);
  CheckResult r{"negative-control", "corrupted unitary is accepted as a valid protocol", true, 1,
                0.0, 0.0, ""};
  try {
    const TrajectoryTable t = build_table(p);
    r.detail = "table built without complaint";
  } catch (const InvariantViolation& e) {
    r.passed = false;
    r.detail = e.what();
  }
  return {r};
}

}  // namespace detail

inline std::vector<std::string> check_suites() {
  return {"fluctuation-theorems", "trajectory-table", "lambda-qu-positivity",
          "additivity",           "cgf-equivalence",  "negative-control"};
}

// "all" runs every suite except the negative control.
inline std::vector<CheckResult> run_checks(const std::string& suite, std::uint64_t seed) {
  const std::vector<std::pair<std::string, std::function<std::vector<CheckResult>(std::uint64_t)>>>
      table = {{"fluctuation-theorems", detail::check_fluctuation_theorems},
               {"trajectory-table", detail::check_trajectory_table},
               {"lambda-qu-positivity", detail::check_lambda_qu_positivity},
               {"additivity", detail::check_additivity},
               {"cgf-equivalence", detail::check_cgf_equivalence},
               {"negative-control", detail::check_negative_control}};
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& [name, fn] : table) {
    if (suite == name || (suite == "all" && name != "negative-control")) {
      found = true;
      for (CheckResult& r : fn(seed)) out.push_back(std::move(r));
    }
  }
  if (!found) throw UsageError("suite: unknown suite '" + suite + "'");
  return out;
}

}  // namespace qsplit::reports

#endif  // QSPLIT_REPORTS_CHECKS_HPP_
