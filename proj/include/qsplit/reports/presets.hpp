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

#ifndef QSPLIT_REPORTS_PRESETS_HPP_
#define QSPLIT_REPORTS_PRESETS_HPP_

#include <string>
#include <vector>

#include "qsplit/reports/sweep.hpp"

namespace qsplit::reports {

struct PresetOutput {
  std::string file;  // name relative to the output directory
  Table table;
  json config;
};

inline std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
}

// Sweep configurations with the plotted parameters hard-coded.
inline json preset_config(const std::string& name) {
  const json log_beta = {{"start", 0.05}, {"stop", 12.0}, {"count", 60}, {"spacing", "log"}};
  if (name == "fig1") {
    return {{"model", "qubit-quench"},
            {"params", {{"omega", 1.0}, {"theta", 1.1}}},
            {"grid", {{"beta", log_beta}}},
            {"outputs", {"gamma_cl", "gamma_qu", "lambda_cl", "lambda_qu"}}};
  }
  if (name == "fig2") {
    return {{"model", "qubit-pulse"},
            {"params", {{"omega", 1.0}, {"hx", 1.3}}},
            {"grid", {{"tau", {0.4, 1.0}}, {"beta", log_beta}}},
            {"outputs", {"sigma", "gamma_cl", "gamma_qu", "lambda_cl", "lambda_qu"}}};
  }
  if (name == "fig3") {
    return {{"model", "qubit-quench"},
            {"params", {{"omega", 1.0}, {"theta", 0.1}}},
            {"grid",
             {{"beta", {{"start", 0.01}, {"stop", 300.0}, {"count", 200}, {"spacing", "log"}}}}},
            {"outputs", {"max_abs_s", "max_abs_f", "max_abs_f_tilde"}}};
  }
  if (name == "fig4") {
    return {{"model", "tfim"},
            {"params", {{"delta_g", 0.01}}},
            {"grid",
             {{"beta", {4.0, 8.0, 16.0, 32.0}},
              {"g0", {{"start", 0.5}, {"stop", 1.5}, {"count", 41}}}}},
            {"outputs", {"lambda_cl", "lambda_qu", "gamma_cl", "gamma_qu"}},
            {"scaling", "beta*delta_g^2"}};
  }
  const json d_grid = {10, 25, 50, 100, 150, 200, 250, 300, 350, 400};
  auto cumulant_outputs = [](const std::vector<std::string>& qs) {
    json out = json::array();
    for (const auto& q : qs)
      for (int n = 1; n <= 4; ++n) out.push_back("kappa" + std::to_string(n) + "_" + q);
    return out;
  };
  if (name == "fig5" || name == "fig6") {
    const std::vector<std::string> qs = name == "fig5"
                                            ? std::vector<std::string>{"lambda_cl", "lambda_qu"}
                                            : std::vector<std::string>{"gamma_cl", "gamma_qu"};
    return {{"model", "macrospin"},
            {"params", {{"hz", 1.0}, {"hx", 0.5}, {"tau", 2.0}}},
            {"grid", {{"beta", {1.0, 2.5}}, {"d", d_grid}}},
            {"outputs", cumulant_outputs(qs)}};
  }
  throw UsageError("preset: unknown preset '" + name + "' (expected fig1..fig6)");
}

inline Table histogram_table(const Histogram& h) {
  Table t;
  t.columns = {"bin_left", "bin_right", "probability"};
  for (std::size_t b = 0; b < h.probability.size(); ++b)
    t.rows.push_back({h.edges[b], h.edges[b + 1], h.probability[b]});
  return t;
}

inline std::vector<PresetOutput> run_preset(const std::string& name, int threads,
                                            int quad_nodes = 512) {
  json config = preset_config(name);
  if (name == "fig4") config["quad_nodes"] = quad_nodes;
  std::vector<PresetOutput> out;
  const SweepSpec spec = parse_sweep_spec(config);
  out.push_back({name + ".csv", run_sweep(spec, threads), config});
  if (name == "fig5" || name == "fig6") {
    // Distributions at d = 200 for the two plotted temperatures.
    const std::vector<Quantity> qs =
        name == "fig5" ? std::vector<Quantity>{Quantity::kLambdaCl, Quantity::kLambdaQu}
                       : std::vector<Quantity>{Quantity::kGammaCl, Quantity::kGammaQu};
    for (double beta : {1.0, 2.5}) {
      const MacrospinParams mp{200, 1.0, 0.5, 2.0, beta};
      const TrajectoryTable t = build_table(macrospin_protocol(mp));
      for (Quantity q : qs) {
        const Histogram h = histogram(distribution(t, q));
        const std::string tag = beta == 1.0 ? "1" : "2.5";
        json cfg = {{"model", "macrospin"},
                    {"params", {{"d", 200}, {"hz", 1.0}, {"hx", 0.5}, {"tau", 2.0}, {"beta", beta}}},
                    {"histogram", std::string(to_string(q))},
                    {"bin_width", h.bin_width},
                    {"binning", "freedman-diaconis"}};
        out.push_back({name + "_hist_" + std::string(to_string(q)) + "_beta" + tag + ".csv",
                       histogram_table(h), cfg});
      }
    }
  }
  return out;
}

}  // namespace qsplit::reports

#endif  // QSPLIT_REPORTS_PRESETS_HPP_
