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

// qsplit command-line front end.
//
//   qsplit sweep  --config sweep.json [--format csv|json] [--out file]
//   qsplit preset fig4 [--out dir]
//   qsplit check  --suite all [--seed 1]
//
// Exit status: 0 success, 1 failed check or evaluation error, 2 usage error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qsplit/reports/checks.hpp"
#include "qsplit/reports/presets.hpp"
#include "qsplit/reports/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using qsplit::reports::json;

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QSPLIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw qsplit::reports::UsageError("QSPLIT_THREADS: expected a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_output(const qsplit::reports::Table& table, const std::string& format,
                  const std::string& path, const json& config, std::uint64_t seed,
                  double wall, int threads) {
  if (path.empty() || path == "-") {
    qsplit::reports::write_table(table, format, std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  qsplit::reports::write_table(table, format, os);
  std::ofstream ms(path + ".manifest.json");
  ms << qsplit::reports::make_manifest(config, seed, wall, threads, fs::path(path).filename())
            .dump(2)
     << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy production and its splittings for unitary work protocols"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format, out;
  int threads = 0, quad_nodes = 0;
  std::uint64_t seed = 1;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out, "Output file (sweep) or directory (preset)");
  app.add_option("--threads", threads, "Worker threads (default: QSPLIT_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes for TFIM integrals")
      ->check(CLI::Range(2, 1 << 20));
  app.add_option("--seed", seed, "Seed for random-protocol suites");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
  std::string config_path;
  sweep->add_option("--config", config_path, "Sweep config (JSON)")->required();

  auto* preset = app.add_subcommand("preset", "Emit the data set of one figure");
  std::string preset_name;
  preset->add_option("name", preset_name, "fig1..fig6")
      ->required()
      ->check(CLI::IsMember(qsplit::reports::preset_names()));

  auto* check = app.add_subcommand("check", "Run invariant suites on random protocols");
  std::string suite = "all";
  check->add_option("--suite", suite, "Suite name or 'all'")
      ->check(CLI::IsMember([] {
        auto s = qsplit::reports::check_suites();
        s.push_back("all");
        return s;
      }()));

  CLI11_PARSE(app, argc, argv);

  try {
    const auto t0 = std::chrono::steady_clock::now();
    const int nthreads = resolve_threads(threads);
    if (*sweep) {
      std::ifstream is(config_path);
      if (!is) throw qsplit::reports::UsageError("--config: cannot open " + config_path);
      json config;
      try {
        config = json::parse(is);
      } catch (const json::exception& e) {
        throw qsplit::reports::UsageError(std::string("--config: ") + e.what());
      }
      if (!format.empty()) config["format"] = format;
      if (quad_nodes > 0) config["quad_nodes"] = quad_nodes;
      const auto spec = qsplit::reports::parse_sweep_spec(config);
      const auto table = qsplit::reports::run_sweep(spec, nthreads);
      write_output(table, spec.format, out, config, seed, seconds_since(t0), nthreads);
      return 0;
    }
    if (*preset) {
      const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
      fs::create_directories(dir);
      const auto outputs =
          qsplit::reports::run_preset(preset_name, nthreads, quad_nodes > 0 ? quad_nodes : 512);
      const std::string fmt = format.empty() ? "csv" : format;
      for (const auto& o : outputs) {
        fs::path file = dir / o.file;
        if (fmt == "json") file.replace_extension(".json");
        write_output(o.table, fmt, file.string(), o.config, seed, seconds_since(t0), nthreads);
        std::cout << file.string() << '\n';
      }
      return 0;
    }
    const auto results = qsplit::reports::run_checks(suite, seed);
    bool ok = true;
    json report = json::array();
    for (const auto& r : results) {
      std::cout << r.to_json().dump() << '\n';
      report.push_back(r.to_json());
      ok = ok && r.passed;
    }
    if (!out.empty()) {
      std::ofstream os(out);
      os << report.dump(2) << '\n';
      std::ofstream ms(out + ".manifest.json");
      ms << qsplit::reports::make_manifest({{"suite", suite}}, seed, seconds_since(t0), nthreads,
                                           fs::path(out).filename())
                .dump(2)
         << '\n';
    }
    return ok ? 0 : 1;
  } catch (const qsplit::reports::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
