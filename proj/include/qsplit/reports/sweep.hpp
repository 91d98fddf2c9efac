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

#ifndef QSPLIT_REPORTS_SWEEP_HPP_
#define QSPLIT_REPORTS_SWEEP_HPP_

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qsplit/entropy_splitting.hpp"
#include "qsplit/model_finite.hpp"
#include "qsplit/model_tfim.hpp"
#include "qsplit/quench_perturbation.hpp"
#include "qsplit/trajectory_statistics.hpp"

namespace qsplit::reports {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion =
#ifdef QSPLIT_VERSION
    QSPLIT_VERSION;
#else
    "0.1.0";
#endif

// Bad configuration; the message names the offending field.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sweep produced an invalid value (NaN) or a model evaluation failed.
class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Model { kQubitQuench, kQubitPulse, kTfim, kMacrospin, kCustomMatrix };

inline std::string model_name(Model m) {
  switch (m) {
    case Model::kQubitQuench: return "qubit-quench";
    case Model::kQubitPulse: return "qubit-pulse";
    case Model::kTfim: return "tfim";
    case Model::kMacrospin: return "macrospin";
    case Model::kCustomMatrix: return "custom-matrix";
  }
  return "?";
}

inline std::optional<Model> parse_model(const std::string& s) {
  for (Model m : {Model::kQubitQuench, Model::kQubitPulse, Model::kTfim, Model::kMacrospin,
                  Model::kCustomMatrix})
    if (model_name(m) == s) return m;
  return std::nullopt;
}

// Parameter names per model with their defaults (NaN = required).
inline std::vector<std::pair<std::string, double>> model_parameters(Model m) {
  const double req = std::nan("");
  switch (m) {
    case Model::kQubitQuench: return {{"omega", 1.0}, {"theta", req}, {"beta", req}};
    case Model::kQubitPulse:
      return {{"omega", 1.0}, {"hx", req}, {"tau", req}, {"beta", req}};
    case Model::kTfim: return {{"g0", req}, {"delta_g", req}, {"beta", req}, {"N", 0.0}};
    case Model::kMacrospin:
      return {{"d", req}, {"hz", 1.0}, {"hx", 0.5}, {"tau", 2.0}, {"beta", req}};
    case Model::kCustomMatrix: return {{"beta", req}};
  }
  return {};
}

inline bool is_finite_model(Model m) { return m != Model::kTfim; }

// Output selector vocabulary:
//   sigma gamma_cl gamma_qu lambda_cl lambda_qu      every model
//   lambda_cl_inf lambda_qu_inf                       tfim
//   kappa1..kappa4_<quantity>, ft_<quantity>          finite models
//   max_abs_s max_abs_f max_abs_f_tilde               quench models (U = 1)
//   sigma_closed gamma_qu_closed lambda_qu_closed     qubit-quench
inline bool output_supported(Model m, const std::string& name) {
  if (parse_quantity(name)) return true;
  if (m == Model::kTfim) return name == "lambda_cl_inf" || name == "lambda_qu_inf";
  for (Quantity q : kAllQuantities) {
    const std::string base(to_string(q));
    if (name == "ft_" + base) return true;
    for (int n = 1; n <= 4; ++n)
      if (name == "kappa" + std::to_string(n) + "_" + base) return true;
  }
  if (name == "max_abs_s" || name == "max_abs_f" || name == "max_abs_f_tilde")
    return m == Model::kQubitQuench || m == Model::kCustomMatrix;
  if (name == "sigma_closed" || name == "gamma_qu_closed" || name == "lambda_qu_closed")
    return m == Model::kQubitQuench;
  return false;
}

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct ScaleFactor {
  std::string name;  // empty for a numeric literal
  double literal = 1.0;
  int power = 1;
};

struct SweepSpec {
  Model model = Model::kQubitQuench;
  std::vector<GridAxis> grid;
  std::map<std::string, double> params;
  std::vector<std::string> outputs;
  std::string format = "csv";
  std::string scaling;
  std::vector<ScaleFactor> scale_factors;
  int quad_nodes = 512;
  std::optional<Matrix> H0, Htau, U;
  json source;
};

namespace detail {

inline std::vector<double> parse_axis(const std::string& name, const json& j) {
  const std::string where = "grid." + name;
  std::vector<double> values;
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw UsageError(where + ": list entries must be numbers");
      values.push_back(v.get<double>());
    }
    if (values.empty()) throw UsageError(where + ": empty grid");
    return values;
  }
  if (!j.is_object()) throw UsageError(where + ": expected a list or {start, stop, count}");
  for (const char* key : {"start", "stop", "count"})
    if (!j.contains(key)) throw UsageError(where + ": missing '" + key + "'");
  const double start = j["start"].get<double>(), stop = j["stop"].get<double>();
  const long count = j["count"].get<long>();
  if (count < 1) throw UsageError(where + ".count: must be at least 1");
  const std::string spacing = j.value("spacing", std::string("linear"));
  if (spacing != "linear" && spacing != "log")
    throw UsageError(where + ".spacing: expected 'linear' or 'log'");
  if (spacing == "log" && !(start > 0.0 && stop > 0.0))
    throw UsageError(where + ": log spacing needs positive start and stop");
  for (long i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    values.push_back(spacing == "log"
                         ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                         : start + t * (stop - start));
  }
  return values;
}

inline Matrix parse_matrix(const std::string& where, const json& j) {
  auto read = [&](const json& a) {
    if (!a.is_array() || a.empty()) throw UsageError(where + ": expected a non-empty 2-D array");
    const auto n = static_cast<Index>(a.size());
    RealMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      const json& row = a[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n)
        throw UsageError(where + ": matrix must be square");
      for (Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
  };
  if (j.is_object()) {
    if (!j.contains("re")) throw UsageError(where + ": missing 're'");
    const RealMatrix re = read(j["re"]);
    Matrix m = re.cast<Complex>();
    if (j.contains("im")) {
      const RealMatrix im = read(j["im"]);
      if (im.rows() != re.rows()) throw UsageError(where + ": 're' and 'im' sizes differ");
      m += Complex(0.0, 1.0) * im.cast<Complex>();
    }
    return m;
  }
  return read(j).cast<Complex>();
}

inline std::vector<ScaleFactor> parse_scaling(const std::string& expr, Model model) {
  std::vector<ScaleFactor> out;
  if (expr.empty()) return out;
  std::stringstream ss(expr);
  std::string tok;
  while (std::getline(ss, tok, '*')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw UsageError("scaling: empty factor in '" + expr + "'");
    ScaleFactor f;
    const auto caret = tok.find('^');
    std::string base = tok.substr(0, caret);
    if (caret != std::string::npos) {
      try {
        f.power = std::stoi(tok.substr(caret + 1));
      } catch (const std::exception&) {
        throw UsageError("scaling: bad exponent in '" + tok + "'");
      }
    }
    char* end = nullptr;
    const double lit = std::strtod(base.c_str(), &end);
    if (end != base.c_str() && *end == '\0') {
      f.literal = lit;
    } else {
      bool known = false;
      for (const auto& [name, def] : model_parameters(model)) known = known || name == base;
      if (!known) throw UsageError("scaling: unknown parameter '" + base + "'");
      f.name = base;
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

inline SweepSpec parse_sweep_spec(const json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  SweepSpec s;
  s.source = j;
  if (!j.contains("model")) throw UsageError("model: missing");
  const auto model = parse_model(j["model"].get<std::string>());
  if (!model) throw UsageError("model: unknown model '" + j["model"].get<std::string>() + "'");
  s.model = *model;

  const auto known = model_parameters(s.model);
  auto is_param = [&](const std::string& n) {
    for (const auto& [name, def] : known)
      if (name == n) return true;
    return false;
  };
  if (j.contains("params")) {
    for (const auto& [key, val] : j["params"].items()) {
      if (!is_param(key))
        throw UsageError("params." + key + ": not a parameter of model " + model_name(s.model));
      if (!val.is_number()) throw UsageError("params." + key + ": expected a number");
      s.params[key] = val.get<double>();
    }
  }
  if (!j.contains("grid") || !j["grid"].is_object() || j["grid"].empty())
    throw UsageError("grid: empty grid (at least one axis is required)");
  for (const auto& [key, val] : j["grid"].items()) {
    if (!is_param(key))
      throw UsageError("grid." + key + ": not a parameter of model " + model_name(s.model));
    if (s.params.count(key)) throw UsageError("grid." + key + ": also given in params");
    s.grid.push_back({key, detail::parse_axis(key, val)});
  }
  for (const auto& [name, def] : known) {
    bool given = s.params.count(name) > 0;
    for (const auto& ax : s.grid) given = given || ax.name == name;
    if (!given && std::isnan(def)) throw UsageError("params: missing required '" + name + "'");
    if (!given) s.params[name] = def;
  }

  if (!j.contains("outputs") || !j["outputs"].is_array() || j["outputs"].empty())
    throw UsageError("outputs: at least one quantity selector is required");
  for (std::size_t k = 0; k < j["outputs"].size(); ++k) {
    const std::string name = j["outputs"][k].get<std::string>();
    if (!output_supported(s.model, name))
      throw UsageError("outputs[" + std::to_string(k) + "]: selector '" + name +
                       "' is not available for model " + model_name(s.model));
    s.outputs.push_back(name);
  }
  s.format = j.value("format", std::string("csv"));
  if (s.format != "csv" && s.format != "json")
    throw UsageError("format: expected 'csv' or 'json'");
  s.scaling = j.value("scaling", std::string());
  s.scale_factors = detail::parse_scaling(s.scaling, s.model);
  s.quad_nodes = j.value("quad_nodes", 512);
  if (s.quad_nodes < 2) throw UsageError("quad_nodes: must be at least 2");

  if (s.model == Model::kCustomMatrix) {
    if (!j.contains("matrices")) throw UsageError("matrices: required for custom-matrix");
    const json& m = j["matrices"];
    if (!m.contains("H0") || !m.contains("Htau"))
      throw UsageError("matrices: 'H0' and 'Htau' are required");
    s.H0 = detail::parse_matrix("matrices.H0", m["H0"]);
    s.Htau = detail::parse_matrix("matrices.Htau", m["Htau"]);
    if (m.contains("U")) s.U = detail::parse_matrix("matrices.U", m["U"]);
    if (s.Htau->rows() != s.H0->rows() || (s.U && s.U->rows() != s.H0->rows()))
      throw UsageError("matrices: dimensions differ");
    try {
      HermitianMatrix check0(*s.H0), check1(*s.Htau);
      if (s.U) UnitaryMatrix checku(*s.U);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("matrices: ") + e.what());
    }
  }
  return s;
}

using Point = std::map<std::string, double>;

// Grid points in row-major order: the first listed axis varies slowest.
inline std::vector<Point> grid_points(const SweepSpec& s) {
  std::vector<Point> points{s.params};
  for (const GridAxis& ax : s.grid) {
    std::vector<Point> next;
    next.reserve(points.size() * ax.values.size());
    for (const Point& p : points)
      for (double v : ax.values) {
        Point q = p;
        q[ax.name] = v;
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  return points;
}

namespace detail {

inline int integer_param(const Point& p, const std::string& name) {
  const double v = p.at(name);
  if (std::abs(v - std::round(v)) > 1e-9)
    throw UsageError("params." + name + ": must be an integer");
  return static_cast<int>(std::lround(v));
}

inline WorkProtocol finite_protocol(const SweepSpec& s, const Point& p) {
  switch (s.model) {
    case Model::kQubitQuench:
      return qubit_quench_protocol({p.at("omega"), p.at("theta"), p.at("beta")});
    case Model::kQubitPulse:
      return qubit_pulse_protocol(p.at("omega"), p.at("hx"), p.at("tau"), p.at("beta"));
    case Model::kMacrospin:
      return macrospin_protocol(
          {integer_param(p, "d"), p.at("hz"), p.at("hx"), p.at("tau"), p.at("beta")});
    case Model::kCustomMatrix: {
      const Index d = s.H0->rows();
      return {HermitianMatrix(*s.H0), HermitianMatrix(*s.Htau),
              s.U ? UnitaryMatrix(*s.U) : UnitaryMatrix::identity(d), p.at("beta")};
    }
    case Model::kTfim: break;
  }
  throw std::logic_error("finite_protocol: not a finite model");
}

inline std::vector<double> evaluate_tfim(const SweepSpec& s, const Point& p) {
  TfimParams t;
  t.g0 = p.at("g0");
  t.delta_g = p.at("delta_g");
  t.beta = p.at("beta");
  t.quad_nodes = s.quad_nodes;
  const int n = integer_param(p, "N");
  if (n > 0) t.size = FiniteChain{n};
  std::optional<AverageSplit> split;
  std::optional<std::pair<double, double>> inf;
  std::vector<double> out;
  for (const std::string& name : s.outputs) {
    if (auto q = parse_quantity(name)) {
      if (!split) split = tfim_split(t);
      out.push_back(select(*split, *q));
    } else {
      if (!inf) inf = infinitesimal_tfim(t);
      out.push_back(name == "lambda_cl_inf" ? inf->first : inf->second);
    }
  }
  return out;
}

inline std::vector<double> evaluate_finite(const SweepSpec& s, const Point& p) {
  const WorkProtocol w = finite_protocol(s, p);
  const ReferenceStates r = reference_states(w);
  std::optional<AverageSplit> split;
  std::optional<TrajectoryTable> table;
  std::map<std::string, CumulantSet> cums;
  std::optional<FluctuationReport> ft;
  std::optional<AnalyticityReport> an;
  std::optional<QubitClosedForms> closed;
  std::vector<double> out;
  for (const std::string& name : s.outputs) {
    if (auto q = parse_quantity(name)) {
      if (!split) split = average_split(r);
      out.push_back(select(*split, *q));
      continue;
    }
    if (name.rfind("kappa", 0) == 0 || name.rfind("ft_", 0) == 0) {
      if (!table) table = build_table(r);
      if (name.rfind("ft_", 0) == 0) {
        if (!ft) ft = fluctuation_theorem_check(*table);
        const Quantity q = *parse_quantity(name.substr(3));
        out.push_back(ft->averages[static_cast<std::size_t>(q)]);
      } else {
        const int order = name[5] - '0';
        const std::string qn = name.substr(7);
        auto it = cums.find(qn);
        if (it == cums.end())
          it = cums.emplace(qn, cumulants(distribution(*table, *parse_quantity(qn)))).first;
        out.push_back(it->second[order]);
      }
      continue;
    }
    if (name.rfind("max_abs_", 0) == 0) {
      if (!an) {
        if ((w.U.matrix() - Matrix::Identity(w.dim(), w.dim())).cwiseAbs().maxCoeff() > 0.0)
          throw UsageError("outputs: " + name + " needs U = identity");
        an = analyticity_report(PerturbationInput{w.H0, w.Htau - w.H0, w.beta});
      }
      out.push_back(name == "max_abs_s"   ? an->max_abs_s
                    : name == "max_abs_f" ? an->max_abs_f
                                          : an->max_abs_f_tilde);
      continue;
    }
    if (!closed) closed = qubit_closed_forms({p.at("omega"), p.at("theta"), p.at("beta")});
    out.push_back(name == "sigma_closed"      ? closed->sigma
                  : name == "gamma_qu_closed" ? closed->gamma_qu
                                              : closed->lambda_qu);
  }
  return out;
}

inline std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : p) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

}  // namespace detail

// One row: grid coordinates, then the requested outputs divided by the
// scaling expression.
inline std::vector<double> evaluate_point(const SweepSpec& s, const Point& p) {
  std::vector<double> vals =
      s.model == Model::kTfim ? detail::evaluate_tfim(s, p) : detail::evaluate_finite(s, p);
  double divisor = 1.0;
  for (const ScaleFactor& f : s.scale_factors)
    divisor *= std::pow(f.name.empty() ? f.literal : p.at(f.name), f.power);
  for (double& v : vals) v /= divisor;
  return vals;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Points are handed to a worker pool; rows keep grid order. The first error
// by grid index is rethrown, so failures are deterministic too.
inline Table run_sweep(const SweepSpec& s, int threads) {
  const std::vector<Point> points = grid_points(s);
  Table t;
  for (const GridAxis& ax : s.grid) t.columns.push_back(ax.name);
  for (const std::string& o : s.outputs) t.columns.push_back(o);
  t.rows.assign(points.size(), {});
  std::vector<std::string> errors(points.size());
  std::vector<char> usage(points.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        std::vector<double> row;
        for (const GridAxis& ax : s.grid) row.push_back(points[i].at(ax.name));
        const std::vector<double> vals = evaluate_point(s, points[i]);
        for (std::size_t k = 0; k < vals.size(); ++k) {
          if (std::isnan(vals[k]))
            throw SweepError("NaN in output '" + s.outputs[k] + "' at grid point " +
                             detail::describe(points[i]));
        }
        row.insert(row.end(), vals.begin(), vals.end());
        t.rows[i] = std::move(row);
      } catch (const UsageError& e) {
        errors[i] = e.what();
        usage[i] = 1;
      } catch (const SweepError& e) {
        errors[i] = e.what();
      } catch (const std::exception& e) {
        errors[i] = std::string(e.what()) + " at grid point " + detail::describe(points[i]);
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i].empty()) continue;
    if (usage[i]) throw UsageError(errors[i]);
    throw SweepError(errors[i]);
  }
  return t;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

// Numbers are written with the CSV formatter; infinities become the string
// "inf" since JSON has no literal for them.
inline void write_json(const Table& t, std::ostream& os) {
  os << "{\"columns\":" << json(t.columns).dump() << ",\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? "," : "") << '[';
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      const double v = t.rows[r][c];
      os << (c ? "," : "");
      if (std::isfinite(v)) os << format_number(v);
      else os << '"' << format_number(v) << '"';
    }
    os << ']';
  }
  os << "]}\n";
}

inline void write_table(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") write_json(t, os);
  else write_csv(t, os);
}

inline json make_manifest(const json& config, std::uint64_t seed, double wall_time_s,
                          int threads, const std::string& output) {
  json m;
  m["output"] = output;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["threads"] = threads;
  m["wall_time_s"] = wall_time_s;
  m["config"] = config;
  return m;
}

}  // namespace qsplit::reports

#endif  // QSPLIT_REPORTS_SWEEP_HPP_
