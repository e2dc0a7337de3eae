#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ife/conditions.hpp"
#include "ife/models.hpp"

namespace ife::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// formatting

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

inline json amplitudes_json(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

// ---------------------------------------------------------------------------
// scenario parsing

inline double number_field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError("cli", where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError("cli", where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline double number_field_or(const json& obj, const std::string& key, double fallback,
                              const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number_field(obj, key, where);
}

/// A number is a constant schedule; otherwise an object with a "kind" of
/// constant, linear, sinusoid, ramp or product.
inline ScalarSchedule parse_schedule(const json& spec, const std::string& where = "schedule") {
  if (spec.is_number()) return ScalarSchedule::constant(spec.get<double>());
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    throw ParseError("cli", where + ": schedule must be a number or an object with a 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "constant") return ScalarSchedule::constant(number_field(spec, "value", where));
  if (kind == "linear")
    return ScalarSchedule::linear(number_field_or(spec, "offset", 0.0, where),
                                  number_field(spec, "slope", where));
  if (kind == "sinusoid")
    return ScalarSchedule::sinusoid(number_field_or(spec, "offset", 0.0, where),
                                    number_field(spec, "amplitude", where),
                                    number_field(spec, "frequency", where),
                                    number_field_or(spec, "phase", 0.0, where));
  if (kind == "ramp") {
    try {
      return ScalarSchedule::ramp(number_field(spec, "start", where), number_field(spec, "end", where),
                                  number_field(spec, "t_start", where),
                                  number_field(spec, "t_end", where));
    } catch (const InvalidArgument& e) {
      throw ParseError("cli", where + ": " + e.what());
    }
  }
  if (kind == "product") {
    if (!spec.contains("factors") || !spec.at("factors").is_array())
      throw ParseError("cli", where + ": product needs a 'factors' array");
    std::vector<ScalarSchedule> factors;
    for (const auto& f : spec.at("factors")) factors.push_back(parse_schedule(f, where));
    return ScalarSchedule::product(std::move(factors));
  }
  throw ParseError("cli", where + ": unknown schedule kind '" + kind + "'");
}

namespace detail {

inline const json& param(const json& params, const std::string& key) {
  if (!params.contains(key)) throw ParseError("cli", "missing parameter '" + key + "'");
  return params.at(key);
}
inline double num(const json& params, const std::string& key) {
  const auto& v = param(params, key);
  if (!v.is_number()) throw ParseError("cli", "parameter '" + key + "' must be a number");
  return v.get<double>();
}
inline double num_or(const json& params, const std::string& key, double fallback) {
  return params.contains(key) ? num(params, key) : fallback;
}
inline std::size_t count(const json& params, const std::string& key) {
  const double v = num(params, key);
  if (v < 0 || v != std::floor(v))
    throw ParseError("cli", "parameter '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}
inline ScalarSchedule sched(const json& params, const std::string& key) {
  return parse_schedule(param(params, key), "parameter '" + key + "'");
}

} // namespace detail

/// Builds a catalog model from its JSON parameter object.
inline models::Model build_model(const std::string& name, const json& params) {
  using namespace detail;
  if (!params.is_object()) throw ParseError("cli", "'parameters' must be an object");
  if (name == "spin-half") {
    if (num_or(params, "static_interaction", 0.0) != 0.0)
      return models::spin_half_static(sched(params, "Omega"), num(params, "alpha"), num(params, "phi"));
    return models::spin_half_rotating(sched(params, "Omega"), sched(params, "alpha"), num(params, "phi"));
  }
  if (name == "spin-one")
    return models::spin_one_model(sched(params, "Omega"), sched(params, "alpha"), num(params, "phi0"));
  if (name == "stirap") {
    const ScalarSchedule theta = params.contains("theta") ? sched(params, "theta")
                                                          : models::stirap_theta_ramp(num(params, "T"));
    return models::stirap_model(num(params, "Omega"), num(params, "Delta"), theta,
                                sched(params, "epsilon"));
  }
  if (name == "jc-multiphoton") {
    std::function<double(std::size_t)> f;
    if (params.contains("f")) {
      const auto& fw = params.at("f");
      if (!fw.is_array()) throw ParseError("cli", "parameter 'f' must be an array of weights");
      std::vector<double> w;
      for (const auto& x : fw) {
        if (!x.is_number()) throw ParseError("cli", "parameter 'f' must contain numbers");
        w.push_back(x.get<double>());
      }
      f = [w](std::size_t n) { return n < w.size() ? w[n] : 1.0; };
    }
    return models::jc_multiphoton(num(params, "omega"), num(params, "Omega"), num(params, "gamma"),
                                  count(params, "k"), num(params, "Delta"), f,
                                  count(params, "fock_cutoff"));
  }
  if (name == "jc-sum")
    return models::jc_sum(num(params, "omega"), num(params, "Omega"), sched(params, "gamma_k"),
                          sched(params, "gamma_l"), count(params, "k"), count(params, "l"),
                          count(params, "fock_cutoff"));
  throw UnknownModel("cli", "unknown model '" + name + "'");
}

struct Tolerances {
  double residual = kDefaultResidualTol;
  double subspace = kDefaultSubspaceTol;
  double ladder = kDefaultResidualTol;
  double static_criterion = kDefaultResidualTol;
  int ladder_depth = 3;
  std::size_t ladder_samples = 11;
  /// Truncation-boundary population above this invalidates a result.
  double leakage = 1e-10;

  json to_json() const {
    return {{"residual", residual},         {"subspace", subspace},
            {"ladder", ladder},             {"static_criterion", static_criterion},
            {"ladder_depth", ladder_depth}, {"ladder_samples", ladder_samples},
            {"leakage", leakage}};
  }
};

enum class Analysis { CheckState, FindSubspaces, SufficientLadder, StaticCriterion };

/// Largest-norm rule for the default step: dt * max ||H||_F <= 0.05.
inline TimeGrid default_grid(const SplitHamiltonian& h, double t0, double t_end) {
  const auto total = h.total();
  double max_norm = 0.0;
  const TimeGrid probe(t0, t_end, 200);
  for (std::size_t k = 0; k < probe.size(); ++k)
    max_norm = std::max(max_norm, evaluate(total, probe.time(k)).norm());
  if (max_norm == 0.0) return TimeGrid(t0, t_end, 1);
  return TimeGrid::with_max_step(t0, t_end, 0.05 / max_norm);
}

namespace detail {

inline double grid_value(const json& grid, const json& params, const std::string& key,
                         std::optional<double> fallback) {
  if (!grid.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError("cli", "grid: missing field '" + key + "'");
  }
  const auto& v = grid.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return num(params, v.get<std::string>());
  throw ParseError("cli", "grid: field '" + key + "' must be a number or a parameter name");
}

inline double population(const StateVector& v, const std::vector<Eigen::Index>& idx) {
  double p = 0.0;
  for (auto i : idx) p += std::norm(v(i));
  return p;
}

/// span(basis) ∩ span{e_i : i not in excluded}
inline SubspaceBasis away_from(const SubspaceBasis& basis, const std::vector<Eigen::Index>& excluded,
                               double tol) {
  const Eigen::Index dim = basis.ambient_dim();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (std::find(excluded.begin(), excluded.end(), i) == excluded.end()) keep.push_back(i);
  ComplexMatrix cols = ComplexMatrix::Zero(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) cols(keep[j], static_cast<Eigen::Index>(j)) = 1.0;
  return subspace_intersection(basis, SubspaceBasis(std::move(cols)), tol);
}

} // namespace detail

struct LoadedScenario {
  std::string model_name;
  models::Model model;
  TimeGrid grid;
  std::vector<Analysis> analyses;
  std::vector<models::LabeledState> states;
  Tolerances tolerances;
  std::vector<std::string> notes;
};

inline LoadedScenario load_scenario(const json& sc) {
  if (!sc.is_object()) throw ParseError("cli", "scenario must be a JSON object");
  if (!sc.contains("model") || !sc.at("model").is_string())
    throw ParseError("cli", "scenario needs a string 'model'");
  const std::string name = sc.at("model").get<std::string>();
  const json params = sc.value("parameters", json::object());
  auto model = build_model(name, params);

  const json grid_spec = sc.value("grid", json::object());
  if (!grid_spec.is_object()) throw ParseError("cli", "'grid' must be an object");
  const double t0 = detail::grid_value(grid_spec, params, "t0", 0.0);
  const double t_end = detail::grid_value(grid_spec, params, "t_end", std::nullopt);
  std::optional<TimeGrid> grid;
  try {
    if (grid_spec.contains("steps")) {
      const double steps = detail::grid_value(grid_spec, params, "steps", std::nullopt);
      if (steps < 1 || steps != std::floor(steps))
        throw ParseError("cli", "grid: 'steps' must be a positive integer");
      grid.emplace(t0, t_end, static_cast<std::size_t>(steps));
    } else if (grid_spec.contains("dt")) {
      grid.emplace(TimeGrid::with_max_step(t0, t_end, detail::grid_value(grid_spec, params, "dt", std::nullopt)));
    } else {
      grid.emplace(default_grid(model.hamiltonian, t0, t_end));
    }
  } catch (const InvalidArgument& e) {
    throw ParseError("cli", std::string("grid: ") + e.what());
  }

  std::vector<Analysis> analyses;
  const json an = sc.value("analysis", json::array({"check-state"}));
  const json an_list = an.is_array() ? an : json::array({an});
  for (const auto& a : an_list) {
    if (!a.is_string()) throw ParseError("cli", "analysis entries must be strings");
    const auto s = a.get<std::string>();
    if (s == "check-state") analyses.push_back(Analysis::CheckState);
    else if (s == "find-subspaces") analyses.push_back(Analysis::FindSubspaces);
    else if (s == "sufficient-ladder") analyses.push_back(Analysis::SufficientLadder);
    else if (s == "static-criterion") analyses.push_back(Analysis::StaticCriterion);
    else throw ParseError("cli", "unknown analysis '" + s + "'");
  }

  Tolerances tol;
  if (sc.contains("tolerances")) {
    const auto& t = sc.at("tolerances");
    if (!t.is_object()) throw ParseError("cli", "'tolerances' must be an object");
    tol.residual = number_field_or(t, "residual", tol.residual, "tolerances");
    tol.subspace = number_field_or(t, "subspace", tol.subspace, "tolerances");
    tol.ladder = number_field_or(t, "ladder", tol.ladder, "tolerances");
    tol.static_criterion = number_field_or(t, "static_criterion", tol.static_criterion, "tolerances");
    tol.ladder_depth = static_cast<int>(number_field_or(t, "ladder_depth", tol.ladder_depth, "tolerances"));
    tol.ladder_samples = static_cast<std::size_t>(
        number_field_or(t, "ladder_samples", static_cast<double>(tol.ladder_samples), "tolerances"));
    tol.leakage = number_field_or(t, "leakage", tol.leakage, "tolerances");
  }

  LoadedScenario out{name, std::move(model), *grid, std::move(analyses), {}, tol, {}};

  auto resolve = [&](const json& s) -> models::LabeledState {
    if (s.is_string()) {
      const auto* found = out.model.descriptor.find_state(s.get<std::string>());
      if (!found)
        throw ParseError("cli", "unknown state label '" + s.get<std::string>() + "' for model " + name);
      return *found;
    }
    if (!s.is_array()) throw ParseError("cli", "initial state must be a label or an amplitude list");
    const auto dim = out.model.descriptor.dim;
    if (static_cast<Eigen::Index>(s.size()) != dim)
      throw ParseError("cli", "amplitude list has " + std::to_string(s.size()) + " entries, model has dimension " +
                                  std::to_string(dim));
    StateVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& z = s.at(static_cast<std::size_t>(i));
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ParseError("cli", "amplitudes must be [re, im] pairs");
      v(i) = Complex{z[0].get<double>(), z[1].get<double>()};
    }
    const double norm = v.norm();
    if (norm == 0.0) throw ParseError("cli", "amplitude list is the zero vector");
    if (std::abs(norm - 1.0) > 1e-6)
      out.notes.push_back("explicit amplitudes renormalized (norm was " + format_number(norm) + ")");
    return {"explicit", v / norm, "explicit amplitudes"};
  };

  if (sc.contains("initial_state")) out.states.push_back(resolve(sc.at("initial_state")));
  if (sc.contains("initial_states")) {
    if (!sc.at("initial_states").is_array()) throw ParseError("cli", "'initial_states' must be an array");
    for (const auto& s : sc.at("initial_states")) out.states.push_back(resolve(s));
  }
  if (out.states.empty()) out.states = out.model.descriptor.known_ife_states;
  return out;
}

// ---------------------------------------------------------------------------
// running

struct RunResult {
  json report;
  std::string curves_csv;
};

inline RunResult run_scenario(const json& sc) {
  const LoadedScenario s = load_scenario(sc);
  const auto& h = s.model.hamiltonian;
  const auto& desc = s.model.descriptor;

  json report;
  report["model"] = s.model_name;
  report["dim"] = desc.dim;
  report["parameters"] = sc.value("parameters", json::object());
  report["grid"] = {{"t0", s.grid.t0()}, {"t_end", s.grid.t_end()}, {"steps", s.grid.steps()},
                    {"dt", s.grid.dt()}};
  report["tolerances"] = s.tolerances.to_json();
  report["model_notes"] = desc.notes;
  report["approximate"] = desc.approximate;

  std::ostringstream csv;
  csv << "t,residual,a,accumulated_phase,fidelity\n";

  const bool needs_traces =
      std::find(s.analyses.begin(), s.analyses.end(), Analysis::CheckState) != s.analyses.end();
  std::optional<TracePair> traces;
  if (needs_traces) traces = compute_traces(h, s.grid);

  for (Analysis a : s.analyses) {
    if (a == Analysis::CheckState) {
      json list = json::array();
      for (const auto& st : s.states) {
        const IFEReport r = check_ife_candidate(st.state, h, *traces, s.tolerances.residual);
        double leak = 0.0;
        if (!desc.boundary_indices.empty())
          for (std::size_t k = 0; k < s.grid.size(); ++k) {
            leak = std::max(leak, detail::population(traces->u.unitaries[k] * st.state, desc.boundary_indices));
            leak = std::max(leak, detail::population(traces->u0.unitaries[k] * st.state, desc.boundary_indices));
          }
        list.push_back({{"label", st.label},
                        {"amplitudes", amplitudes_json(st.state)},
                        {"verdict", to_string(r.verdict)},
                        {"max_residual", r.max_residual()},
                        {"residual_tol_used", r.residual_tol_used},
                        {"min_fidelity", r.min_fidelity()},
                        {"final_accumulated_phase", r.accumulated_phase.back()},
                        {"final_overlap", {r.overlap.back().real(), r.overlap.back().imag()}},
                        {"unitarity_defect",
                         std::max(traces->u.max_unitarity_defect, traces->u0.max_unitarity_defect)},
                        {"eigenvalue_jumps", r.eigenvalue_jumps},
                        {"leakage", {{"max_boundary_population", leak},
                                     {"flagged", leak > s.tolerances.leakage}}}});
        for (std::size_t k = 0; k < s.grid.size(); ++k)
          csv << format_number(s.grid.time(k)) << ',' << format_number(r.residuals[k]) << ','
              << format_number(r.a_samples[k]) << ',' << format_number(r.accumulated_phase[k]) << ','
              << format_number(r.fidelity[k]) << '\n';
      }
      report["check_state"] = list;
    } else if (a == Analysis::FindSubspaces) {
      const auto subs = find_ife_subspaces(h, s.grid, s.tolerances.subspace, s.tolerances.residual);
      const auto u0 = desc.boundary_indices.empty() ? std::optional<EvolutionTrace>()
                                                    : std::optional<EvolutionTrace>(propagate(h.h0(), s.grid));
      json list = json::array();
      for (const auto& sub : subs) {
        json basis = json::array();
        double leak = 0.0;
        for (Eigen::Index i = 0; i < sub.basis.count(); ++i) {
          basis.push_back(amplitudes_json(sub.basis.vector(i)));
          if (u0)
            for (const auto& u : u0->unitaries)
              leak = std::max(leak, detail::population(u * sub.basis.vector(i), desc.boundary_indices));
        }
        json entry{{"dimension", sub.basis.count()},
                   {"basis", basis},
                   {"a_samples", sub.a_samples},
                   {"grouped_with_tol", sub.grouped_with_tol},
                   {"leakage", {{"max_boundary_population", leak},
                                {"flagged", leak > s.tolerances.leakage}}}};
        // the part of a flagged subspace lying away from the truncation edge
        if (leak > s.tolerances.leakage) {
          const auto interior = detail::away_from(sub.basis, desc.boundary_indices, s.tolerances.subspace);
          json ib = json::array();
          for (Eigen::Index i = 0; i < interior.count(); ++i) ib.push_back(amplitudes_json(interior.vector(i)));
          entry["interior_dimension"] = interior.count();
          entry["interior_basis"] = ib;
        }
        list.push_back(entry);
      }
      report["find_subspaces"] = list;
    } else if (a == Analysis::SufficientLadder) {
      const TimeGrid samples(s.grid.t0(), s.grid.t_end(), std::max<std::size_t>(s.tolerances.ladder_samples, 2) - 1);
      json list = json::array();
      for (const auto& st : s.states) {
        const auto rep = check_sufficient_ladder(st.state, h, samples.samples(), s.tolerances.ladder_depth,
                                                 s.tolerances.ladder);
        json depths = json::array();
        for (const auto& d : rep.depths)
          depths.push_back({{"depth", d.depth},
                            {"tuples_checked", d.tuples_checked},
                            {"max_scaled_residual", d.max_scaled_residual},
                            {"pass", d.pass}});
        list.push_back({{"label", st.label},
                        {"pass", rep.pass},
                        {"eigen_condition_pass", rep.eigen_condition_pass},
                        {"eigen_condition_max_scaled_residual", rep.eigen_condition_max_scaled_residual},
                        {"times", rep.times},
                        {"depths", depths}});
      }
      report["sufficient_ladder"] = list;
    } else {
      const ComplexMatrix h0 = evaluate(h.h0(), s.grid.t0());
      const ComplexMatrix hi = evaluate(h.h_int(), s.grid.t0());
      bool static_model = true;
      for (double t : {0.5 * (s.grid.t0() + s.grid.t_end()), s.grid.t_end()})
        static_model = static_model && (evaluate(h.h0(), t) - h0).norm() <= 1e-12 * (1.0 + h0.norm()) &&
                       (evaluate(h.h_int(), t) - hi).norm() <= 1e-12 * (1.0 + hi.norm());
      json list = json::array();
      for (const auto& st : s.states) {
        const auto r = check_time_independent(st.state, h0, hi, s.tolerances.static_criterion);
        list.push_back({{"label", st.label},
                        {"time_independent", static_model},
                        {"holds", r.holds},
                        {"a", r.a},
                        {"scaled_residuals", r.scaled_residuals},
                        {"failing_power", r.failing_power ? json(*r.failing_power) : json(nullptr)},
                        {"failing_residual", r.failing_residual}});
      }
      report["static_criterion"] = list;
    }
  }
  report["notes"] = s.notes;
  return {std::move(report), csv.str()};
}

inline json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cli", "cannot open scenario file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("cli", "malformed scenario '" + path.string() + "': " + e.what());
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cli", "cannot write '" + path.string() + "'");
  out << text;
}

inline void write_run(const RunResult& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_text(out_dir / "report.json", r.report.dump(2) + "\n");
  write_text(out_dir / "curves.csv", r.curves_csv);
}

/// Sets a dotted path ("alpha", "alpha.amplitude", "grid.t_end") in a
/// scenario. Plain names address entries of "parameters".
inline void set_path(json& sc, const std::string& path, double value) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.empty()) throw ParseError("cli", "empty parameter name");
  json* node = nullptr;
  std::size_t i = 0;
  if (parts[0] == "grid" || parts[0] == "tolerances") {
    node = &sc[parts[0]];
    i = 1;
  } else {
    if (!sc.contains("parameters")) throw ParseError("cli", "scenario has no parameters");
    node = &sc["parameters"];
  }
  for (; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw ParseError("cli", "sweep parameter '" + path + "' not found in scenario");
    node = &(*node)[parts[i]];
  }
  if (i >= parts.size() || !node->is_object() || !node->contains(parts[i]))
    throw ParseError("cli", "sweep parameter '" + path + "' not found in scenario");
  (*node)[parts[i]] = value;
}

struct SweepRow {
  double value;
  std::string verdict;
  std::optional<double> max_residual;
  std::optional<double> min_fidelity;
};

/// Runs the scenario once per value into out_dir/run_<i>/ and writes
/// out_dir/index.csv.
inline std::vector<SweepRow> sweep(const json& sc, const std::string& param,
                                   const std::vector<double>& values, const fs::path& out_dir) {
  std::vector<SweepRow> rows;
  std::vector<RunResult> runs;
  for (double v : values) {
    json copy = sc;
    set_path(copy, param, v);
    runs.push_back(run_scenario(copy));
    SweepRow row{v, "none", std::nullopt, std::nullopt};
    const auto& rep = runs.back().report;
    if (rep.contains("check_state") && !rep["check_state"].empty()) {
      const auto& first = rep["check_state"][0];
      row.verdict = first["verdict"].get<std::string>();
      row.max_residual = first["max_residual"].get<double>();
      row.min_fidelity = first["min_fidelity"].get<double>();
    }
    rows.push_back(row);
  }
  fs::create_directories(out_dir);
  std::ostringstream index;
  index << "value,verdict,max_residual,min_fidelity\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_run(runs[i], out_dir / ("run_" + std::to_string(i)));
    const auto& r = rows[i];
    index << format_number(r.value) << ',' << r.verdict << ','
          << (r.max_residual ? format_number(*r.max_residual) : "") << ','
          << (r.min_fidelity ? format_number(*r.min_fidelity) : "") << '\n';
  }
  write_text(out_dir / "index.csv", index.str());
  return rows;
}

inline std::string list_models_text() {
  std::ostringstream out;
  for (const auto& e : models::catalog()) {
    out << e.name << "\n  dim: " << e.dim << "\n  parameters:";
    for (const auto& p : e.parameters) out << ' ' << p;
    out << "\n  ife states:";
    for (const auto& s : e.ife_states) out << ' ' << s;
    out << '\n';
  }
  return out.str();
}

} // namespace ife::cli
