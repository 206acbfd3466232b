/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <future>

#include "uqthermo/version.hpp"

namespace uqthermo {

namespace {

json num_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

[[noreturn]] void schema_error(const std::string& what) { raise(ErrorKind::SchemaError, what); }

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& ctx) {
  if (!j.is_object()) schema_error(ctx + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok |= item.key() == k;
    if (!ok) schema_error("unknown field '" + item.key() + "' in " + ctx);
  }
}

double get_number(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) schema_error(ctx + " requires '" + key + "'");
  if (!j[key].is_number()) schema_error(std::string(key) + " must be a number in " + ctx);
  return j[key].get<double>();
}

double get_number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) schema_error(ctx + " requires '" + key + "'");
  if (!j[key].is_number_integer()) schema_error(std::string(key) + " must be an integer in " + ctx);
  return j[key].get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) schema_error(ctx + " requires '" + key + "'");
  if (!j[key].is_string()) schema_error(std::string(key) + " must be a string in " + ctx);
  return j[key].get<std::string>();
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix and result serialization
// ---------------------------------------------------------------------------

json matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) schema_error("matrix must be a nonempty array of rows");
  const auto nrows = static_cast<Index>(j.size());
  Index ncols = -1;
  for (const auto& row : j) {
    if (!row.is_array()) schema_error("matrix row must be an array");
    if (ncols < 0) ncols = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != ncols) schema_error("ragged matrix rows");
  }
  if (nrows != ncols) schema_error("matrix must be square");
  CMat m(nrows, ncols);
  for (Index i = 0; i < nrows; ++i) {
    for (Index c = 0; c < ncols; ++c) {
      const json& entry = j[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        schema_error("matrix entries must be [re, im] pairs");
      }
      m(i, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
      if (!std::isfinite(m(i, c).real()) || !std::isfinite(m(i, c).imag())) {
        schema_error("matrix entries must be finite");
      }
    }
  }
  return m;
}

json to_json(const SolveCertificate& c) {
  json j;
  j["status"] = to_string(c.status);
  j["primal_value"] = num_or_inf(c.primal_value);
  j["dual_value"] = num_or_inf(c.dual_value);
  j["gap"] = c.gap;
  j["primal_residual"] = c.primal_residual;
  j["dual_residual"] = c.dual_residual;
  j["iterations"] = c.iterations;
  if (c.status == SolveStatus::Infeasible || c.status == SolveStatus::Unbounded) {
    j["infeasibility_margin"] = c.infeasibility_margin;
  }
  return j;
}

json to_json(const GridMeta& g) {
  json j;
  j["backend"] = g.backend;
  j["p_grid"] = g.p_grid;
  j["e_grid"] = g.e_grid;
  if (g.m_cap > 0.0) j["m_cap"] = g.m_cap;
  if (g.lambda_grid > 0) j["lambda_grid"] = g.lambda_grid;
  return j;
}

namespace {

const char* flag_name(DivergenceFlag f) {
  switch (f) {
    case DivergenceFlag::Finite: return "finite";
    case DivergenceFlag::ThresholdInfinite: return "threshold-infinite";
    case DivergenceFlag::InfeasibleUpToCap: return "infeasible-up-to-cap";
    case DivergenceFlag::InfeasibleCertified: return "infeasible-certified";
  }
  return "finite";
}

}  // namespace

json to_json(const DivergenceResult& r) {
  json j;
  j["value_bits"] = num_or_inf(r.value_bits);
  j["flag"] = flag_name(r.flag);
  if (r.test) {
    j["witness"] = {{"type", "test"}, {"operator", matrix_to_json(r.test->matrix())}};
  } else if (r.maxpair) {
    j["witness"] = {{"type", "max-pair"},
                    {"tau_index", r.maxpair->tau_index},
                    {"omega", matrix_to_json(r.maxpair->omega)}};
  } else if (r.segment) {
    j["witness"] = {{"type", "segment"},
                    {"m", r.segment->m},
                    {"gamma", matrix_to_json(r.segment->gamma)},
                    {"omega", matrix_to_json(r.segment->omega)}};
  } else {
    j["witness"] = nullptr;
  }
  j["certificate"] = to_json(r.certificate);
  j["grid"] = to_json(r.grid);
  return j;
}

json to_json(const ChannelSpec& ch) {
  json j;
  j["kind"] = ch.kind() == ChannelSpec::Kind::Replacer ? "replacer" : "measure-prepare";
  json effects = json::array();
  for (const auto& e : ch.effects()) effects.push_back(matrix_to_json(e.matrix()));
  json outputs = json::array();
  for (const auto& o : ch.outputs()) outputs.push_back(matrix_to_json(o.matrix()));
  j["effects"] = std::move(effects);
  j["outputs"] = std::move(outputs);
  return j;
}

json to_json(const ChannelVerification& v) {
  json j;
  j["gibbs_residuals"] = v.gibbs_residuals;
  j["state_errors"] = v.state_errors;
  j["gibbs_tolerance"] = v.gibbs_tolerance;
  j["state_tolerance"] = v.state_tolerance;
  j["pass"] = v.pass;
  return j;
}

json to_json(const TaskReport& r) {
  json j;
  j["value_bits"] = num_or_inf(r.value_bits);
  j["verdict"] = to_string(r.verdict);
  j["channel"] = r.channel ? to_json(*r.channel) : json(nullptr);
  j["verification"] = to_json(r.verification);
  j["divergence"] = to_json(r.divergence);
  return j;
}

json to_json(const NogoVerdict& v) {
  json j;
  j["verdict"] = to_string(v.kind);
  j["target_distance"] = v.target_distance;
  j["channel"] = v.channel ? to_json(*v.channel) : json(nullptr);
  json w;
  w["feasible"] = v.intersection.feasible;
  if (v.intersection.feasible) {
    w["p_coeffs"] = std::vector<double>(v.intersection.p_coeffs.begin(),
                                        v.intersection.p_coeffs.end());
    w["e_coeffs"] = std::vector<double>(v.intersection.e_coeffs.begin(),
                                        v.intersection.e_coeffs.end());
    w["reconstruction_residual"] = v.intersection.reconstruction_residual;
  }
  w["certificate"] = to_json(v.intersection.certificate);
  j["intersection"] = std::move(w);
  return j;
}

json to_json(const TruncationResult& r) {
  json j;
  j["feasible"] = r.feasible;
  if (r.feasible) {
    j["q"] = r.q;
    j["channel"] = r.channel ? to_json(*r.channel) : json(nullptr);
    j["gibbs_residual"] = r.gibbs_residual;
    j["state_error"] = r.state_error;
  }
  j["provenance"] = "closed-form";
  return j;
}

json to_json(const RateSweepRow& row) {
  json j;
  j["n"] = row.n;
  j["eps"] = row.eps;
  j["delta"] = row.delta;
  j["grid"] = row.grid;
  j["w_clean"] = {{"value_bits", num_or_inf(row.w_clean)},
                  {"closed_form", row.w_clean_closed},
                  {"delta", row.delta_w_clean()}};
  j["c_clean"] = {{"value_bits", num_or_inf(row.c_clean)},
                  {"closed_form", row.c_clean_closed},
                  {"delta", row.delta_c_clean()}};
  j["w_dirty"] = {{"value_bits", num_or_inf(row.w_dirty)},
                  {"closed_form", row.w_dirty_closed},
                  {"delta", row.delta_w_dirty()}};
  j["c_dirty"] = {{"value_bits", num_or_inf(row.c_dirty)},
                  {"status", to_string(row.c_dirty_status)},
                  {"analytic_infinite", row.c_dirty_analytic_infinite}};
  j["provenance"] = to_string(row.provenance);
  j["closed_forms_valid"] = row.closed_forms_valid;
  return j;
}

json to_json(const FormationBound& b) {
  json j;
  switch (b.kind) {
    case BoundKind::Zero: j["kind"] = "zero"; break;
    case BoundKind::Infinite: j["kind"] = "infinite"; break;
    case BoundKind::Bound: j["kind"] = "bound"; break;
    case BoundKind::NotApplicable: j["kind"] = "not-applicable"; break;
  }
  j["value_bits"] = num_or_inf(b.value_bits);
  j["separation"] = b.geometry.separation;
  j["diameter"] = b.geometry.diameter;
  j["provenance"] = b.geometry.separation_certificate ? "solver" : "closed-form";
  if (b.geometry.separation_certificate) {
    j["certificate"] = to_json(*b.geometry.separation_certificate);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

SamplerSpec sampler_from_json(const json& j, std::optional<int> grid_override) {
  expect_keys(j, {"family", "params", "grid"}, "sampler");
  const std::string family = get_string(j, "family", "sampler");
  int grid = grid_override ? *grid_override : get_int(j, "grid", "sampler");
  if (!j.contains("params")) schema_error("sampler requires 'params'");
  const json& p = j["params"];

  if (family == "battery_interval") {
    expect_keys(p, {"m_lo", "m_hi"}, "battery_interval params");
    return SamplerSpec::battery_interval(get_number(p, "m_lo", family), get_number(p, "m_hi", family),
                                         grid);
  }
  if (family == "battery_ray") {
    expect_keys(p, {"m_lo", "m_cap", "limit_point"}, "battery_ray params");
    const double cap = get_number_or(p, "m_cap", 1e6);
    const bool limit = p.contains("limit_point") ? p["limit_point"].get<bool>() : true;
    return SamplerSpec::battery_ray(get_number(p, "m_lo", family), grid, cap, limit);
  }
  if (family == "qubit_field_ball") {
    expect_keys(p, {"h0", "delta", "beta"}, "qubit_field_ball params");
    return SamplerSpec::qubit_field_ball(get_number(p, "h0", family), get_number(p, "delta", family),
                                         get_number(p, "beta", family), grid);
  }
  if (family == "iid_power") {
    expect_keys(p, {"base", "n"}, "iid_power params");
    if (!p.contains("base")) schema_error("iid_power requires 'base'");
    json base = p["base"];
    if (!base.contains("grid")) base["grid"] = grid;
    return SamplerSpec::iid_power(sampler_from_json(base, std::nullopt), get_int(p, "n", family),
                                  grid);
  }
  schema_error("unknown sampler family '" + family + "'");
}

}  // namespace

StateSet state_set_from_json(const json& j, std::optional<int> grid_override) {
  expect_keys(j, {"generators", "hull", "sampler"}, "state set");
  HullKind hull = HullKind::Finite;
  if (j.contains("hull")) hull = hull_from_string(get_string(j, "hull", "state set"));

  std::vector<DensityOperator> gens;
  if (j.contains("generators")) {
    if (!j["generators"].is_array()) schema_error("generators must be an array");
    for (const auto& g : j["generators"]) {
      try {
        gens.push_back(make_density(matrix_from_json(g)));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaError) throw;
        schema_error(std::string("invalid generator: ") + e.what());
      }
    }
  }
  if (j.contains("sampler")) {
    return materialize(StateSet(std::move(gens), hull, sampler_from_json(j["sampler"], grid_override)));
  }
  if (gens.empty()) schema_error("state set needs generators or a sampler");
  return StateSet(std::move(gens), hull);
}

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return std::string("fnv1a:") + buf;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

DensityOperator single_state(const json& j, const char* key, const std::string& ctx,
                             std::optional<int> grid_override) {
  if (!j.contains(key)) schema_error(ctx + " requires set '" + key + "'");
  const StateSet set = state_set_from_json(j[key], grid_override);
  if (set.generators().size() != 1) {
    schema_error(std::string("set '") + key + "' must be a singleton for " + ctx);
  }
  return set.generators()[0];
}

StateSet required_set(const json& j, const char* key, const std::string& ctx,
                      std::optional<int> grid_override) {
  if (!j.contains(key)) schema_error(ctx + " requires set '" + key + "'");
  return state_set_from_json(j[key], grid_override);
}

BatteryKind battery_from_json(const json& j, const std::string& ctx) {
  const std::string s = get_string(j, "battery", ctx);
  if (s == "clean") return BatteryKind::Clean;
  if (s == "dirty") return BatteryKind::Dirty;
  schema_error("battery must be 'clean' or 'dirty' in " + ctx);
}

json cmd_gibbs(const json& cfg) {
  expect_keys(cfg, {"command", "out", "seed", "hamiltonian", "beta", "battery_m", "field"},
              "gibbs config");
  json result;
  if (cfg.contains("battery_m")) {
    result["state"] = matrix_to_json(battery_gibbs(get_number(cfg, "battery_m", "gibbs")).matrix());
    result["provenance"] = "closed-form";
  } else if (cfg.contains("field")) {
    const json& f = cfg["field"];
    if (!f.is_array() || f.size() != 3) schema_error("field must be a 3-vector");
    const std::array<double, 3> h = {f[0].get<double>(), f[1].get<double>(), f[2].get<double>()};
    result["state"] =
        matrix_to_json(qubit_field_gibbs(h, get_number(cfg, "beta", "gibbs")).matrix());
    result["provenance"] = "closed-form";
  } else if (cfg.contains("hamiltonian")) {
    bool warned = false;
    const DensityOperator g = gibbs_from_hamiltonian(
        HermitianOperator(matrix_from_json(cfg["hamiltonian"])),
        get_number(cfg, "beta", "gibbs"), &warned);
    result["state"] = matrix_to_json(g.matrix());
    result["rescale_warning"] = warned;
    result["provenance"] = "closed-form";
  } else {
    schema_error("gibbs requires one of battery_m, field, hamiltonian");
  }
  return result;
}

json cmd_divergence(const json& cfg, const SolverOptions& opts, const CliOverrides& ov) {
  expect_keys(cfg,
              {"command", "out", "seed", "which", "p", "e", "k", "eps", "m_cap", "alpha", "n", "r"},
              "divergence config");
  const std::string which = get_string(cfg, "which", "divergence");
  json result;
  result["which"] = which;

  if (which == "umegaki" || which == "trace-quasi" || which == "hoeffding") {
    const DensityOperator rho = single_state(cfg, "p", which, ov.grid);
    const DensityOperator tau = single_state(cfg, "e", which, ov.grid);
    double value = 0.0;
    if (which == "umegaki") {
      value = umegaki_relative_entropy(rho, tau);
    } else if (which == "trace-quasi") {
      value = trace_quasi(rho, tau, get_number(cfg, "alpha", which));
    } else {
      value = hoeffding_divergence(rho, tau, get_int(cfg, "n", which),
                                   get_number(cfg, "r", which));
    }
    result["value_bits"] = num_or_inf(value);
    result["provenance"] = "closed-form";
    return result;
  }

  const StateSet p = required_set(cfg, "p", which, ov.grid);
  const StateSet e = required_set(cfg, "e", which, ov.grid);
  const double eps = get_number(cfg, "eps", which);
  DivergenceResult r;
  if (which == "dmin") {
    r = d_min(p, e, eps, opts);
  } else if (which == "dmin-constrained") {
    const StateSet k = cfg.contains("k") ? state_set_from_json(cfg["k"], ov.grid) : e;
    r = d_min_constrained(p, e, k, eps, opts);
  } else if (which == "dmax") {
    r = d_max(p, e, eps, opts);
  } else if (which == "dmax-pair") {
    r = d_max_pair(single_state(cfg, "p", which, ov.grid), single_state(cfg, "e", which, ov.grid),
                   eps, opts);
  } else if (which == "dmax-segment") {
    const double m_cap = ov.m_cap ? *ov.m_cap : get_number_or(cfg, "m_cap", 1e4);
    r = d_max_segment(p, e, eps, m_cap, opts);
  } else {
    schema_error("unknown divergence '" + which + "'");
  }
  result["result"] = to_json(r);
  return result;
}

json cmd_extract(const json& cfg, const SolverOptions& opts, const CliOverrides& ov,
                 TaskVerdict* verdict) {
  expect_keys(cfg, {"command", "out", "seed", "p", "e", "eps", "battery"}, "extract config");
  const TaskReport r =
      extractable_work(required_set(cfg, "p", "extract", ov.grid),
                       required_set(cfg, "e", "extract", ov.grid),
                       get_number(cfg, "eps", "extract"), battery_from_json(cfg, "extract"), opts);
  *verdict = r.verdict;
  return to_json(r);
}

json cmd_form(const json& cfg, const SolverOptions& opts, const CliOverrides& ov,
              TaskVerdict* verdict) {
  expect_keys(cfg, {"command", "out", "seed", "p", "e", "eps", "battery", "m_cap"}, "form config");
  const double m_cap = ov.m_cap ? *ov.m_cap : get_number_or(cfg, "m_cap", 1e4);
  const TaskReport r =
      formation_cost(required_set(cfg, "p", "form", ov.grid),
                     required_set(cfg, "e", "form", ov.grid), get_number(cfg, "eps", "form"),
                     battery_from_json(cfg, "form"), m_cap, opts);
  *verdict = r.verdict;
  return to_json(r);
}

json cmd_nogo(const json& cfg, const SolverOptions& opts, const CliOverrides& ov) {
  const std::string mode =
      cfg.contains("mode") ? get_string(cfg, "mode", "nogo") : std::string("purification");
  if (mode == "purification") {
    expect_keys(cfg, {"command", "out", "seed", "mode", "p", "e", "target_rho", "target_tau", "eps"},
                "nogo config");
    if (!cfg.contains("target_rho") || !cfg.contains("target_tau")) {
      schema_error("nogo purification requires target_rho and target_tau");
    }
    const NogoVerdict v = nogo_purification(
        required_set(cfg, "p", "nogo", ov.grid), required_set(cfg, "e", "nogo", ov.grid),
        make_density(matrix_from_json(cfg["target_rho"])),
        make_density(matrix_from_json(cfg["target_tau"])), get_number(cfg, "eps", "nogo"), opts);
    return to_json(v);
  }
  if (mode == "truncation") {
    expect_keys(cfg, {"command", "out", "seed", "mode", "m1", "m2", "n", "eps"}, "nogo config");
    const DirtyTruncationVerdict v = dirty_truncation_nogo(
        get_number(cfg, "m1", "nogo"), get_number(cfg, "m2", "nogo"), get_number(cfg, "n", "nogo"),
        get_number(cfg, "eps", "nogo"), opts);
    json j;
    j["achievable"] = v.achievable;
    j["threshold"] = v.threshold;
    j["cross_check"] = to_json(v.cross_check);
    j["provenance"] = "closed-form";
    return j;
  }
  schema_error("nogo mode must be 'purification' or 'truncation'");
}

json cmd_truncate(const json& cfg) {
  expect_keys(cfg, {"command", "out", "seed", "m", "n", "eps"}, "truncate config");
  return to_json(truncation(get_number(cfg, "m", "truncate"), get_number(cfg, "n", "truncate"),
                            get_number(cfg, "eps", "truncate")));
}

json cmd_irreversibility(const json& cfg, const SolverOptions& opts, const CliOverrides& ov) {
  expect_keys(cfg, {"command", "out", "seed", "n", "eps", "delta", "grid", "m_cap"},
              "example-irreversibility config");
  const int grid = ov.grid ? *ov.grid : get_int(cfg, "grid", "example-irreversibility");
  const double m_cap = ov.m_cap ? *ov.m_cap : get_number_or(cfg, "m_cap", 1e4);
  return to_json(irreversibility_example(get_int(cfg, "n", "example-irreversibility"),
                                         get_number(cfg, "eps", "example-irreversibility"),
                                         get_number(cfg, "delta", "example-irreversibility"), grid,
                                         m_cap, opts));
}

json cmd_error_at_rate(const json& cfg, const SolverOptions& opts, const CliOverrides& ov) {
  expect_keys(cfg, {"command", "out", "seed", "p", "e", "n", "r"}, "error-at-rate config");
  const double alpha =
      optimal_error_at_rate(required_set(cfg, "p", "error-at-rate", ov.grid),
                            required_set(cfg, "e", "error-at-rate", ov.grid),
                            get_int(cfg, "n", "error-at-rate"), get_number(cfg, "r", "error-at-rate"),
                            opts);
  json j;
  j["optimal_type1_error"] = alpha;
  j["provenance"] = "solver";
  return j;
}

json run_single(const json& cfg, const SolverOptions& opts, const CliOverrides& ov,
                TaskVerdict* verdict);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::vector<double> range_values(const json& range) {
  expect_keys(range, {"param", "values", "from", "to", "steps"}, "range");
  if (range.contains("values")) {
    if (!range["values"].is_array() || range["values"].empty()) {
      schema_error("range values must be a nonempty array");
    }
    std::vector<double> vals;
    for (const auto& v : range["values"]) {
      if (!v.is_number()) schema_error("range values must be numbers");
      vals.push_back(v.get<double>());
    }
    return vals;
  }
  const double from = get_number(range, "from", "range");
  const double to = get_number(range, "to", "range");
  const int steps = get_int(range, "steps", "range");
  if (steps < 1) schema_error("range needs at least one step");
  std::vector<double> vals;
  for (int i = 0; i < steps; ++i) {
    vals.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
  }
  return vals;
}

std::string csv_escape_status(const RateSweepRow& row) {
  if (row.c_dirty_status == TaskVerdict::Pass) return format_double(row.c_dirty);
  std::string s = to_string(row.c_dirty_status);
  if (row.c_dirty_analytic_infinite) s += "+analytic-infinite";
  return s;
}

std::string run_sweep(const json& cfg, const SolverOptions& opts, const CliOverrides& ov) {
  expect_keys(cfg, {"command", "out", "seed", "base", "range", "jobs"}, "sweep config");
  if (!cfg.contains("base") || !cfg.contains("range")) {
    schema_error("sweep requires 'base' and 'range'");
  }
  const json& base = cfg["base"];
  if (!base.contains("command")) schema_error("sweep base requires a command");
  const std::string base_cmd = base["command"].get<std::string>();
  const std::string param = get_string(cfg["range"], "param", "range");
  if (base.contains(param)) schema_error("ranged parameter '" + param + "' also fixed in base");
  const std::vector<double> values = range_values(cfg["range"]);

  struct RowOut {
    std::string line;
  };
  const bool irre = base_cmd == "example-irreversibility";

  std::string header;
  if (irre) {
    header = "n,eps,delta,grid,W,C,Wbar,Cbar_status,delta_W,delta_C,delta_Wbar";
  } else {
    header = param + ",value,status,gap";
  }

  const auto run_row = [&](double value) -> std::string {
    json row_cfg = base;
    if (param == "n" || param == "grid" || param == "steps") {
      row_cfg[param] = static_cast<int>(std::llround(value));
    } else {
      row_cfg[param] = value;
    }
    try {
      if (irre) {
        const int grid = ov.grid ? *ov.grid : (row_cfg.contains("grid") ? row_cfg["grid"].get<int>() : 9);
        const double m_cap =
            ov.m_cap ? *ov.m_cap
                     : (row_cfg.contains("m_cap") ? row_cfg["m_cap"].get<double>() : 1e4);
        const RateSweepRow row = irreversibility_example(
            row_cfg["n"].get<int>(), row_cfg["eps"].get<double>(), row_cfg["delta"].get<double>(),
            grid, m_cap, opts);
        std::string line;
        line += std::to_string(row.n) + ",";
        line += format_double(row.eps) + ",";
        line += format_double(row.delta) + ",";
        line += std::to_string(row.grid) + ",";
        line += format_double(row.w_clean) + ",";
        line += format_double(row.c_clean) + ",";
        line += format_double(row.w_dirty) + ",";
        line += csv_escape_status(row) + ",";
        line += format_double(row.delta_w_clean()) + ",";
        line += format_double(row.delta_c_clean()) + ",";
        line += format_double(row.delta_w_dirty());
        return line;
      }
      TaskVerdict verdict = TaskVerdict::Pass;
      const json out = run_single(row_cfg, opts, ov, &verdict);
      // Pull a representative scalar out of the command result.
      double v = kInf;
      double gap = 0.0;
      std::string status = "ok";
      if (out.contains("value_bits")) {
        v = out["value_bits"].is_number() ? out["value_bits"].get<double>() : kInf;
      } else if (out.contains("result") && out["result"].contains("value_bits")) {
        const auto& vb = out["result"]["value_bits"];
        v = vb.is_number() ? vb.get<double>() : kInf;
        if (out["result"].contains("certificate")) {
          gap = out["result"]["certificate"]["gap"].get<double>();
        }
        status = out["result"]["flag"].get<std::string>();
      } else if (out.contains("optimal_type1_error")) {
        v = out["optimal_type1_error"].get<double>();
      } else if (out.contains("feasible")) {
        v = out["feasible"].get<bool>() ? 1.0 : 0.0;
      }
      return format_double(value) + "," + format_double(v) + "," + status + "," +
             format_double(gap);
    } catch (const Error& e) {
      return (irre ? std::to_string(static_cast<int>(std::llround(value))) + ",,,,,,," : format_double(value) + ",,") +
             std::string("error:") + to_string(e.kind()) + (irre ? ",,," : ",0");
    }
  };

  const int jobs = std::max(1, ov.jobs);
  std::vector<std::string> lines(values.size());
  for (size_t i = 0; i < values.size(); i += static_cast<size_t>(jobs)) {
    std::vector<std::future<std::string>> batch;
    for (size_t k = i; k < std::min(values.size(), i + static_cast<size_t>(jobs)); ++k) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_row,
                                 values[k]));
    }
    for (size_t k = 0; k < batch.size(); ++k) lines[i + k] = batch[k].get();
  }

  std::string csv = header + "\n";
  for (const auto& line : lines) csv += line + "\n";
  return csv;
}

json run_single(const json& cfg, const SolverOptions& opts, const CliOverrides& ov,
                TaskVerdict* verdict) {
  const std::string command = get_string(cfg, "command", "config");
  if (command == "gibbs") return cmd_gibbs(cfg);
  if (command == "divergence") return cmd_divergence(cfg, opts, ov);
  if (command == "extract") return cmd_extract(cfg, opts, ov, verdict);
  if (command == "form") return cmd_form(cfg, opts, ov, verdict);
  if (command == "nogo") return cmd_nogo(cfg, opts, ov);
  if (command == "truncate") return cmd_truncate(cfg);
  if (command == "example-irreversibility") return cmd_irreversibility(cfg, opts, ov);
  if (command == "error-at-rate") return cmd_error_at_rate(cfg, opts, ov);
  schema_error("unknown command '" + command + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Job runner
// ---------------------------------------------------------------------------

JobOutcome run_job_text(const std::string& config_text, const CliOverrides& overrides) {
  JobOutcome outcome;
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    outcome.exit_code = 2;
    outcome.output = json{{"error", std::string("SchemaError: invalid JSON: ") + e.what()}}.dump(2);
    outcome.output += "\n";
    return outcome;
  }

  SolverOptions opts;
  if (const char* env = std::getenv("UQTHERMO_TOL")) {
    const double tol = std::atof(env);
    if (tol > 0.0) {
      opts.tol_gap = tol;
      opts.tol_feas = tol / 10.0;
    }
  }
  if (overrides.tol && *overrides.tol > 0.0) {
    opts.tol_gap = *overrides.tol;
    opts.tol_feas = *overrides.tol / 10.0;
  }

  try {
    if (!cfg.is_object()) schema_error("config must be a JSON object");
    if (cfg.contains("out")) {
      outcome.out_path = get_string(cfg, "out", "config");
    }
    if (overrides.out_path) outcome.out_path = *overrides.out_path;

    const std::string command = get_string(cfg, "command", "config");
    if (command == "sweep") {
      outcome.csv = true;
      outcome.output = run_sweep(cfg, opts, overrides);
      return outcome;
    }

    TaskVerdict verdict = TaskVerdict::Pass;
    const json result = run_single(cfg, opts, overrides, &verdict);
    json report;
    report["library"] = "uqthermo";
    report["version"] = UQTHERMO_VERSION;
    report["config_hash"] = config_hash(cfg);
    report["command"] = command;
    if (cfg.contains("seed")) report["seed"] = cfg["seed"];
    report["tolerances"] = {{"gap", opts.tol_gap}, {"feas", opts.tol_feas}};
    report["result"] = result;
    outcome.output = report.dump(2) + "\n";
    if (verdict == TaskVerdict::Fail) outcome.exit_code = 4;
    return outcome;
  } catch (const Error& e) {
    json report;
    report["library"] = "uqthermo";
    report["version"] = UQTHERMO_VERSION;
    report["config_hash"] = config_hash(cfg);
    report["error"] = e.what();
    report["error_kind"] = to_string(e.kind());
    outcome.output = report.dump(2) + "\n";
    switch (e.kind()) {
      case ErrorKind::SolverFailure:
      case ErrorKind::IllConditioned: outcome.exit_code = 3; break;
      case ErrorKind::VerificationFailed: outcome.exit_code = 4; break;
      default: outcome.exit_code = 2; break;
    }
    return outcome;
  }
}

}  // namespace uqthermo
