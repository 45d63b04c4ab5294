#pragma once

// JSON and CSV interchange. Column layouts are listed in SCHEMA.md.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "snm/adaptive.hpp"
#include "snm/design.hpp"
#include "snm/design_strategy.hpp"
#include "snm/edf.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/graph.hpp"
#include "snm/risk.hpp"
#include "snm/sampling.hpp"
#include "snm/zoo.hpp"

namespace snm::io {

using nlohmann::json;

// Shortest representation that round-trips.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

inline std::size_t get_count(const json& j, const char* key) {
  const auto v = get_field<std::int64_t>(j, key);
  snm::detail::require(v >= 0, std::string("field '") + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

// ---- graphs: {"n": int, "edges": [[u, v], ...]}, 0-based vertices

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return {{"n", g.vertex_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  const std::size_t n = detail::get_count(j, "n");
  const auto edges = detail::get_field<std::vector<std::vector<std::int64_t>>>(j, "edges");
  Graph g(n);
  for (const auto& e : edges) {
    snm::detail::require(e.size() == 2, "each edge must have two endpoints");
    snm::detail::require(e[0] >= 0 && e[1] >= 0, "edge endpoints must be nonnegative");
    g.add_edge(static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]));
  }
  return g;
}

// ---- families
// Explicit:   {"d": int, "mu": float, "vectors": [[...], ...]}   (vectors are base vectors, scaled by mu)
// Structured: {"kind": "ksets"|"biclusters"|"cbm"|"stars", "params": {...}, "mu": float}
//   ksets, biclusters: {"d", "k"}; cbm: {"n", "m"};
//   stars: {"n", "edges"} or {"ba": {"n", "attach", "seed", "seed_vertices"?}}

inline double read_mu(const json& j) {
  const double mu = j.contains("mu") ? detail::get_field<double>(j, "mu") : 1.0;
  snm::detail::require(std::isfinite(mu) && mu >= 0.0, "mu must be finite and nonnegative");
  return mu;
}

inline Graph stars_graph_from_params(const json& params) {
  if (params.contains("ba")) {
    const auto& ba = params.at("ba");
    const std::size_t n = detail::get_count(ba, "n");
    const std::size_t attach = detail::get_count(ba, "attach");
    const auto seed = ba.contains("seed") ? detail::get_field<std::uint64_t>(ba, "seed") : 0;
    const std::size_t seed_vertices = ba.contains("seed_vertices") ? detail::get_count(ba, "seed_vertices") : 0;
    return barabasi_albert(n, attach, seed, seed_vertices);
  }
  return graph_from_json(params);
}

inline Family family_from_json(const json& j) {
  snm::detail::require(j.is_object(), "family spec must be a JSON object");
  const double mu = read_mu(j);
  if (j.contains("vectors")) {
    auto vectors = detail::get_field<std::vector<std::vector<double>>>(j, "vectors");
    if (j.contains("d"))
      for (const auto& v : vectors)
        snm::detail::require(v.size() == detail::get_count(j, "d"), "vector length differs from declared d");
    return Family::from_vectors(std::move(vectors), mu);
  }
  const auto kind = detail::get_field<std::string>(j, "kind");
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (kind == "ksets") return make_ksets(detail::get_count(params, "d"), detail::get_count(params, "k"), mu);
  if (kind == "biclusters")
    return make_biclusters(detail::get_count(params, "d"), detail::get_count(params, "k"), mu);
  if (kind == "cbm") return make_cbm_family({detail::get_count(params, "n"), detail::get_count(params, "m"), mu});
  if (kind == "stars") return make_stars(stars_graph_from_params(params), mu);
  throw ValidationError("unknown family kind '" + kind + "'");
}

inline json family_to_json(const Family& family) {
  const auto& model = family.model();
  if (const auto* ks = dynamic_cast<const KSetsModel*>(&model))
    return {{"kind", "ksets"}, {"params", {{"d", ks->d()}, {"k", ks->k()}}}, {"mu", family.signal()}};
  if (const auto* bc = dynamic_cast<const BiclusterModel*>(&model))
    return {{"kind", "biclusters"}, {"params", {{"d", bc->d()}, {"k", bc->k()}}}, {"mu", family.signal()}};
  if (const auto* cb = dynamic_cast<const CbmModel*>(&model))
    return {{"kind", "cbm"}, {"params", {{"n", cb->n()}, {"m", cb->m()}}}, {"mu", family.signal()}};
  if (const auto* st = dynamic_cast<const StarsModel*>(&model))
    return {{"kind", "stars"}, {"params", graph_to_json(st->graph())}, {"mu", family.signal()}};
  const Matrix base = family.with_signal(1.0).materialize();
  json vectors = json::array();
  for (std::uint64_t r = 0; r < base.rows; ++r) {
    const auto row = base.row(r);
    vectors.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"d", family.dimension()}, {"mu", family.signal()}, {"vectors", vectors}};
}

// ---- EDF reports: {"alpha", "W", "Wj", "argmax"}

inline json edf_report_to_json(const EdfReport& r) {
  json j = {{"alpha", r.alpha}, {"W", r.value}, {"Wj", r.per_hypothesis}, {"argmax", r.argmax}};
  if (r.compressed) j["compressed"] = true;
  if (r.design) j["B"] = std::vector<double>(r.design->energies().begin(), r.design->energies().end());
  return j;
}

// ---- designs: {"tau", "B"}

inline json design_to_json(const DesignStrategy& b) {
  return {{"tau", b.budget()}, {"B", std::vector<double>(b.energies().begin(), b.energies().end())}};
}

inline DesignStrategy design_from_json(const json& j) {
  auto b = detail::get_field<std::vector<double>>(j, "B");
  if (j.contains("tau")) return DesignStrategy(std::move(b), detail::get_field<double>(j, "tau"));
  return DesignStrategy(std::move(b));
}

// ---- observations: {"y", "hypothesis": int|null, "B": [...]|"isotropic"}

inline json observation_to_json(const Observation& obs) {
  json j = {{"y", obs.y}};
  j["hypothesis"] = obs.hypothesis ? json(*obs.hypothesis) : json(nullptr);
  if (obs.design)
    j["B"] = std::vector<double>(obs.design->energies().begin(), obs.design->energies().end());
  else
    j["B"] = "isotropic";
  return j;
}

inline Observation observation_from_json(const json& j) {
  Observation obs;
  obs.y = detail::get_field<std::vector<double>>(j, "y");
  if (j.contains("hypothesis") && !j.at("hypothesis").is_null())
    obs.hypothesis = detail::get_field<std::uint64_t>(j, "hypothesis");
  if (j.contains("B") && !(j.at("B").is_string() && j.at("B").get<std::string>() == "isotropic")) {
    if (j.at("B").is_string()) throw ValidationError("B must be an array or \"isotropic\"");
    obs.design = DesignStrategy(detail::get_field<std::vector<double>>(j, "B"));
  }
  return obs;
}

// ---- CSV

inline void write_row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

inline std::string num(double x) { return format_number(x); }
inline std::string num(std::uint64_t x) { return std::to_string(x); }

// j,errors,N,phat,lo,hi
inline void write_risk_csv(std::ostream& out, const RiskEstimate& est) {
  write_row(out, {"j", "errors", "N", "phat", "lo", "hi"});
  for (const auto& h : est.per_hypothesis)
    write_row(out, {num(h.hypothesis), num(h.errors), num(est.trials), num(h.phat), num(h.ci.lo), num(h.ci.hi)});
}

inline json risk_to_json(const RiskEstimate& est) {
  json rows = json::array();
  for (const auto& h : est.per_hypothesis)
    rows.push_back({{"j", h.hypothesis}, {"errors", h.errors}, {"phat", h.phat}, {"lo", h.ci.lo}, {"hi", h.ci.hi}});
  return {{"N", est.trials},        {"seed", est.seed},     {"isotropic", est.isotropic},
          {"max_risk", est.max_risk}, {"argmax", est.argmax}, {"per_hypothesis", rows}};
}

// iter,objective,best_objective
inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  write_row(out, {"iter", "objective", "best_objective"});
  for (const auto& r : trace) write_row(out, {num(std::uint64_t(r.iteration)), num(r.objective), num(r.best_objective)});
}

inline json certificate_to_json(const StationarityCertificate& c) {
  json pi = json::array();
  for (const auto& [j, w] : c.pi) pi.push_back({{"j", j}, {"weight", w}});
  return {{"verdict", to_string(c.verdict)},
          {"g", c.sensitivity},
          {"max_relative_deviation", std::isfinite(c.max_relative_deviation) ? json(c.max_relative_deviation)
                                                                             : json(nullptr)},
          {"tolerance", c.tolerance},
          {"objective", c.objective},
          {"pi", pi},
          {"convention", c.convention}};
}

// run,seed,mu,tau,success,probes,energy_spent
inline void write_adaptive_csv(std::ostream& out, const AdaptiveBatch& batch) {
  write_row(out, {"run", "seed", "mu", "tau", "success", "probes", "energy_spent"});
  for (std::size_t r = 0; r < batch.runs.size(); ++r) {
    const auto& run = batch.runs[r];
    write_row(out, {num(std::uint64_t(r)), num(batch.seed), num(batch.params.mu), num(batch.params.tau),
                    run.success.value_or(false) ? "1" : "0", num(std::uint64_t(run.probes)), num(run.energy_spent)});
  }
}

}  // namespace snm::io
