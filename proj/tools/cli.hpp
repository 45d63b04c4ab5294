#pragma once

// Command implementations for the snm executable. Kept in a header so the
// test suite can drive commands in-process.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snm/io.hpp"
#include "snm/snm.hpp"

namespace snm::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kCapability = 3, kInconclusive = 4 };

// --family accepts inline JSON, a path to a JSON file, or a shorthand
// "kind:key=value,..." such as "ksets:d=4,k=1,mu=1".
inline Family resolve_family(const std::string& spec) {
  detail::require(!spec.empty(), "--family is required");
  if (spec.front() == '{') return io::family_from_json(io::parse_json(spec));
  if (std::filesystem::exists(spec)) return io::family_from_json(io::parse_json(io::read_file(spec)));
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ValidationError("family spec '" + spec + "' is not JSON, a file, or kind:params");
  io::json j;
  j["kind"] = spec.substr(0, colon);
  io::json params = io::json::object();
  std::stringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("expected key=value in family shorthand, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("family shorthand value for '" + key + "' is not a number");
    }
    if (key == "mu") {
      j["mu"] = value;
    } else {
      detail::require(value >= 0.0 && value == std::floor(value), "family parameter '" + key + "' must be a count");
      params[key] = static_cast<std::int64_t>(value);
    }
  }
  j["params"] = params;
  return io::family_from_json(j);
}

inline void require_positive_grid(const std::vector<double>& grid, const std::string& what) {
  detail::require(!grid.empty(), what + " grid must be nonempty");
  for (double v : grid) detail::require(std::isfinite(v) && v > 0.0, what + " values must be positive");
}

// Writes `content` to DIR/name when an output directory was given.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }
  void write(const std::string& name, const std::string& content) const {
    if (enabled()) io::write_file((std::filesystem::path(dir_) / name).string(), content);
  }

 private:
  std::string dir_;
};

struct OptimizerFlags {
  std::size_t max_iterations = 5000;
  double step_scale = 0.5;
  double tolerance = 1e-6;
  std::size_t window = 500;
  double certificate_tolerance = 1e-6;

  void add_to(CLI::App* app) {
    app->add_option("--max-iter", max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--step-scale", step_scale, "c in c*tau/(sqrt(t)*||g||)")->check(CLI::PositiveNumber);
    app->add_option("--tolerance", tolerance, "Relative best-objective improvement over --window that counts as stalled")
        ->check(CLI::PositiveNumber);
    app->add_option("--window", window, "Stall window in iterations")->check(CLI::PositiveNumber);
    app->add_option("--cert-tol", certificate_tolerance, "Stationarity certificate tolerance")
        ->check(CLI::PositiveNumber);
  }

  OptimizerConfig config(double alpha, double tau, std::uint64_t seed) const {
    OptimizerConfig cfg;
    cfg.alpha = alpha;
    cfg.tau = tau;
    cfg.max_iterations = max_iterations;
    cfg.step_scale = step_scale;
    cfg.tolerance = tolerance;
    cfg.window = window;
    cfg.certificate_tolerance = certificate_tolerance;
    cfg.seed = seed;
    return cfg;
  }
};

struct Options {
  std::string family;
  std::vector<double> mu;
  std::vector<double> alpha;
  std::optional<double> tau;
  double delta = 0.5;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> design;
  std::string out;
  std::string format = "csv";
  OptimizerFlags optimizer;

  // adaptive
  std::size_t d = 32, k = 8, runs = 2000;
  double adaptive_delta = 0.1;
  std::optional<double> mu_factor;

  // stars
  std::size_t n = 13, attach = 3, seed_vertices = 5;
  std::optional<std::uint64_t> graph_seed;
};

inline std::string verdict_word(bool holds) { return holds ? "HOLDS" : "FAILS"; }

inline std::optional<DesignStrategy> design_for(const std::string& mode, std::size_t d, double tau) {
  if (mode == "isotropic" || mode == "opt") return std::nullopt;
  if (mode == "uniform") return uniform_design(d, tau);
  auto b = io::design_from_json(io::parse_json(io::read_file(mode)));
  detail::require(b.dimension() == d, "design file '" + mode + "' has the wrong dimension");
  return b;
}

// ---- family

inline int cmd_family(const Options& o, std::ostream& out) {
  const Family f = resolve_family(o.family);
  const auto spectrum = distance_spectrum(f, 0);
  if (o.format == "json") {
    io::json s = io::json::array();
    for (const auto& e : spectrum.entries) s.push_back({{"sq_distance", e.sq_distance}, {"multiplicity", e.multiplicity}});
    out << io::json{{"kind", to_string(f.kind())}, {"M", f.size()},         {"d", f.dimension()},
                    {"mu", f.signal()},            {"transitive", f.transitive()}, {"spectrum0", s}}
               .dump(2)
        << '\n';
  } else {
    io::write_row(out, {"kind", "M", "d", "mu", "transitive"});
    io::write_row(out, {to_string(f.kind()), io::num(f.size()), io::num(std::uint64_t(f.dimension())),
                        io::num(f.signal()), f.transitive() ? "1" : "0"});
  }
  std::ostringstream csv;
  io::write_row(csv, {"sq_distance", "multiplicity"});
  for (const auto& e : spectrum.entries) io::write_row(csv, {io::num(e.sq_distance), io::num(e.multiplicity)});
  Outputs(o.out).write("spectrum.csv", csv.str());
  Outputs(o.out).write("family.json", io::family_to_json(f).dump(2) + "\n");
  return kOk;
}

// ---- bounds

inline int cmd_bounds(const Options& o, std::ostream& out) {
  const Family f = resolve_family(o.family);
  detail::require(o.delta > 0.0 && o.delta < 1.0, "--delta must lie in (0, 1)");
  std::vector<double> alphas = o.alpha.empty() ? std::vector<double>{8.0, 1.0} : o.alpha;
  require_positive_grid(alphas, "alpha");
  std::optional<DesignStrategy> b;
  if (!o.design.empty()) {
    detail::require(o.design.size() == 1, "bounds takes at most one --design");
    detail::require(o.design.front() != "opt", "bounds evaluates a given design; use 'design' to optimize");
    b = design_for(o.design.front(), f.dimension(), o.tau.value_or(double(f.dimension())));
  }

  std::vector<std::pair<std::string, std::string>> rows;
  for (double a : alphas) rows.emplace_back("W(alpha=" + io::num(a) + ")", io::num(edf_or_sedf(f, a, b).value));
  const auto upper = mle_upper_bound_verdict(f, o.delta, b);
  const auto lower = minimax_lower_bound_holds(f, o.delta, b);
  rows.emplace_back("upper_bound", io::num(upper.w));
  rows.emplace_back("upper_bound_vacuous", upper.w > 1.0 ? "1" : "0");
  rows.emplace_back("upper_verdict", verdict_word(upper.holds));
  rows.emplace_back("lower_alpha", io::num(lower.alpha));
  rows.emplace_back("lower_W", io::num(lower.w));
  rows.emplace_back("lower_threshold", io::num(lower.threshold));
  rows.emplace_back("lower_verdict", verdict_word(lower.holds));
  rows.emplace_back("min_distance_bound", f.size() >= 2 ? io::num(min_distance_bound(f)) : io::num(0.0));
  if (f.kind() != FamilyKind::explicit_vectors) {
    const auto rate = closed_form_rate(f, o.tau);
    rows.emplace_back("rate_isotropic", io::num(rate.isotropic));
    if (rate.budgeted) rows.emplace_back("rate_budgeted", io::num(*rate.budgeted));
    if (rate.degree_ratio) rows.emplace_back("degree_ratio", io::num(*rate.degree_ratio));
  }

  std::ostringstream body;
  if (o.format == "json") {
    io::json j = io::json::object();
    // Verdict words stay strings; everything else is a number.
    for (const auto& [k, v] : rows) {
      const bool word = v == "HOLDS" || v == "FAILS";
      j[k] = word ? io::json(v) : io::json(std::stod(v));
    }
    j["delta"] = o.delta;
    body << j.dump(2) << '\n';
  } else {
    io::write_row(body, {"quantity", "value"});
    for (const auto& [k, v] : rows) io::write_row(body, {k, v});
  }
  out << body.str();
  Outputs(o.out).write(o.format == "json" ? "bounds.json" : "bounds.csv", body.str());
  return kOk;
}

// ---- design

inline int cmd_design(const Options& o, std::ostream& out) {
  const Family f = resolve_family(o.family);
  const double alpha = o.alpha.empty() ? 8.0 : o.alpha.front();
  const double tau = o.tau.value_or(double(f.dimension()));
  const auto result = optimize_design(f, o.optimizer.config(alpha, tau, o.seed));

  io::json j = io::design_to_json(result.design);
  j["alpha"] = alpha;
  j["status"] = to_string(result.status);
  j["objective"] = result.objective;
  j["uniform_objective"] = result.uniform_objective;
  j["iterations"] = result.trace.back().iteration;
  j["certificate"] = io::certificate_to_json(result.certificate);

  std::ostringstream allocation;
  io::write_row(allocation, {"i", "B", "g"});
  for (std::size_t i = 0; i < result.design.dimension(); ++i)
    io::write_row(allocation, {io::num(std::uint64_t(i)), io::num(result.design[i]),
                               i < result.certificate.sensitivity.size() ? io::num(result.certificate.sensitivity[i])
                                                                         : io::num(0.0)});
  std::ostringstream trace;
  io::write_trace_csv(trace, result.trace);

  out << (o.format == "json" ? j.dump(2) + "\n" : allocation.str());
  const Outputs files(o.out);
  files.write("design.json", j.dump(2) + "\n");
  files.write("allocation.csv", allocation.str());
  files.write("trace.csv", trace.str());
  return result.status == OptimizerStatus::inconclusive ? kInconclusive : kOk;
}

// ---- simulate

struct SimulationRow {
  double mu = 0.0;
  std::string mode;
  RiskEstimate estimate;
  double sedf8 = 0.0;  // W(V, 8[, B]) at this mu
  std::optional<DesignStrategy> design;
};

inline std::vector<SimulationRow> simulate_grid(const Family& base, const std::vector<double>& mus,
                                                const std::vector<std::string>& modes, double tau, double alpha,
                                                std::uint64_t trials, std::uint64_t seed,
                                                const OptimizerFlags& optimizer, bool& inconclusive) {
  std::vector<SimulationRow> rows;
  for (const auto& mode : modes)
    for (double mu : mus) {
      const Family f = scale_signal(base, mu);
      SimulationRow row{mu, mode, {}, 0.0, design_for(mode, f.dimension(), tau)};
      if (mode == "opt") {
        const auto r = optimize_design(f, optimizer.config(alpha, tau, seed));
        if (r.status == OptimizerStatus::inconclusive) inconclusive = true;
        row.design = r.design;
      }
      row.estimate = estimate_risk(f, row.design, trials, seed);
      row.sedf8 = mle_upper_bound(f, row.design);
      rows.push_back(std::move(row));
    }
  return rows;
}

inline std::string mode_name(const std::string& mode) {
  if (mode == "isotropic" || mode == "uniform") return mode;
  if (mode == "opt") return "optimized";
  return std::filesystem::path(mode).stem().string();
}

inline void write_simulation_csv(std::ostream& out, const std::vector<SimulationRow>& rows) {
  io::write_row(out, {"mu", "design_mode", "max_risk", "ci_lo", "ci_hi", "argmax", "N", "W8"});
  for (const auto& r : rows) {
    const auto& worst = r.estimate.per_hypothesis[r.estimate.argmax];
    io::write_row(out, {io::num(r.mu), mode_name(r.mode), io::num(r.estimate.max_risk), io::num(worst.ci.lo),
                        io::num(worst.ci.hi), io::num(r.estimate.argmax), io::num(r.estimate.trials),
                        io::num(r.sedf8)});
  }
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  const Family base = resolve_family(o.family);
  const std::vector<double> mus = o.mu.empty() ? std::vector<double>{base.signal()} : o.mu;
  require_positive_grid(mus, "mu");
  detail::require(o.trials >= 1, "--trials must be at least 1");
  const std::vector<std::string> modes = o.design.empty() ? std::vector<std::string>{"isotropic"} : o.design;
  const double tau = o.tau.value_or(double(base.dimension()));
  const double alpha = o.alpha.empty() ? 8.0 : o.alpha.front();
  bool inconclusive = false;
  const auto rows = simulate_grid(base, mus, modes, tau, alpha, o.trials, o.seed, o.optimizer, inconclusive);

  std::ostringstream csv;
  write_simulation_csv(csv, rows);
  if (o.format == "json") {
    io::json j = io::json::array();
    for (const auto& r : rows) {
      auto e = io::risk_to_json(r.estimate);
      e["mu"] = r.mu;
      e["design_mode"] = mode_name(r.mode);
      e["W8"] = r.sedf8;
      if (r.design) e["design"] = io::design_to_json(*r.design);
      j.push_back(e);
    }
    out << j.dump(2) << '\n';
  } else {
    out << csv.str();
  }
  const Outputs files(o.out);
  files.write("simulate.csv", csv.str());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::ostringstream per;
    io::write_risk_csv(per, rows[i].estimate);
    files.write("risk_" + mode_name(rows[i].mode) + "_" + std::to_string(i % mus.size()) + ".csv", per.str());
  }
  return inconclusive ? kInconclusive : kOk;
}

// ---- adaptive

inline int cmd_adaptive(const Options& o, std::ostream& out) {
  detail::require(o.runs >= 1, "--runs must be at least 1");
  AdaptiveParams p{o.d, o.k, 0.0, o.tau.value_or(4096.0), o.adaptive_delta};
  p.validate();
  const double threshold = required_signal(p.d, p.k, p.tau, p.delta);
  if (!o.mu.empty()) {
    detail::require(o.mu.size() == 1, "adaptive takes a single --mu");
    p.mu = o.mu.front();
  } else {
    p.mu = threshold * o.mu_factor.value_or(1.0);
  }
  p.validate();
  const auto batch = run_adaptive_batch(p, o.runs, o.seed);
  const auto cmp = compare_adaptive(p);

  std::ostringstream csv;
  io::write_adaptive_csv(csv, batch);
  const io::json summary = {
      {"d", p.d},
      {"k", p.k},
      {"mu", p.mu},
      {"tau", p.tau},
      {"delta", p.delta},
      {"runs", o.runs},
      {"seed", o.seed},
      {"probe_cap", probe_cap(p.d, p.k, p.delta)},
      {"energy_per_measurement", per_measurement_energy(p)},
      {"success_rate", batch.success_rate()},
      {"success_ci", {batch.success_ci.lo, batch.success_ci.hi}},
      {"hit_rate", batch.hit_rate()},
      {"hit_rate_predicted",
       1.0 - std::pow(1.0 - double(p.k * p.k) / double(p.d * p.d), double(probe_cap(p.d, p.k, p.delta)))},
      {"required_signal", cmp.required_signal},
      {"interactive_rate", cmp.interactive_rate},
      {"noninteractive_rate", cmp.noninteractive_rate},
      {"noninteractive_lower_bound",
       {{"alpha", cmp.noninteractive_lower_bound.alpha},
        {"W", cmp.noninteractive_lower_bound.w},
        {"threshold", cmp.noninteractive_lower_bound.threshold},
        {"verdict", verdict_word(cmp.noninteractive_lower_bound.holds)}}}};
  out << (o.format == "json" ? summary.dump(2) + "\n" : csv.str());
  const Outputs files(o.out);
  files.write("adaptive.csv", csv.str());
  files.write("adaptive_summary.json", summary.dump(2) + "\n");
  return kOk;
}

// ---- stars experiment

inline int cmd_stars(const Options& o, std::ostream& out) {
  const std::vector<double> mus = o.mu.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0, 4.0} : o.mu;
  require_positive_grid(mus, "mu");
  detail::require(o.trials >= 1, "--trials must be at least 1");
  const Graph g = barabasi_albert(o.n, o.attach, o.graph_seed.value_or(o.seed), o.seed_vertices);
  const Family base = make_stars(g, 1.0);
  const double tau = o.tau.value_or(double(g.edge_count()));
  const double alpha = o.alpha.empty() ? 8.0 : o.alpha.front();
  bool inconclusive = false;
  const auto rows =
      simulate_grid(base, mus, {"uniform", "opt"}, tau, alpha, o.trials, o.seed, o.optimizer, inconclusive);

  std::ostringstream csv, vertices, allocation;
  io::write_row(csv, {"mu", "design_mode", "max_risk", "ci_lo", "ci_hi", "min_success", "sedf"});
  io::write_row(vertices, {"mu", "design_mode", "vertex", "degree", "success_prob"});
  io::write_row(allocation, {"mu", "design_mode", "edge", "u", "v", "energy"});
  for (const auto& r : rows) {
    const auto& worst = r.estimate.per_hypothesis[r.estimate.argmax];
    const double sedf = snm::sedf(scale_signal(base, r.mu), alpha, *r.design).value;
    io::write_row(csv, {io::num(r.mu), mode_name(r.mode), io::num(r.estimate.max_risk), io::num(worst.ci.lo),
                        io::num(worst.ci.hi), io::num(r.estimate.min_success()), io::num(sedf)});
    for (const auto& h : r.estimate.per_hypothesis)
      io::write_row(vertices, {io::num(r.mu), mode_name(r.mode), io::num(h.hypothesis),
                               io::num(std::uint64_t(g.degree(h.hypothesis))), io::num(1.0 - h.phat)});
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      io::write_row(allocation, {io::num(r.mu), mode_name(r.mode), io::num(std::uint64_t(e)),
                                 io::num(std::uint64_t(g.edges()[e].first)),
                                 io::num(std::uint64_t(g.edges()[e].second)), io::num((*r.design)[e])});
  }
  out << csv.str();
  const Outputs files(o.out);
  files.write("stars.csv", csv.str());
  files.write("stars_vertices.csv", vertices.str());
  files.write("stars_allocation.csv", allocation.str());
  files.write("graph.json", io::graph_to_json(g).dump(2) + "\n");
  return inconclusive ? kInconclusive : kOk;
}

// ---- config files
//
// `--config FILE` reads a JSON object whose keys are flag names without the
// leading dashes, e.g. {"family": {...}, "mu": [0.5, 1], "trials": 2000}.
// Arrays become comma lists, objects are passed as inline JSON, and flags
// given on the command line win. A "command" key supplies the subcommand
// when none is given.

inline std::string config_value(const io::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return io::format_number(v.get<double>());
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) {
      detail::require(!e.is_array() && !e.is_object(), "config arrays must hold scalars");
      joined += (joined.empty() ? "" : ",") + config_value(e);
    }
    return joined;
  }
  return v.dump();
}

inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      detail::require(i + 1 < args.size(), "--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!path) return out;
  const io::json cfg = io::parse_json(io::read_file(*path));
  detail::require(cfg.is_object(), "config file must hold a JSON object");
  if (out.size() < 2 || out[1].rfind("-", 0) == 0) {
    detail::require(cfg.contains("command") && cfg.at("command").is_string(), "config file needs a \"command\"");
    out.insert(out.begin() + 1, cfg.at("command").get<std::string>());
  }
  auto given = [&](const std::string& flag) {
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || given("--" + key)) continue;
    out.push_back("--" + key);
    out.push_back(config_value(value));
  }
  return out;
}

// ---- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  CLI::App app{"Structured normal means: families, EDF bounds, MLE risk, sensing designs"};
  app.footer("Every subcommand also accepts --config FILE: a JSON object of flag values.");
  app.require_subcommand(1);
  Options o;

  auto add_family = [&](CLI::App* c) {
    c->add_option("--family", o.family, "Family: inline JSON, JSON file, or kind:key=value,... (e.g. ksets:d=4,k=1)")
        ->required();
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--out", o.out, "Directory for output files");
  };

  auto* family = app.add_subcommand("family", "Summarize a family (kind, M, d) and its distance spectrum");
  add_family(family);
  add_format(family);

  auto* bounds = app.add_subcommand("bounds", "EDF bounds, lower-bound verdict, min-distance bound, closed-form rate");
  add_family(bounds);
  bounds->add_option("--alpha", o.alpha, "alpha values (default 8,1)")->delimiter(',');
  bounds->add_option("--delta", o.delta, "Risk level for the lower-bound verdict");
  bounds->add_option("--tau", o.tau, "Budget for budgeted rates and --design uniform");
  bounds->add_option("--design", o.design, "uniform or a design JSON file (default isotropic)");
  add_format(bounds);

  auto* design = app.add_subcommand("design", "Minimize the SEDF over budgeted designs and certify stationarity");
  add_family(design);
  design->add_option("--alpha", o.alpha, "alpha (default 8)");
  design->add_option("--tau", o.tau, "Budget (default d)");
  design->add_option("--seed", o.seed, "Seed");
  o.optimizer.add_to(design);
  add_format(design);
  design->footer(
      "CSV columns: i,B,g (coordinate, energy, averaged subgradient). --out writes design.json, allocation.csv, "
      "trace.csv (iter,objective,best_objective).");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MLE risk over a mu grid for each design mode");
  add_family(simulate);
  simulate->add_option("--mu", o.mu, "mu grid (default: the family's mu)")->delimiter(',');
  simulate->add_option("--trials", o.trials, "Trials per hypothesis");
  simulate->add_option("--seed", o.seed, "Seed");
  simulate->add_option("--design", o.design, "Modes: isotropic, uniform, opt, or design JSON files")->delimiter(',');
  simulate->add_option("--tau", o.tau, "Budget for uniform/opt (default d)");
  simulate->add_option("--alpha", o.alpha, "alpha used by opt (default 8)");
  o.optimizer.add_to(simulate);
  add_format(simulate);
  simulate->footer("CSV columns: mu,design_mode,max_risk,ci_lo,ci_hi,argmax,N,W8");

  auto* adaptive = app.add_subcommand("adaptive", "Two-phase interactive bicluster recovery");
  adaptive->add_option("--d", o.d, "Matrix side");
  adaptive->add_option("--k", o.k, "Bicluster side");
  adaptive->add_option("--mu", o.mu, "Signal (default: required signal)");
  adaptive->add_option("--mu-factor", o.mu_factor, "Signal as a multiple of the required signal");
  adaptive->add_option("--tau", o.tau, "Budget (default 4096)");
  adaptive->add_option("--delta", o.adaptive_delta, "Failure target");
  adaptive->add_option("--runs", o.runs, "Independent runs");
  adaptive->add_option("--seed", o.seed, "Seed");
  add_format(adaptive);
  adaptive->footer("CSV columns: run,seed,mu,tau,success,probes,energy_spent");

  auto* stars = app.add_subcommand("stars", "Stars on a Barabasi-Albert graph: uniform vs optimized design");
  stars->add_option("--n", o.n, "Vertices");
  stars->add_option("--attach", o.attach, "Edges per new vertex");
  stars->add_option("--seed-vertices", o.seed_vertices, "Complete seed graph size (0 = attach+1)");
  stars->add_option("--graph-seed", o.graph_seed, "Graph seed (default --seed)");
  stars->add_option("--mu", o.mu, "mu grid")->delimiter(',');
  stars->add_option("--tau", o.tau, "Budget (default edge count)");
  stars->add_option("--alpha", o.alpha, "alpha for the design objective (default 8)");
  stars->add_option("--trials", o.trials, "Trials per hypothesis");
  stars->add_option("--seed", o.seed, "Seed");
  o.optimizer.add_to(stars);
  stars->add_option("--out", o.out, "Directory for output files");
  stars->footer("CSV columns: mu,design_mode,max_risk,ci_lo,ci_hi,min_success,sedf");

  try {
    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kValidation;
    }
    if (*family) return cmd_family(o, out);
    if (*bounds) return cmd_bounds(o, out);
    if (*design) return cmd_design(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*adaptive) return cmd_adaptive(o, out);
    if (*stars) return cmd_stars(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const CapabilityError& e) {
    err << "refused: " << e.what() << '\n';
    return kCapability;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace snm::cli
