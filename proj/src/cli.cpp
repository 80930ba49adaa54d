#include "pcsf/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "pcsf/log.hpp"
#include "pcsf/normalizer.hpp"
#include "pcsf/verify.hpp"

namespace pcsf::cli {

namespace fs = std::filesystem;
using io::json;

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::normalized: return "normalized";
    case Experiment::rates: return "rates";
    case Experiment::verify: return "verify";
    case Experiment::sweep: return "sweep";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::simulate, Experiment::normalized, Experiment::rates, Experiment::verify,
                 Experiment::sweep}) {
    if (s == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

namespace {

const char* to_string(InitSpec::Kind k) {
  switch (k) {
    case InitSpec::Kind::round: return "round";
    case InitSpec::Kind::perturbed: return "perturbed";
    case InitSpec::Kind::support: return "support";
    case InitSpec::Kind::state: return "state";
    case InitSpec::Kind::random: return "random";
  }
  return "?";
}

InitSpec::Kind parse_init_kind(const std::string& s) {
  for (auto k : {InitSpec::Kind::round, InitSpec::Kind::perturbed, InitSpec::Kind::support, InitSpec::Kind::state,
                 InitSpec::Kind::random}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("init.kind must be round, perturbed, support, state or random; got '" + s + "'");
}

// Values under these keys are replaced wholesale instead of merged.
bool is_opaque(const std::string& key) { return key == "support" || key == "state" || key == "harmonics"; }

void merge_into(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (base[key].is_object() && value.is_object() && !is_opaque(key)) {
      merge_into(base[key], value, path);
    } else {
      base[key] = value;
    }
  }
}

template <typename T>
T get(const json& doc, const char* section, const char* key) {
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("config field '{}.{}' has the wrong type", section, key));
  }
}

template <typename T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("config field '{}' has the wrong type", key));
  }
}

std::string fixed_row(const std::string& a, const std::string& b) { return fmt::format("{:<24} {:>24}\n", a, b); }

json sidecar(const RunConfig& cfg, const Trajectory& traj, const State& initial, const BlowupEstimate* est) {
  json doc{{"domain_tag", to_string(traj.domain)},
           {"params", io::to_json(cfg.params)},
           {"opts", io::to_json(cfg.opts)},
           {"init_kind", to_string(cfg.init.kind)},
           {"initial", io::to_json(initial)},
           {"samples", traj.samples.size()}};
  if (cfg.init.kind == InitSpec::Kind::support) doc["init_support"] = io::to_json(cfg.init.support);
  if (est) doc["estimate"] = io::to_json(*est);
  doc["warnings"] = traj.warnings;
  doc["meta"] = json{{"tool", "pcsf"}, {"timestamp", io::utc_timestamp()}};
  return doc;
}

double find_fitted(const std::vector<RateReport>& reports, const std::string& quantity) {
  for (const auto& r : reports) {
    if (r.quantity == quantity) return r.fitted;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double RunConfig::effective_tau_max() const { return tau_max ? *tau_max : default_tau_max(params.p); }

void RunConfig::validate() const {
  params.validate();
  opts.validate();
  if (!(delta > 0) || !(delta < 0.25)) throw ConfigError("delta must lie in (0, 1/4)");
  if (!(c_p > 0)) throw ConfigError("c_p must be positive");
  if (tau_max && !(*tau_max > 1)) throw ConfigError("tau_max must exceed 1 (the start of the rate window)");
  if (jobs < 0) throw ConfigError("jobs must be non-negative");
  if (experiment == Experiment::sweep) {
    if (sweep.p_list.empty()) throw ConfigError("sweep.p_list must not be empty");
    if (sweep.seeds.empty()) throw ConfigError("sweep.seeds must not be empty");
    for (int p : sweep.p_list) {
      if (p < 1) throw ConfigError("p must be ≥ 1");
    }
  }
  std::error_code ec;
  if (!fs::is_directory(output_dir, ec)) throw IoError("output directory does not exist: " + output_dir.string());
}

json default_config_json() {
  const RunConfig d;
  return json{{"experiment", to_string(d.experiment)},
              {"params", io::to_json(d.params)},
              {"opts", io::to_json(d.opts)},
              {"init",
               json{{"kind", to_string(d.init.kind)},
                    {"amplitude", d.init.amplitude},
                    {"support", io::to_json(d.init.support)},
                    {"state", nullptr},
                    {"seed", d.init.seed}}},
              {"output_dir", d.output_dir.string()},
              {"delta", d.delta},
              {"c_p", d.c_p},
              {"tau_max", nullptr},
              {"tolerances",
               json{{"blowup", d.tolerances.blowup},
                    {"mode_decay", d.tolerances.mode_decay},
                    {"convergence", d.tolerances.convergence},
                    {"mean_offset_factor", d.tolerances.mean_offset_factor}}},
              {"sweep", json{{"p_list", d.sweep.p_list}, {"seeds", d.sweep.seeds}, {"fail_cells", json::array()}}},
              {"jobs", d.jobs}};
}

RunConfig parse_config(const json& user) {
  json doc = default_config_json();
  merge_into(doc, user, "");
  RunConfig c;
  c.experiment = parse_experiment(get<std::string>(doc, "experiment"));
  c.params.p = get<int>(doc, "params", "p");
  c.params.N = get<int>(doc, "params", "N");
  c.params.rhs_method = parse_rhs_method(get<std::string>(doc, "params", "rhs_method"));
  c.opts.rel_tol = get<double>(doc, "opts", "rel_tol");
  c.opts.abs_tol = get<double>(doc, "opts", "abs_tol");
  c.opts.dt_init = get<double>(doc, "opts", "dt_init");
  c.opts.dt_min = get<double>(doc, "opts", "dt_min");
  c.opts.blowup_cap = get<double>(doc, "opts", "blowup_cap");
  c.opts.max_steps = get<long>(doc, "opts", "max_steps");
  c.opts.sample_stride = get<int>(doc, "opts", "sample_stride");
  c.init.kind = parse_init_kind(get<std::string>(doc, "init", "kind"));
  c.init.amplitude = get<double>(doc, "init", "amplitude");
  c.init.support = io::support_from_json(doc["init"]["support"]);
  if (!doc["init"]["state"].is_null()) c.init.state = io::state_from_json(doc["init"]["state"]);
  c.init.seed = get<std::uint64_t>(doc, "init", "seed");
  c.output_dir = get<std::string>(doc, "output_dir");
  c.delta = get<double>(doc, "delta");
  c.c_p = get<double>(doc, "c_p");
  if (!doc["tau_max"].is_null()) c.tau_max = get<double>(doc, "tau_max");
  c.tolerances.blowup = get<double>(doc, "tolerances", "blowup");
  c.tolerances.mode_decay = get<double>(doc, "tolerances", "mode_decay");
  c.tolerances.convergence = get<double>(doc, "tolerances", "convergence");
  c.tolerances.mean_offset_factor = get<double>(doc, "tolerances", "mean_offset_factor");
  c.sweep.p_list = get<std::vector<int>>(doc, "sweep", "p_list");
  c.sweep.seeds = get<std::vector<std::uint64_t>>(doc, "sweep", "seeds");
  try {
    for (const auto& cell : doc["sweep"]["fail_cells"]) {
      c.sweep.fail_cells.emplace_back(cell.at(0).get<int>(), cell.at(1).get<std::uint64_t>());
    }
  } catch (const json::exception&) {
    throw ConfigError("sweep.fail_cells must be a list of [p, seed] pairs");
  }
  c.jobs = get<int>(doc, "jobs");
  if (c.init.kind == InitSpec::Kind::state && !c.init.state) throw ConfigError("init.kind 'state' needs init.state");
  return c;
}

json to_json(const RunConfig& cfg) {
  json doc = default_config_json();
  doc["experiment"] = to_string(cfg.experiment);
  doc["params"] = io::to_json(cfg.params);
  doc["opts"] = io::to_json(cfg.opts);
  doc["init"] = json{{"kind", to_string(cfg.init.kind)},
                     {"amplitude", cfg.init.amplitude},
                     {"support", io::to_json(cfg.init.support)},
                     {"state", cfg.init.state ? io::to_json(*cfg.init.state) : json(nullptr)},
                     {"seed", cfg.init.seed}};
  doc["output_dir"] = cfg.output_dir.string();
  doc["delta"] = cfg.delta;
  doc["c_p"] = cfg.c_p;
  doc["tau_max"] = cfg.tau_max ? json(*cfg.tau_max) : json(nullptr);
  doc["tolerances"] = json{{"blowup", cfg.tolerances.blowup},
                           {"mode_decay", cfg.tolerances.mode_decay},
                           {"convergence", cfg.tolerances.convergence},
                           {"mean_offset_factor", cfg.tolerances.mean_offset_factor}};
  json cells = json::array();
  for (const auto& [p, seed] : cfg.sweep.fail_cells) cells.push_back(json::array({p, seed}));
  doc["sweep"] = json{{"p_list", cfg.sweep.p_list}, {"seeds", cfg.sweep.seeds}, {"fail_cells", cells}};
  doc["jobs"] = cfg.jobs;
  return doc;
}

void apply_override(json& doc, const std::string& dotted_path, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::string parent;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted_path.find('.', start);
    const std::string key = dotted_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("malformed override path '" + dotted_path + "'");
    if (!node->is_object()) throw ConfigError("override path '" + dotted_path + "' descends into a non-object");
    if (!node->contains(key) && parent != "harmonics") {
      throw ConfigError("unknown config key '" + dotted_path + "'");
    }
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    parent = key;
    start = dot + 1;
  }
}

State initial_state(const RunConfig& cfg) {
  const ModeSet modes = cfg.params.modes();
  switch (cfg.init.kind) {
    case InitSpec::Kind::round: return State::constant(modes, 1.0);
    case InitSpec::Kind::perturbed: return curvature_from_support(perturbed_round_spec(cfg.init.amplitude), modes);
    case InitSpec::Kind::support: return curvature_from_support(cfg.init.support, modes);
    case InitSpec::Kind::state: {
      State s = *cfg.init.state;
      if (s.modes() != modes) throw ConfigError("init.state radius does not match params.N");
      return s;
    }
    case InitSpec::Kind::random: return random_admissible(cfg.init.seed, modes, cfg.delta, cfg.c_p).state;
  }
  throw ConfigError("unhandled init kind");
}

RatesRun rates_pipeline(const State& psi, const FlowParams& params, const IntegratorOptions& opts, double tau_max,
                        const RateTolerances& tol, std::optional<double> delta, std::optional<double> c_p) {
  RatesRun run;
  std::tie(run.physical, run.estimate) = integrate_to_blowup(psi, params, opts, delta, c_p);
  run.normalized = normalize_trajectory(run.physical, run.estimate.T);
  run.reports = mode_decay_report(run.physical, run.estimate.T, params, tol);
  for (int l = 0; l <= 2; ++l) run.reports.push_back(convergence_report(run.normalized, l, 1.0, tau_max, params, tol));
  run.reports.push_back(mean_offset_report(run.normalized, 0.5, tau_max, params, tol));
  return run;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const State psi = initial_state(cfg);
  const auto [traj, est] = integrate_to_blowup(psi, cfg.params, cfg.opts, cfg.delta, cfg.c_p);
  io::write_atomic(cfg.output_dir / "trajectory.csv", io::trajectory_csv(traj));
  io::write_atomic(cfg.output_dir / "trajectory.json", sidecar(cfg, traj, psi, &est).dump(2) + "\n");
  out << fixed_row("quantity", "value") << fixed_row("T", io::format_real(est.T))
      << fixed_row("T_uncertainty", fmt::format("{:.3e}", est.uncertainty))
      << fixed_row("samples", std::to_string(traj.samples.size()))
      << fixed_row("final_khat0", fmt::format("{:.6e}", traj.samples.back().mean()));
  return 0;
}

int cmd_normalized(const RunConfig& cfg, std::ostream& out) {
  const State psi = initial_state(cfg);
  const auto [physical, est] = integrate_to_blowup(psi, cfg.params, cfg.opts, cfg.delta, cfg.c_p);
  const auto start = normalized_initial(psi, est.T, cfg.params);
  const Trajectory traj = integrate_normalized(start, cfg.params, cfg.opts, cfg.effective_tau_max());
  io::write_atomic(cfg.output_dir / "normalized.csv", io::trajectory_csv(traj));
  io::write_atomic(cfg.output_dir / "normalized.json", sidecar(cfg, traj, start.state, &est).dump(2) + "\n");
  const State& last = traj.samples.back();
  out << fixed_row("quantity", "value") << fixed_row("T", io::format_real(est.T))
      << fixed_row("tau_max", io::format_real(last.time_stamp()))
      << fixed_row("samples", std::to_string(traj.samples.size()))
      << fixed_row("final_C0_distance",
                   fmt::format("{:.6e}", cl_distance(last, 1.0, 0, distance_grid_size(cfg.params.N))));
  return 0;
}

int cmd_rates(const RunConfig& cfg, std::ostream& out) {
  const State psi = initial_state(cfg);
  const auto run = rates_pipeline(psi, cfg.params, cfg.opts, cfg.effective_tau_max(), cfg.tolerances, cfg.delta, cfg.c_p);
  json doc{{"params", io::to_json(cfg.params)},
           {"estimate", io::to_json(run.estimate)},
           {"reports", io::to_json(run.reports)},
           {"warnings", run.physical.warnings},
           {"meta", json{{"tool", "pcsf"}, {"timestamp", io::utc_timestamp()}}}};
  const std::string table = io::summary_table(run.reports);
  io::write_atomic(cfg.output_dir / "rates.json", doc.dump(2) + "\n");
  io::write_atomic(cfg.output_dir / "summary.txt", table);
  out << table;
  const bool all = std::all_of(run.reports.begin(), run.reports.end(), [](const RateReport& r) { return r.pass; });
  return all ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  verify::VerifyConfig vc;
  vc.max_radius = std::min(cfg.params.N, 4);
  vc.opts = cfg.opts;
  const auto suites = verify::run_all(vc);
  json doc = json::array();
  out << fmt::format("{:<20} {:>12} {:>12} {:>6}\n", "suite", "measured", "threshold", "pass");
  bool all = true;
  for (const auto& s : suites) {
    out << fmt::format("{:<20} {:>12.3e} {:>12.3e} {:>6}\n", s.name, s.measured, s.threshold, s.pass ? "yes" : "no");
    doc.push_back(json{{"suite", s.name},
                       {"pass", s.pass},
                       {"measured", s.measured},
                       {"threshold", s.threshold},
                       {"detail", s.detail}});
    log::info(s.name + ": " + s.detail);
    all = all && s.pass;
  }
  io::write_atomic(cfg.output_dir / "verify.json", doc.dump(2) + "\n");
  return all ? 0 : 1;
}

SweepResult run_sweep(const RunConfig& cfg) {
  std::vector<int> ps = cfg.sweep.p_list;
  std::vector<std::uint64_t> seeds = cfg.sweep.seeds;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  std::vector<std::pair<int, std::uint64_t>> cells;
  for (int p : ps) {
    for (auto seed : seeds) cells.emplace_back(p, seed);
  }

  struct Slot {
    std::optional<SweepRow> row;
    std::optional<SweepFailure> failure;
  };
  std::vector<Slot> slots(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto [p, seed] = cells[i];
      try {
        if (std::find(cfg.sweep.fail_cells.begin(), cfg.sweep.fail_cells.end(), cells[i]) !=
            cfg.sweep.fail_cells.end()) {
          throw NumericalError("forced failure");
        }
        FlowParams params = cfg.params;
        params.p = p;
        const auto data = random_admissible(seed, params.modes(), cfg.delta, cfg.c_p);
        const double tau_max = cfg.tau_max ? *cfg.tau_max : default_tau_max(p);
        const auto run = rates_pipeline(data.state, params, cfg.opts, tau_max, cfg.tolerances, cfg.delta, cfg.c_p);
        SweepRow row;
        row.p = p;
        row.seed = seed;
        row.T = run.estimate.T;
        row.blowup = find_fitted(run.reports, "blowup");
        row.mode2 = find_fitted(run.reports, "mode2_decay");
        for (int l = 0; l < 3; ++l) row.convergence[l] = find_fitted(run.reports, "convergence_C" + std::to_string(l));
        row.mean_offset = find_fitted(run.reports, "mean_offset");
        row.pass = std::all_of(run.reports.begin(), run.reports.end(), [](const RateReport& r) { return r.pass; });
        slots[i].row = row;
      } catch (const Error& e) {
        slots[i].failure = SweepFailure{p, seed, e.kind(), e.what()};
      } catch (const std::exception& e) {
        slots[i].failure = SweepFailure{p, seed, "internal", e.what()};
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw, cells.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  SweepResult result;
  for (auto& slot : slots) {
    if (slot.row) result.rows.push_back(*slot.row);
    if (slot.failure) result.failures.push_back(*slot.failure);
  }
  return result;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "p,seed,T,blowup_exponent,mode2_decay,convergence_C0,convergence_C1,convergence_C2,mean_offset,pass\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.p, r.seed, io::format_real(r.T), io::format_real(r.blowup),
                       io::format_real(r.mode2), io::format_real(r.convergence[0]), io::format_real(r.convergence[1]),
                       io::format_real(r.convergence[2]), io::format_real(r.mean_offset), r.pass ? 1 : 0);
  }
  return out;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SweepResult result = run_sweep(cfg);
  io::write_atomic(cfg.output_dir / "sweep.csv", sweep_csv(result.rows));
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back(json{{"p", f.p}, {"seed", f.seed}, {"kind", f.kind}, {"message", f.message}});
  }
  io::write_atomic(cfg.output_dir / "sweep_failures.json", failures.dump(2) + "\n");
  out << fmt::format("{:>3} {:>6} {:>12} {:>10} {:>10} {:>10} {:>6}\n", "p", "seed", "T", "blowup", "mode2", "C0",
                     "pass");
  for (const auto& r : result.rows) {
    out << fmt::format("{:>3} {:>6} {:>12.8f} {:>10.5f} {:>10.5f} {:>10.5f} {:>6}\n", r.p, r.seed, r.T, r.blowup,
                       r.mode2, r.convergence[0], r.pass ? "yes" : "no");
  }
  if (!result.failures.empty()) {
    err << json{{"error", json{{"kind", "sweep"},
                               {"message", fmt::format("{} of {} cells failed", result.failures.size(),
                                                       result.failures.size() + result.rows.size())},
                               {"failed_cells", failures},
                               {"exit_code", 1}}}}
               .dump()
        << "\n";
    return 1;
  }
  const bool all = std::all_of(result.rows.begin(), result.rows.end(), [](const SweepRow& r) { return r.pass; });
  return all ? 0 : 1;
}

namespace {

void report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << json{{"error", json{{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  // `--a.b=value` overrides are taken out before CLI11 sees the arguments.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    const auto eq = a.find('=');
    if (a.rfind("--", 0) == 0 && eq != std::string::npos && a.substr(0, eq).find('.') != std::string::npos) {
      overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else {
      args.push_back(a);
    }
  }

  CLI::App app{"Spectral simulator for the p-curve shortening flow", "pcsf"};
  app.require_subcommand(1);
  std::string config_path, rhs_name, init_spec, out_dir;
  std::optional<int> p, n_modes, jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--p", p, "flow exponent p >= 1");
  app.add_option("--n-modes", n_modes, "mode radius N");
  app.add_option("--rhs", rhs_name, "right-hand side evaluator: oracle | conv");
  app.add_option("--init-spec", init_spec, "support spec (file path or inline JSON)");
  app.add_option("--seed", seed, "seed for random admissible initial data");
  app.add_option("--out", out_dir, "output directory (must exist)");
  app.add_option("--jobs", jobs, "sweep worker threads (0: all cores)");
  const std::pair<Experiment, const char*> commands[] = {
      {Experiment::simulate, "integrate to the blow-up cap; trajectory CSV + sidecar JSON"},
      {Experiment::normalized, "integrate the normalized flow in tau"},
      {Experiment::rates, "simulate, normalize and fit the predicted rates"},
      {Experiment::verify, "run the property suites"},
      {Experiment::sweep, "rates over p_list x seeds with random admissible data"},
  };
  for (const auto& [e, help] : commands) app.add_subcommand(to_string(e), help)->fallthrough();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what(), 2);
    return 2;
  }

  try {
    json doc = default_config_json();
    if (!config_path.empty()) merge_into(doc, io::read_json_file(config_path), "");
    doc["experiment"] = app.get_subcommands().front()->get_name();
    for (const auto& [path, value] : overrides) apply_override(doc, path, value);
    if (p) doc["params"]["p"] = *p;
    if (n_modes) doc["params"]["N"] = *n_modes;
    if (!rhs_name.empty()) doc["params"]["rhs_method"] = rhs_name;
    if (!init_spec.empty()) {
      doc["init"]["kind"] = "support";
      doc["init"]["support"] = io::json_from_text_or_file(init_spec);
    }
    if (seed) {
      doc["init"]["kind"] = "random";
      doc["init"]["seed"] = *seed;
    }
    if (!out_dir.empty()) doc["output_dir"] = out_dir;
    if (jobs) doc["jobs"] = *jobs;

    const RunConfig cfg = parse_config(doc);
    cfg.validate();
    switch (cfg.experiment) {
      case Experiment::simulate: return cmd_simulate(cfg, out);
      case Experiment::normalized: return cmd_normalized(cfg, out);
      case Experiment::rates: return cmd_rates(cfg, out);
      case Experiment::verify: return cmd_verify(cfg, out);
      case Experiment::sweep: return cmd_sweep(cfg, out, err);
    }
    return 2;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what(), e.exit_code());
    return e.exit_code();
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what(), 1);
    return 1;
  }
}

}  // namespace pcsf::cli
