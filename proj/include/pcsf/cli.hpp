#pragma once

// Configuration, experiment pipelines and the subcommands of the `pcsf`
// tool. Every command writes its data into the output directory, prints a
// fixed-width summary table on `out` and returns the process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcsf/datagen.hpp"
#include "pcsf/io.hpp"
#include "pcsf/rates.hpp"

namespace pcsf::cli {

enum class Experiment { simulate, normalized, rates, verify, sweep };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

struct InitSpec {
  enum class Kind { round, perturbed, support, state, random };
  Kind kind = Kind::perturbed;
  double amplitude = 0.05;  // perturbed preset: support a_2
  SupportSpec support;
  std::optional<State> state;
  std::uint64_t seed = 1;  // random
};

struct SweepSpec {
  std::vector<int> p_list{1, 2, 3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  /// (p, seed) cells that fail on purpose; exercises the failure report.
  std::vector<std::pair<int, std::uint64_t>> fail_cells;
};

struct RunConfig {
  Experiment experiment = Experiment::rates;
  FlowParams params{1, 32, RhsMethod::convolution};
  IntegratorOptions opts;
  InitSpec init;
  std::filesystem::path output_dir = ".";
  double delta = 0.1;
  double c_p = 4.0;
  std::optional<double> tau_max;
  RateTolerances tolerances;
  SweepSpec sweep;
  int jobs = 0;  // 0: hardware concurrency

  double effective_tau_max() const;
  void validate() const;
};

/// The default configuration as a JSON document (the documented schema).
io::json default_config_json();

/// Reads a configuration document; unknown keys are rejected.
RunConfig parse_config(const io::json& doc);
io::json to_json(const RunConfig& cfg);

/// Sets the value at a dotted path (params.p, opts.rel_tol, ...). The value
/// is parsed as JSON when possible and taken as a string otherwise.
void apply_override(io::json& doc, const std::string& dotted_path, const std::string& value);

State initial_state(const RunConfig& cfg);

struct RatesRun {
  Trajectory physical;
  BlowupEstimate estimate;
  Trajectory normalized;
  std::vector<RateReport> reports;
};

/// Physical run to the cap, normalization with the fitted T, then mode
/// decay, C^l convergence (l = 0, 1, 2 over tau in [1, tau_max]) and mean
/// offset (tau in [0.5, tau_max]) fits.
RatesRun rates_pipeline(const State& psi, const FlowParams& params, const IntegratorOptions& opts, double tau_max,
                        const RateTolerances& tol, std::optional<double> delta = std::nullopt,
                        std::optional<double> c_p = std::nullopt);

struct SweepRow {
  int p = 0;
  std::uint64_t seed = 0;
  double T = 0;
  double blowup = 0;
  double mode2 = 0;
  double convergence[3] = {0, 0, 0};
  double mean_offset = 0;
  bool pass = false;
};

struct SweepFailure {
  int p = 0;
  std::uint64_t seed = 0;
  std::string kind;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (p, seed)
  std::vector<SweepFailure> failures;
};

SweepResult run_sweep(const RunConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_normalized(const RunConfig& cfg, std::ostream& out);
int cmd_rates(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point of the tool: parses argv, runs the command and maps errors to
/// exit codes (errors are reported on `err` as JSON).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcsf::cli
