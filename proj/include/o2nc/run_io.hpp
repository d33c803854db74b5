#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "o2nc/schedule_free.hpp"
#include "o2nc/stats.hpp"

namespace o2nc {

/// Execution modes of the `run` subcommand.  The first three drive the
/// conversion loop with the matching anchor strategy, ANCHORING restarts
/// OPTION_II across epochs, SF_SGD runs the schedule-free recursion
/// directly.
enum class RunMode { OptionI, OptionII, OptionIII, Anchoring, SfSgd };

std::string run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string& name);

/// How much of the trajectory lands in the per-seed CSV: "none" skips the
/// file, "steps" writes one row per step with certificates at the
/// logarithmically spaced checkpoints, "dense" fills the certificate
/// column at every row.
enum class TraceMode { None, Steps, Dense };

struct RunConfig {
    int schema_version = 1;

    std::string problem = "abs_sum";
    std::size_t dim = 10;
    std::string problem_file;  // piecewise-linear JSON; overrides `problem`

    RunMode mode = RunMode::OptionI;
    double epsilon = 0.5;
    double lambda = 1.0;
    double sigma = 0.1;
    std::optional<double> delta_f;

    std::size_t T = 1000;
    std::size_t epochs = 1;  // ANCHORING only
    std::size_t seeds = 1;
    std::uint64_t master_seed = 1;

    std::optional<double> x0_fill;  // broadcast scalar; default 0.5
    std::vector<double> x0;         // explicit start point, wins over x0_fill

    // optional overrides of the derived constants
    std::optional<double> beta_override;
    std::optional<double> d_override;
    std::optional<double> mu_override;
    std::optional<double> eta_override;
    std::optional<double> gamma_override;  // SF_SGD only; rejected elsewhere

    TraceMode trace = TraceMode::Steps;
    std::string output_dir;  // empty: no artifacts written
};

/// Parses the JSON text of a config file.  Unknown keys raise ConfigError
/// so typos cannot silently fall back to defaults.
RunConfig parse_run_config(const std::string& json_text);

std::string trace_mode_name(TraceMode m);
TraceMode trace_mode_from_name(const std::string& name);

/// c_x bound the parameter formulas should assume for a mode:
/// 1 (OPTION_I), 0 (OPTION_II / ANCHORING), 16 (OPTION_III / SF_SGD).
double mode_cx_bound(RunMode m);

/// Logarithmically spaced certificate checkpoints: powers of two up to T,
/// plus max(1, T/10) and T themselves.
std::vector<std::size_t> checkpoint_indices(std::size_t T);

struct SeedResult {
    std::uint64_t seed = 0;
    double expected_certificate = 0.0;
    double certificate_at_t10 = 0.0;
    double certificate_at_t = 0.0;
    double stability_factor = 0.0;
    double regret_margin = 0.0;   // min over checkpoints of bound - measured regret
    double loss_decrement = 0.0;  // sum_t (F(x_t) - F(w_t))
    double final_value = 0.0;     // F at the last probe point
    double wall_ms = 0.0;         // reported on stderr, never serialized
};

struct RunOutput {
    RunConfig config;
    ParamSet params;
    double problem_G = 0.0;
    std::vector<SeedResult> seeds;
    MeanSem expected_certificate;
    MeanSem certificate_at_t;
    MeanSem stability;
};

/// Runs every seed (worker count from O2NC_WORKERS, artifacts written in
/// seed order so outputs are byte-identical for a fixed config and master
/// seed) and aggregates the results.  When config.output_dir is set,
/// writes summary.json plus trace_seed<k>.csv files (one per epoch for
/// ANCHORING).
RunOutput execute_run(const RunConfig& config);

/// Serialized summary document (schema_version, full config echo with
/// every derived constant, per-seed metrics, aggregates).  Deterministic
/// bytes for a deterministic RunOutput.
std::string summary_json(const RunOutput& out);

/// Reads O2NC_WORKERS; falls back to hardware concurrency.
std::size_t worker_count();

/// Parameter-set serialization used by the `params` subcommand and the
/// fixture validator.
std::string param_set_json(const ParamSet& p);
ParamSet param_set_from_json(const std::string& json_text);

/// Builds the problem a config names (builtin or piecewise file).
Problem problem_from_config(const RunConfig& config);

/// Start point a config implies (explicit x0, else fill, dim-checked).
Vec x0_from_config(const RunConfig& config, const Problem& problem);

}  // namespace o2nc
