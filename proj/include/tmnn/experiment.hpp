#pragma once

#include "tmnn/phantom.hpp"
#include "tmnn/sampling.hpp"
#include "tmnn/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmnn {

/// Anything wrong with an experiment's configuration (as opposed to a
/// failure while running it).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Configuration problems tied to a spec file: syntax, unknown keys,
/// duplicates, range violations. Messages carry line numbers.
struct SpecParseError : ConfigError {
    using ConfigError::ConfigError;
};

enum class MaskKind { radial, random, full };

struct MaskSpec {
    MaskKind kind = MaskKind::radial;
    int lines = 30;      // radial only
    double ratio = 0.1;  // random only
    std::uint64_t seed = 2;
    bool vary_per_frame = true;
};

struct NoiseSpec {
    std::optional<double> snr_db;  // absent: noiseless
    std::uint64_t seed = 3;
};

struct NamedSolver {
    std::string name;
    SolverConfig config;
};

struct ExperimentSpec {
    PhantomSpec phantom;
    MaskSpec mask;
    NoiseSpec noise;
    std::vector<NamedSolver> solvers;
    std::string output_dir = "tmnn_out";

    void validate() const;
};

/// Parse the key-value experiment format: one `section.key = value` per
/// line, `#` starts a comment, blank lines ignored. Sections: phantom,
/// mask, noise, output, and solver.<name> (one per named solver; solver
/// order follows first appearance). Unknown keys, duplicate keys, and
/// out-of-range values are errors that cite line numbers and field
/// names. A minimal (even empty) file yields the documented defaults,
/// including one "tmnn" solver whose lambdas depend on noise presence.
ExperimentSpec parse_spec(const std::string& path);
ExperimentSpec parse_spec_text(const std::string& text);

struct RunOptions {
    int threads = 1;
    bool echo_trace = false;  // additionally print per-iteration records
    std::optional<std::uint64_t> seed_override;
};

struct ResultRow {
    std::string phantom;
    std::string mask;
    double ratio = 0.0;  // realized sampling ratio
    std::string noise;
    std::string method;
    double snr_db = 0.0;
    int iters = 0;
    double wall_time_s = 0.0;
    bool ok = false;
    std::string error;  // diagnostic when !ok
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string results_csv_path;
    bool all_ok = false;
};

/// One results.csv line set (header included), exactly as written to disk.
std::string format_results_csv(const std::vector<ResultRow>& rows);

/// Run every configured solver against the phantom/mask/noise instance
/// and persist all artifacts under spec.output_dir: phantom, mask, and
/// measured k-space as CTN3; per-solver subdirectories with the
/// reconstruction, a per-iteration trace CSV, and 8-bit PGM frames; and
/// results.csv summarizing all runs. A solver failure is recorded in its
/// row and does not stop the others.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

}  // namespace tmnn
