#ifndef SRCID_EXPERIMENT_HPP
#define SRCID_EXPERIMENT_HPP

// Configuration, presets and output writing for reproducible sweeps.

#include "srcid/error_analysis.hpp"
#include "srcid/forward_synth.hpp"
#include "srcid/inversion.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srcid {

/// Bad configuration input. line is 0 when the problem is not tied to a file line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, int line = 0);

    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

struct GridSettings {
    Eigen::Index n = 4096;
    double t_total = 40;
    Eigen::Index pad_factor = 1;

    TimeGrid<double> make() const { return {n, t_total, pad_factor}; }
};

struct ExperimentConfig {
    std::string name = "custom";
    SourceSpec<double> source = Tabulated<double>{};
    double alpha2 = 0;
    double beta = 0;
    double nu = 0;
    double x0 = 0;
    GridSettings grid;
    double p = 0;
    std::vector<double> deltas;
    std::vector<std::uint64_t> seeds;
    MuRule mu_rule;
    NoiseKind noise = NoiseKind::gaussian;
    std::optional<double> source_bound;
    std::filesystem::path output_dir = "out";

    TransportParams<double> params() const { return {alpha2, beta, nu, x0}; }
};

std::vector<double> default_deltas();           // 0.01, 0.02, ..., 0.1
std::vector<std::uint64_t> default_seeds();     // 1..20
std::vector<std::string> preset_names();

/// example1: exponential source, a2=0.01, beta=0.5, nu=1.51, x0=2, p=2.
/// example2: square-wave source, a2=0.1, beta=0.9, nu=1, x0=3, p=3.
ExperimentConfig preset(const std::string& name);

/// Sets one dotted key ("params.x0", "sweep.deltas", ...). Throws ConfigError
/// naming the key if it is unknown or its value does not parse.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key accepted by apply_override.
std::vector<std::string> config_keys();

/// Checks all component invariants; throws ConfigError naming the violated one.
void validate(const ExperimentConfig& config);

/// Parses the plain-text config format (see README). `origin` labels errors.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunResult {
    std::vector<DeltaSummary<double>> rows;
    std::vector<ErrorReport<double>> reports;
    double source_bound;
    std::vector<std::filesystem::path> files;
};

/// Runs the sweep and writes errors.csv, reconstruction_<delta>.csv and
/// manifest.txt into config.output_dir. config_text, when given, is hashed
/// into the manifest.
RunResult run_experiment(const ExperimentConfig& config, const std::optional<std::string>& config_text = std::nullopt);

RunResult run_preset(const std::string& name, const std::map<std::string, std::string>& overrides = {});
RunResult run_config(const std::filesystem::path& path);

struct RateResult {
    double estimated;
    double theoretical;
    std::vector<DeltaSummary<double>> rows;
};

/// Sweeps config.deltas x config.seeds and fits the error rate. No files written.
RateResult measure_rate(const ExperimentConfig& config);

// Formatting helpers shared by the writers and the CLI.
std::string format_number(double value);
std::string errors_csv(const std::vector<DeltaSummary<double>>& rows);
std::string reconstruction_csv(const Signal<double>& truth, const Signal<double>& unreg, const Signal<double>& reg);
std::string reconstruction_filename(double delta);
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace srcid

#endif // SRCID_EXPERIMENT_HPP
