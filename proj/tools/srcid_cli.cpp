// srcid: source identification experiments from the command line.
//
//   srcid run --preset example1 [--p R] [--x0 R] [--deltas LIST] [--seeds LIST]
//             [--mu-rule theorem2|section5|manual:R] [--n INT] [--t-total R] [--pad INT] [--out DIR]
//   srcid run --config FILE
//   srcid check
//   srcid rate --preset NAME --deltas LIST [--seeds LIST] [--mu-rule RULE]
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error, 3 property check failure.

#include "srcid/checks.hpp"
#include "srcid/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

constexpr int exit_runtime = 1;
constexpr int exit_config = 2;
constexpr int exit_check = 3;

struct SweepFlags {
    std::optional<std::string> p, x0, deltas, seeds, mu_rule, n, t_total, pad, out;

    void add_to(CLI::App& cmd, bool with_output)
    {
        cmd.add_option("--p", p, "smoothness order of the source");
        cmd.add_option("--x0", x0, "sensor position");
        cmd.add_option("--deltas", deltas, "comma-separated noise levels in (0,1)");
        cmd.add_option("--seeds", seeds, "comma-separated seeds or ranges, e.g. 1-20");
        cmd.add_option("--mu-rule", mu_rule, "theorem2 | section5 | manual:R");
        cmd.add_option("--n", n, "grid size (power of two)");
        cmd.add_option("--t-total", t_total, "time interval length");
        cmd.add_option("--pad", pad, "zero-padding factor");
        if (with_output)
            cmd.add_option("--out", out, "output directory");
    }

    std::map<std::string, std::string> overrides() const
    {
        std::map<std::string, std::string> o;
        auto put = [&](const char* key, const std::optional<std::string>& v) {
            if (v)
                o[key] = *v;
        };
        put("sweep.p", p);
        put("params.x0", x0);
        put("sweep.deltas", deltas);
        put("sweep.seeds", seeds);
        put("sweep.mu_rule", mu_rule);
        put("grid.n", n);
        put("grid.t_total", t_total);
        put("grid.pad", pad);
        put("output.dir", out);
        return o;
    }

    bool any() const { return !overrides().empty(); }
};

void print_table(const std::vector<srcid::DeltaSummary<double>>& rows)
{
    std::printf("%8s %8s %12s %12s %12s\n", "delta", "mu", "err_unreg", "err_reg", "bound");
    for (const auto& r : rows)
        std::printf("%8.4g %8.4g %12.5g %12.5g %12.5g\n", r.delta, r.mu, r.err_unreg_mean, r.err_reg_mean, r.bound);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-dependent source identification for 1D advection-diffusion-reaction transport"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a preset or config file and write CSV tables");
    std::string run_preset;
    std::string run_config;
    SweepFlags run_flags;
    auto* preset_opt = run->add_option("--preset", run_preset, "example1 | example2");
    auto* config_opt = run->add_option("--config", run_config, "plain-text config file");
    preset_opt->excludes(config_opt);
    run_flags.add_to(*run, true);

    auto* check = app.add_subcommand("check", "run the lemma property suite");
    int random_sets = 20;
    check->add_option("--random-sets", random_sets, "number of random parameter sets")->check(CLI::NonNegativeNumber);

    auto* rate = app.add_subcommand("rate", "estimate the empirical convergence rate");
    std::string rate_preset;
    SweepFlags rate_flags;
    rate->add_option("--preset", rate_preset, "example1 | example2")->required();
    rate_flags.add_to(*rate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run) {
            srcid::RunResult result;
            if (!run_config.empty()) {
                if (run_flags.any())
                    throw srcid::ConfigError("--config cannot be combined with override flags");
                result = srcid::run_config(run_config);
            } else if (!run_preset.empty()) {
                result = srcid::run_preset(run_preset, run_flags.overrides());
            } else {
                throw srcid::ConfigError("run needs --preset or --config");
            }
            print_table(result.rows);
            std::printf("source H^p norm used for the bound: %.6g\n", result.source_bound);
            for (const auto& f : result.files)
                std::printf("wrote %s\n", f.string().c_str());
            return 0;
        }
        if (*check) {
            srcid::CheckOptions options;
            options.random_parameter_sets = random_sets;
            const auto report = srcid::run_checks(options);
            std::cout << report.to_text();
            return report.passed() ? 0 : exit_check;
        }
        if (*rate) {
            auto config = srcid::preset(rate_preset);
            for (const auto& [k, v] : rate_flags.overrides())
                srcid::apply_override(config, k, v);
            const auto result = srcid::measure_rate(config);
            print_table(result.rows);
            std::printf("estimated slope   %.6f\ntheoretical slope %.6f\n", result.estimated, result.theoretical);
            return 0;
        }
    } catch (const srcid::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const srcid::DomainError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
    return 0;
}
