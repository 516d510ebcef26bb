// Command-line front end: run, stats and sweep.

#include "cfmimo/error.hpp"
#include "cfmimo/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

cfmimo::ExperimentConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                             const std::string& strategies)
{
    auto cfg = path.empty() ? cfmimo::ExperimentConfig{} : cfmimo::load_config(path);
    if (seed)
        cfg.sim.seed = *seed;
    if (!strategies.empty())
        cfmimo::apply_setting(cfg, "strategies", strategies);
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw cfmimo::ConfigError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cell-free massive MIMO uplink pilot-assignment simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string strategies;
    std::string out_path;

    auto* run = app.add_subcommand("run", "Monte Carlo run, one CSV row per (realization, strategy, UE)");
    run->add_option("--config", config_path, "key = value configuration file");
    run->add_option("--seed", seed, "Master seed (overrides the config file)");
    run->add_option("--strategies", strategies, "Comma-separated strategy list");
    run->add_option("--out", out_path, "Output CSV (default: output_path from the config)");

    std::string in_path;
    double pct = 95.0;
    auto* stats = app.add_subcommand("stats", "Per-strategy nearest-rank percentile of a throughput CSV");
    stats->add_option("--in", in_path, "Throughput CSV")->required();
    stats->add_option("--percentile", pct, "Percentile in (0, 100]")->check(CLI::Range(0.0, 100.0));

    std::string sweep_var;
    std::string sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Sweep one variable and write aggregated statistics");
    sweep->add_option("--config", config_path, "key = value configuration file");
    sweep->add_option("--var", sweep_var, "num_aps | num_ues | num_pilots")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep->add_option("--seed", seed, "Master seed");
    sweep->add_option("--strategies", strategies, "Comma-separated strategy list");
    sweep->add_option("--percentile", pct, "Percentile in (0, 100]")->check(CLI::Range(0.0, 100.0));
    sweep->add_option("--out", out_path, "Statistics CSV (default: stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (run->parsed())
        {
            const auto cfg = load_with_overrides(config_path, seed, strategies);
            const auto records = cfmimo::run_experiment(cfg);
            auto out = open_output(out_path.empty() ? cfg.output_path : out_path);
            cfmimo::write_csv(out, records);
            std::cerr << "wrote " << records.size() << " records\n";
        }
        else if (stats->parsed())
        {
            std::ifstream in(in_path, std::ios::binary);
            if (!in)
                throw cfmimo::ConfigError("cannot open '" + in_path + "'");
            const double q = pct / 100.0;
            const auto summary = cfmimo::summarize(cfmimo::read_csv(in), q);
            std::printf("# percentile: nearest-rank, q = %.9g\n", q);
            std::printf("strategy,samples,percentile_bps,mean_bps\n");
            for (const auto& s : summary)
                std::printf("%s,%zu,%.9g,%.9g\n", s.strategy.c_str(), s.samples, s.percentile_bps, s.mean_bps);
        }
        else if (sweep->parsed())
        {
            auto cfg = load_with_overrides(config_path, seed, strategies);
            cfmimo::apply_setting(cfg, "sweep_var", sweep_var);
            cfmimo::apply_setting(cfg, "sweep_values", sweep_values);
            cfg.validate();
            const double q = pct / 100.0;
            const auto rows = cfmimo::run_sweep(cfg, q);
            if (out_path.empty())
            {
                cfmimo::write_sweep_csv(std::cout, rows, q);
            }
            else
            {
                auto out = open_output(out_path);
                cfmimo::write_sweep_csv(out, rows, q);
            }
        }
    }
    catch (const cfmimo::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const cfmimo::BudgetExceeded& e)
    {
        std::cerr << "budget guard '" << e.guard() << "' exceeded: " << e.what() << '\n';
        return kExitBudget;
    }
    catch (const cfmimo::InvalidInput& e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
