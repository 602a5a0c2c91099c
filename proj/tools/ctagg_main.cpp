#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ctagg/harness.hpp"
#include "ctagg/rng.hpp"

namespace {

using ctagg::harness::ExperimentConfig;

// One CLI flag per config key so any file setting can be overridden.
struct Overrides {
    std::vector<std::pair<std::string, std::string>> entries;

    void add_flag(CLI::App* cmd, const std::string& key, const std::string& desc) {
        cmd->add_option_function<std::string>(
            "--" + key, [this, key](const std::string& v) { entries.emplace_back(key, v); }, desc);
    }
};

ctagg::ctsim::Topology topology_from_arg(const std::string& src, double loss) {
    ExperimentConfig cfg;
    cfg.topology = src;
    cfg.loss = loss;
    return ctagg::harness::load_or_generate_topology(cfg);
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
    ExperimentConfig cfg = ctagg::harness::parse_config_file(config_path);
    for (const auto& [key, value] : ov.entries)
        ctagg::harness::apply_config_entry(cfg, key, value, "command line");
    cfg.validate();

    auto result = ctagg::harness::run_experiment(cfg);
    if (!cfg.out.empty()) {
        ctagg::harness::write_results(result.table, cfg.out, cfg.format);
        std::cout << "wrote " << result.table.rows.size() << " rows to " << cfg.out << "\n";
    }
    std::cout << ctagg::harness::format_summary(result.summary);
    return 0;
}

int cmd_profile(const std::string& topology, unsigned max_ntx, double loss, unsigned trials,
                double threshold, std::uint64_t seed) {
    auto topo = topology_from_arg(topology, loss);
    std::mt19937_64 rng(ctagg::derive_seed(seed, {0x9f0f}));
    auto profiles = ctagg::ctsim::reachability_profiles(topo, max_ntx, trials, threshold, rng);
    for (const auto& p : profiles) {
        for (unsigned t = 1; t <= max_ntx; ++t) {
            std::cout << "node " << p.node << " ntx " << t << ":";
            for (auto id : p.by_ntx[t - 1].ids()) std::cout << ' ' << id;
            std::cout << "\n";
        }
    }
    return 0;
}

int cmd_mincov(const std::string& topology, double loss, unsigned trials, double quantile,
               unsigned max_ntx, std::uint64_t seed) {
    auto topo = topology_from_arg(topology, loss);
    std::mt19937_64 rng(ctagg::derive_seed(seed, {0xc0f0}));
    auto ntx = ctagg::ctsim::min_ntx_full_coverage(topo, max_ntx, trials, quantile, rng);
    if (ntx) {
        std::cout << "min_ntx_full_coverage = " << *ntx << "\n";
        return 0;
    }
    std::cout << "full coverage not reached within max_ntx = " << max_ntx << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Private data aggregation over simulated concurrent-transmission chain floods"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    std::string config_path;
    run->add_option("--config", config_path, "key=value config file")->required();
    Overrides ov;
    for (const char* key :
         {"topology", "rgg_n", "rgg_radius", "rgg_seed", "variant", "k", "ntx_share", "ntx_recon",
          "ntx_s3", "q", "loss", "iterations", "seed", "master_secret", "out", "format",
          "slot_duration_ms", "secret_bits", "mincov_trials", "mincov_quantile", "max_ntx",
          "reach_trials", "reach_threshold"})
        ov.add_flag(run, key, std::string("override config key ") + key);

    auto* profile = app.add_subcommand("profile", "print per-node NTX reachability profiles");
    std::string prof_topology;
    unsigned prof_max_ntx = 8, prof_trials = 64;
    double prof_loss = 0.0, prof_threshold = 0.99;
    std::uint64_t prof_seed = 1;
    profile->add_option("--topology", prof_topology, "preset name or topology file")->required();
    profile->add_option("--max-ntx", prof_max_ntx, "largest NTX to profile");
    profile->add_option("--loss", prof_loss, "per-link loss probability");
    profile->add_option("--trials", prof_trials, "Monte-Carlo trials");
    profile->add_option("--threshold", prof_threshold, "delivery frequency threshold");
    profile->add_option("--seed", prof_seed, "rng seed");

    auto* mincov = app.add_subcommand("mincov", "print the smallest NTX with full network coverage");
    std::string mc_topology;
    unsigned mc_trials = 200, mc_max_ntx = 64;
    double mc_loss = 0.0, mc_quantile = 0.99;
    std::uint64_t mc_seed = 1;
    mincov->add_option("--topology", mc_topology, "preset name or topology file")->required();
    mincov->add_option("--loss", mc_loss, "per-link loss probability");
    mincov->add_option("--trials", mc_trials, "Monte-Carlo trials");
    mincov->add_option("--quantile", mc_quantile, "required fraction of covered trials");
    mincov->add_option("--max-ntx", mc_max_ntx, "largest NTX to try");
    mincov->add_option("--seed", mc_seed, "rng seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, ov);
        if (profile->parsed())
            return cmd_profile(prof_topology, prof_max_ntx, prof_loss, prof_trials, prof_threshold, prof_seed);
        if (mincov->parsed())
            return cmd_mincov(mc_topology, mc_loss, mc_trials, mc_quantile, mc_max_ntx, mc_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
