#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctagg/ctsim.hpp"
#include "ctagg/protocol.hpp"

namespace ctagg::harness {

// Flat key=value experiment description; every key can also be set from a
// command-line flag of the same name.
struct ExperimentConfig {
    std::string topology = "flocklab26";  // preset name, file path, or "rgg"
    unsigned rgg_n = 26;
    double rgg_radius = 0.3;
    std::uint64_t rgg_seed = 1;

    std::string variant = "both";  // s3 | s4 | both
    std::optional<unsigned> k;     // empty = floor(n/3), at least 1
    unsigned ntx_share = 6;        // S4 sharing phase
    unsigned ntx_recon = 6;        // reconstruction, both variants
    std::optional<unsigned> ntx_s3;  // S3 sharing phase; empty = min_ntx_full_coverage
    std::uint64_t q = ffield::FieldModulus::kDefault;
    double loss = 0.0;  // per-link packet loss probability
    unsigned iterations = 200;
    std::uint64_t seed = 1;
    std::string master_secret = "000102030405060708090a0b0c0d0e0f";
    std::string out;              // results file; empty = stdout summary only
    std::string format = "csv";   // csv | json
    double slot_duration_ms = 4.0;
    unsigned secret_bits = 16;    // secrets are uniform in [0, 2^secret_bits)

    unsigned mincov_trials = 200;
    double mincov_quantile = 0.99;
    unsigned max_ntx = 64;
    unsigned reach_trials = 64;
    double reach_threshold = 0.99;

    void validate() const;
};

// Parses `key = value` lines with '#' comments; unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_stream(std::istream& in, const std::string& origin);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& origin);

// Preset, file, or seeded random-geometric topology, with the configured
// loss applied as the global link success probability.
ctsim::Topology load_or_generate_topology(const ExperimentConfig& cfg);

struct MetricsRow {
    std::string variant;
    unsigned iteration = 0;
    double latency_ms = 0.0;
    double mean_radio_on_ms = 0.0;
    double max_radio_on_ms = 0.0;
    double reliability = 0.0;
    bool correct = true;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
};

struct VariantSummary {
    unsigned iterations = 0;
    unsigned sharing_ntx = 0;
    double mean_latency_ms = 0.0;
    double mean_radio_on_ms = 0.0;
    double mean_reliability = 0.0;
};

struct ExperimentSummary {
    std::map<std::string, VariantSummary> per_variant;  // keyed "s3" / "s4"
    std::optional<double> latency_ratio_s3_s4;
    std::optional<double> radio_ratio_s3_s4;
};

struct ExperimentResult {
    MetricsTable table;
    ExperimentSummary summary;
};

// Runs every requested variant for the configured iterations. The seed
// fully determines secrets, bootstrap profiling and per-round channel
// noise, so equal configs give identical tables.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string format_csv(const MetricsTable& table);
std::string format_json(const MetricsTable& table);
void write_results(const MetricsTable& table, const std::string& path, const std::string& format);
std::string format_summary(const ExperimentSummary& summary);

}  // namespace ctagg::harness
