#include "ctagg/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ctagg/rng.hpp"

namespace ctagg::harness {

namespace {

// Stream tags for deriving independent rng sequences from the master seed.
enum : std::uint64_t {
    kTagSecrets = 0x5ec5,
    kTagBootstrap = 0xb007,
    kTagRound = 0x40d0,
    kTagMincov = 0xc0f0,
};

std::uint64_t variant_tag(ctsim::Variant v) { return v == ctsim::Variant::S3 ? 3 : 4; }

unsigned parse_unsigned(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        unsigned long val = std::stoul(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<unsigned>(val);
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        std::uint64_t val = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return val;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double val = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return val;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void append_double(std::string& out, const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    out += buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (iterations < 1) throw std::runtime_error("config: iterations must be >= 1");
    if (variant != "s3" && variant != "s4" && variant != "both")
        throw std::runtime_error("config: variant must be s3, s4 or both, got '" + variant + "'");
    if (format != "csv" && format != "json")
        throw std::runtime_error("config: format must be csv or json, got '" + format + "'");
    if (!(loss >= 0.0 && loss < 1.0)) throw std::runtime_error("config: loss must be in [0, 1)");
    if (secret_bits < 1 || secret_bits > 63)
        throw std::runtime_error("config: secret_bits must be in 1..63");
    if (ntx_share < 1 || ntx_recon < 1) throw std::runtime_error("config: NTX values must be >= 1");
    if (max_ntx < 1) throw std::runtime_error("config: max_ntx must be >= 1");
    sscrypto::master_secret_from_hex(master_secret);
    ffield::FieldModulus m(q);
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& origin) {
    if (key == "topology") cfg.topology = value;
    else if (key == "rgg_n") cfg.rgg_n = parse_unsigned(value, key);
    else if (key == "rgg_radius") cfg.rgg_radius = parse_double(value, key);
    else if (key == "rgg_seed") cfg.rgg_seed = parse_u64(value, key);
    else if (key == "variant") cfg.variant = value;
    else if (key == "k") cfg.k = value == "auto" ? std::nullopt : std::optional<unsigned>(parse_unsigned(value, key));
    else if (key == "ntx_share") cfg.ntx_share = parse_unsigned(value, key);
    else if (key == "ntx_recon") cfg.ntx_recon = parse_unsigned(value, key);
    else if (key == "ntx_s3") cfg.ntx_s3 = value == "auto" ? std::nullopt : std::optional<unsigned>(parse_unsigned(value, key));
    else if (key == "q") cfg.q = parse_u64(value, key);
    else if (key == "loss") cfg.loss = parse_double(value, key);
    else if (key == "iterations") cfg.iterations = parse_unsigned(value, key);
    else if (key == "seed") cfg.seed = parse_u64(value, key);
    else if (key == "master_secret") cfg.master_secret = value;
    else if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else if (key == "slot_duration_ms") cfg.slot_duration_ms = parse_double(value, key);
    else if (key == "secret_bits") cfg.secret_bits = parse_unsigned(value, key);
    else if (key == "mincov_trials") cfg.mincov_trials = parse_unsigned(value, key);
    else if (key == "mincov_quantile") cfg.mincov_quantile = parse_double(value, key);
    else if (key == "max_ntx") cfg.max_ntx = parse_unsigned(value, key);
    else if (key == "reach_trials") cfg.reach_trials = parse_unsigned(value, key);
    else if (key == "reach_threshold") cfg.reach_threshold = parse_double(value, key);
    else throw std::runtime_error(origin + ": unknown config key '" + key + "'");
}

ExperimentConfig parse_config_stream(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    unsigned line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key or value");
        apply_config_entry(cfg, key, value, origin + ":" + std::to_string(line_no));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config_stream(in, path);
}

ctsim::Topology load_or_generate_topology(const ExperimentConfig& cfg) {
    double success = 1.0 - cfg.loss;
    if (ctsim::is_preset_name(cfg.topology)) return ctsim::preset_topology(cfg.topology, success);
    if (cfg.topology == "rgg") return ctsim::random_geometric(cfg.rgg_n, cfg.rgg_radius, cfg.rgg_seed, success);
    return ctsim::load_topology_file(cfg.topology, success);
}

namespace {

protocol::ProtocolConfig make_protocol_config(const ExperimentConfig& cfg, const ctsim::Topology& topo,
                                              ctsim::Variant variant, unsigned sharing_ntx) {
    protocol::ProtocolConfig pc;
    pc.variant = variant;
    pc.n = static_cast<unsigned>(topo.size());
    pc.degree = cfg.k ? *cfg.k : std::max(1u, pc.n / 3);
    pc.ntx_share = sharing_ntx;
    pc.ntx_recon = cfg.ntx_recon;
    pc.q = cfg.q;
    pc.master_secret = sscrypto::master_secret_from_hex(cfg.master_secret);
    pc.slot_duration_ms = cfg.slot_duration_ms;
    pc.reach_trials = cfg.reach_trials;
    pc.reach_threshold = cfg.reach_threshold;
    pc.profile_max_ntx = std::min(cfg.max_ntx, 64u);
    pc.validate();
    return pc;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto topo = load_or_generate_topology(cfg);
    const auto n = static_cast<unsigned>(topo.size());

    std::vector<ctsim::Variant> variants;
    if (cfg.variant == "s3" || cfg.variant == "both") variants.push_back(ctsim::Variant::S3);
    if (cfg.variant == "s4" || cfg.variant == "both") variants.push_back(ctsim::Variant::S4);

    // Resolve the S3 sharing NTX ("auto" profiles for full network coverage).
    std::optional<unsigned> ntx_s3 = cfg.ntx_s3;
    if (!ntx_s3 && std::count(variants.begin(), variants.end(), ctsim::Variant::S3)) {
        std::mt19937_64 rng(derive_seed(cfg.seed, {kTagMincov}));
        ntx_s3 = ctsim::min_ntx_full_coverage(topo, cfg.max_ntx, cfg.mincov_trials, cfg.mincov_quantile, rng);
        if (!ntx_s3)
            throw std::runtime_error("no NTX <= " + std::to_string(cfg.max_ntx) +
                                     " reaches full coverage at the configured loss; set ntx_s3 explicitly");
    }

    ExperimentResult result;
    for (auto variant : variants) {
        unsigned sharing_ntx = variant == ctsim::Variant::S3 ? *ntx_s3 : cfg.ntx_share;
        auto pc = make_protocol_config(cfg, topo, variant, sharing_ntx);

        std::mt19937_64 boot_rng(derive_seed(cfg.seed, {kTagBootstrap, variant_tag(variant)}));
        auto boot = protocol::bootstrap(topo, pc, boot_rng);  // cached across iterations

        VariantSummary vs;
        vs.iterations = cfg.iterations;
        vs.sharing_ntx = sharing_ntx;

        for (unsigned iter = 0; iter < cfg.iterations; ++iter) {
            // Secrets depend on (seed, iteration) only, so both variants
            // aggregate the same values in the same iteration.
            std::mt19937_64 secrets_rng(derive_seed(cfg.seed, {kTagSecrets, iter}));
            std::vector<std::uint64_t> secrets(n);
            for (auto& s : secrets) s = uniform_below(secrets_rng, std::uint64_t{1} << cfg.secret_bits);

            std::mt19937_64 round_rng(derive_seed(cfg.seed, {kTagRound, variant_tag(variant), iter}));
            auto rr = protocol::run_round(topo, secrets, pc, boot, iter, round_rng);

            MetricsRow row;
            row.variant = ctsim::to_string(variant);
            row.iteration = iter;
            row.latency_ms = rr.metrics.latency_ms;
            double sum = 0.0, mx = 0.0;
            for (double r : rr.metrics.radio_on_ms) {
                sum += r;
                mx = std::max(mx, r);
            }
            row.mean_radio_on_ms = sum / static_cast<double>(n);
            row.max_radio_on_ms = mx;
            row.reliability = rr.metrics.reliability;
            row.correct = rr.reporting_all_correct;
            result.table.rows.push_back(row);

            vs.mean_latency_ms += row.latency_ms;
            vs.mean_radio_on_ms += row.mean_radio_on_ms;
            vs.mean_reliability += row.reliability;
        }
        vs.mean_latency_ms /= cfg.iterations;
        vs.mean_radio_on_ms /= cfg.iterations;
        vs.mean_reliability /= cfg.iterations;
        result.summary.per_variant[ctsim::to_string(variant)] = vs;
    }

    auto s3 = result.summary.per_variant.find("s3");
    auto s4 = result.summary.per_variant.find("s4");
    if (s3 != result.summary.per_variant.end() && s4 != result.summary.per_variant.end()) {
        result.summary.latency_ratio_s3_s4 = s3->second.mean_latency_ms / s4->second.mean_latency_ms;
        result.summary.radio_ratio_s3_s4 = s3->second.mean_radio_on_ms / s4->second.mean_radio_on_ms;
    }
    return result;
}

std::string format_csv(const MetricsTable& table) {
    std::string out = "variant,iteration,latency_ms,mean_radio_on_ms,max_radio_on_ms,reliability,correct\n";
    for (const auto& r : table.rows) {
        out += r.variant;
        out += ',';
        out += std::to_string(r.iteration);
        out += ',';
        append_double(out, "%.3f", r.latency_ms);
        out += ',';
        append_double(out, "%.3f", r.mean_radio_on_ms);
        out += ',';
        append_double(out, "%.3f", r.max_radio_on_ms);
        out += ',';
        append_double(out, "%.6f", r.reliability);
        out += ',';
        out += r.correct ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string format_json(const MetricsTable& table) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["variant"] = r.variant;
        row["iteration"] = r.iteration;
        row["latency_ms"] = r.latency_ms;
        row["mean_radio_on_ms"] = r.mean_radio_on_ms;
        row["max_radio_on_ms"] = r.max_radio_on_ms;
        row["reliability"] = r.reliability;
        row["correct"] = r.correct;
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

void write_results(const MetricsTable& table, const std::string& path, const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << (format == "json" ? format_json(table) : format_csv(table));
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string format_summary(const ExperimentSummary& summary) {
    std::string out;
    for (const auto& [name, vs] : summary.per_variant) {
        out += "variant " + name + ": iterations=" + std::to_string(vs.iterations) +
               " sharing_ntx=" + std::to_string(vs.sharing_ntx);
        out += " mean_latency_ms=";
        append_double(out, "%.3f", vs.mean_latency_ms);
        out += " mean_radio_on_ms=";
        append_double(out, "%.3f", vs.mean_radio_on_ms);
        out += " mean_reliability=";
        append_double(out, "%.6f", vs.mean_reliability);
        out += '\n';
    }
    if (summary.latency_ratio_s3_s4) {
        out += "s3/s4 latency ratio=";
        append_double(out, "%.3f", *summary.latency_ratio_s3_s4);
        out += " radio_on ratio=";
        append_double(out, "%.3f", *summary.radio_ratio_s3_s4);
        out += '\n';
    }
    return out;
}

}  // namespace ctagg::harness
