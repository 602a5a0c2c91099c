#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ctagg/ctsim.hpp"
#include "ctagg/ffield.hpp"
#include "ctagg/shamir.hpp"
#include "ctagg/sscrypto.hpp"
#include "ctagg/types.hpp"

namespace ctagg::protocol {

struct ProtocolConfig {
    ctsim::Variant variant = ctsim::Variant::S3;
    unsigned n = 0;
    unsigned degree = 1;          // polynomial degree k; collusion threshold
    unsigned ntx_share = 1;       // NTX for this variant's sharing phase
    unsigned ntx_recon = 1;
    std::uint64_t q = ffield::FieldModulus::kDefault;
    sscrypto::MasterSecret master_secret{};
    double slot_duration_ms = 4.0;

    // bootstrap profiling knobs
    unsigned reach_trials = 64;
    double reach_threshold = 0.99;
    unsigned profile_max_ntx = 0;  // 0 = derived from n

    ffield::FieldModulus modulus() const { return ffield::FieldModulus(q); }
    void validate() const;
};

// Keys for every pair, NTX reachability profiles, and the destination map.
// S4 uses one global aggregator set of k+1 nodes shared by every sharer so
// the point-wise sums stay on a single polynomial; S3 addresses everyone.
struct BootstrapInfo {
    std::map<std::pair<NodeId, NodeId>, sscrypto::PairwiseKey> keys;  // keyed by (lo, hi)
    std::vector<ctsim::ReachabilityProfile> profiles;                 // empty for S3
    ctsim::DestinationMap destinations;
    std::vector<NodeId> aggregators;  // sorted; == all nodes for S3

    const sscrypto::PairwiseKey& key_for(NodeId i, NodeId j) const;
    bool is_aggregator(NodeId id) const;
};

// No k+1 nodes are reachable by everyone at the configured sharing NTX.
class InfeasibleDestinationsError : public std::runtime_error {
public:
    InfeasibleDestinationsError(const std::string& msg, std::optional<unsigned> minimal_feasible_ntx)
        : std::runtime_error(msg), minimal_feasible_ntx_(minimal_feasible_ntx) {}

    std::optional<unsigned> minimal_feasible_ntx() const { return minimal_feasible_ntx_; }

private:
    std::optional<unsigned> minimal_feasible_ntx_;
};

struct NodeState {
    NodeId id = 0;
    shamir::PublicPoint point;
    ffield::FieldElement secret;
    std::optional<shamir::SecretPolynomial> polynomial;
    std::vector<std::pair<NodeId, shamir::Share>> incoming;  // decrypted shares addressed here
    std::optional<shamir::SumShare> partial;
    std::vector<shamir::SumShare> collected;
    std::optional<shamir::AggregateResult> aggregate;
    unsigned auth_failures = 0;
};

BootstrapInfo bootstrap(const ctsim::Topology& topo, const ProtocolConfig& config, std::mt19937_64& rng);

std::vector<NodeState> init_states(const ctsim::Topology& topo, std::span<const std::uint64_t> secrets,
                                   const ProtocolConfig& config);

struct PhaseResult {
    ctsim::ChainSchedule schedule;
    ctsim::PayloadStore payloads;
    ctsim::DisseminationResult dissemination;
};

// Polynomial construction, share sealing, one chain flood, and partial-sum
// assembly at every destination node.
PhaseResult sharing_phase(std::vector<NodeState>& states, const BootstrapInfo& boot,
                          const ctsim::Topology& topo, const ProtocolConfig& config,
                          std::uint32_t round_id, std::mt19937_64& rng);

// Plaintext flood of the partial sums (empty marker for nodes without one)
// followed by threshold reconstruction at every node.
PhaseResult reconstruction_phase(std::vector<NodeState>& states, const ctsim::Topology& topo,
                                 const ProtocolConfig& config, std::mt19937_64& rng);

struct MetricsRecord {
    double sharing_latency_ms = 0.0;
    double reconstruction_latency_ms = 0.0;
    double latency_ms = 0.0;
    std::vector<double> radio_on_ms;  // per node index
    double reliability = 0.0;         // fraction of nodes holding the full-network aggregate
    unsigned auth_failures = 0;
};

struct RoundResult {
    std::vector<NodeState> states;
    MetricsRecord metrics;
    ffield::FieldElement expected_aggregate;  // plain sum of all secrets mod q
    bool reporting_all_correct = true;        // every reported aggregate equals the plain sum
};

RoundResult run_round(const ctsim::Topology& topo, std::span<const std::uint64_t> secrets,
                      const ProtocolConfig& config, const BootstrapInfo& boot, std::uint32_t round_id,
                      std::mt19937_64& rng);

// Wire format of the reconstruction-phase packets: 1-byte presence tag,
// then little-endian point, value, and mask words.
std::vector<std::uint8_t> encode_sum_packet(const shamir::SumShare* sum);

struct SumPacket {
    bool present = false;
    shamir::SumShare sum;
};

std::optional<SumPacket> decode_sum_packet(std::span<const std::uint8_t> bytes,
                                           const ffield::FieldModulus& modulus, NodeId owner);

}  // namespace ctagg::protocol
