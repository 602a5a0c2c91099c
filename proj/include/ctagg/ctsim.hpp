#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ctagg/types.hpp"

namespace ctagg::ctsim {

// Connected undirected graph standing in for a testbed. Link success
// probability is global with optional per-edge overrides.
class Topology {
public:
    struct Edge {
        NodeId a = 0;
        NodeId b = 0;
        std::optional<double> success_prob;  // overrides the global value
    };

    static Topology create(std::vector<NodeId> nodes, std::vector<Edge> edges, NodeId initiator,
                           double global_success_prob = 1.0);

    const std::vector<NodeId>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    NodeId initiator() const { return initiator_; }
    double global_success_prob() const { return global_success_prob_; }

    std::size_t index_of(NodeId id) const;
    NodeId node_at(std::size_t idx) const { return nodes_[idx]; }

    // Copy with a different global link success probability (per-edge
    // overrides are preserved).
    Topology with_global_success_prob(double p) const;

    // Directed links in deterministic order; the simulator draws per
    // (link, sub-slot) in exactly this order.
    struct DirectedLink {
        std::uint32_t from = 0;  // node indices
        std::uint32_t to = 0;
        double p = 1.0;
    };
    const std::vector<DirectedLink>& links() const { return links_; }

    // Hop diameter (max BFS eccentricity).
    unsigned diameter() const;

private:
    Topology() = default;
    void build_links();

    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    NodeId initiator_ = 0;
    double global_success_prob_ = 1.0;
    std::vector<DirectedLink> links_;
};

// Line-oriented topology text:
//   nodes <n>
//   edge <i> <j> [p <prob>]
//   initiator <id>          (optional, defaults to node 1)
// with '#' comments. Node ids are 1..n.
Topology parse_topology(std::istream& in, double global_success_prob = 1.0);
Topology load_topology_file(const std::string& path, double global_success_prob = 1.0);

// Random geometric graph on the unit square; throws if disconnected.
Topology random_geometric(unsigned n, double radius, std::uint64_t seed,
                          double global_success_prob = 1.0);

// Pinned desk-scale stand-ins for the 26- and 45-node testbeds.
Topology preset_topology(const std::string& name, double global_success_prob = 1.0);
bool is_preset_name(const std::string& name);

enum class Phase { Sharing, Reconstruction };
enum class Variant { S3, S4 };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

// One TDMA sub-slot: destination != 0 marks an addressed (sealed) share
// packet, destination == 0 a plaintext broadcast slot. The sub-slot index
// doubles as the logical payload id.
struct SubSlot {
    NodeId owner = 0;
    NodeId destination = 0;
};

struct ChainSchedule {
    Phase phase = Phase::Sharing;
    std::vector<SubSlot> sub_slots;
    double slot_duration_ms = 4.0;

    std::size_t length() const { return sub_slots.size(); }
    double duration_ms(unsigned ntx) const {
        return static_cast<double>(ntx) * static_cast<double>(sub_slots.size()) * slot_duration_ms;
    }
};

using DestinationMap = std::map<NodeId, std::vector<NodeId>>;

// Sharing/S3: n^2 sub-slots, one per (owner, destination) pair.
// Sharing/S4: n*m sub-slots from the destination map (required).
// Reconstruction: n sub-slots, one per node.
// Slots are ordered by owner id, then destination id.
ChainSchedule build_chain_schedule(Phase phase, Variant variant, const std::vector<NodeId>& nodes,
                                   const DestinationMap* destination_map, double slot_duration_ms);

// Node-by-slot bit matrix of who holds which chain payload.
class HoldSet {
public:
    HoldSet() = default;
    HoldSet(std::size_t n_nodes, std::size_t n_slots);

    bool test(std::size_t node_idx, std::size_t slot) const;
    void set(std::size_t node_idx, std::size_t slot);

    std::size_t count(std::size_t node_idx) const;
    std::size_t count() const;
    std::size_t slots() const { return n_slots_; }
    std::size_t nodes() const { return n_nodes_; }

    const std::uint64_t* row(std::size_t node_idx) const { return bits_.data() + node_idx * words_per_row_; }
    std::size_t words_per_row() const { return words_per_row_; }

private:
    std::size_t n_nodes_ = 0;
    std::size_t n_slots_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Payload bytes per sub-slot, provided by the slot's owner. Empty vectors
// are legal (explicit empty markers still occupy their slot).
using PayloadStore = std::vector<std::vector<std::uint8_t>>;

struct DisseminationResult {
    HoldSet received;                  // final holdings
    std::vector<HoldSet> after_round;  // holdings after rounds 1..ntx
    std::vector<double> radio_on_ms;   // per node index
    double latency_ms = 0.0;
    unsigned rounds_executed = 0;
};

// Executes ntx synchronous rounds: every node re-broadcasts each sub-slot
// payload it held at the start of the round, and each neighbor receives
// each sub-slot independently with the link success probability. Payloads
// advance one hop per round. Deterministic given the rng seed.
DisseminationResult run_dissemination(const Topology& topo, const ChainSchedule& schedule,
                                      const PayloadStore& payloads, unsigned ntx,
                                      std::mt19937_64& rng);

// Which source nodes' probe payloads arrive where, per NTX value.
// by_ntx[t-1] holds the sources received in >= threshold of trials at ntx = t.
struct ReachabilityProfile {
    NodeId node = 0;
    std::vector<NodeMask> by_ntx;
};

// Raw delivery counts over shared probe trials (one probe slot per node):
// counts[ntx-1][receiver_idx][source_idx] = trials in which the source's
// probe reached the receiver within ntx rounds.
struct ReachabilityCounts {
    unsigned trials = 0;
    std::vector<std::vector<std::vector<unsigned>>> counts;

    double frequency(unsigned ntx, std::size_t receiver, std::size_t source) const {
        return static_cast<double>(counts[ntx - 1][receiver][source]) / trials;
    }
};

ReachabilityCounts reachability_counts(const Topology& topo, unsigned max_ntx, unsigned trials,
                                       std::mt19937_64& rng);

// Profiles for every node from one shared set of probe trials.
std::vector<ReachabilityProfile> reachability_profiles(const Topology& topo, unsigned max_ntx,
                                                       unsigned trials, double threshold,
                                                       std::mt19937_64& rng);

ReachabilityProfile reachability_profile(const Topology& topo, NodeId node, unsigned max_ntx,
                                         unsigned trials, double threshold, std::mt19937_64& rng);

// Smallest ntx at which at least `quantile` of trials deliver every probe
// payload to every node; empty when no ntx <= max_ntx suffices.
std::optional<unsigned> min_ntx_full_coverage(const Topology& topo, unsigned max_ntx, unsigned trials,
                                              double quantile, std::mt19937_64& rng);

}  // namespace ctagg::ctsim
