#include <algorithm>
#include <stdexcept>

#include "ctagg/ctsim.hpp"
#include "ctagg/rng.hpp"

namespace ctagg::ctsim {

Variant variant_from_string(const std::string& s) {
    if (s == "s3" || s == "S3") return Variant::S3;
    if (s == "s4" || s == "S4") return Variant::S4;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(Variant v) { return v == Variant::S3 ? "s3" : "s4"; }

ChainSchedule build_chain_schedule(Phase phase, Variant variant, const std::vector<NodeId>& nodes,
                                   const DestinationMap* destination_map, double slot_duration_ms) {
    if (nodes.empty()) throw std::invalid_argument("build_chain_schedule: empty node list");
    if (slot_duration_ms <= 0.0)
        throw std::invalid_argument("build_chain_schedule: slot duration must be positive");

    ChainSchedule sched;
    sched.phase = phase;
    sched.slot_duration_ms = slot_duration_ms;

    std::vector<NodeId> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());

    if (phase == Phase::Reconstruction) {
        // One plaintext sum slot per node regardless of variant.
        for (NodeId id : sorted) sched.sub_slots.push_back({id, 0});
        return sched;
    }

    if (variant == Variant::S3) {
        // Every node addresses every node: n^2 sub-slots.
        for (NodeId owner : sorted)
            for (NodeId dest : sorted) sched.sub_slots.push_back({owner, dest});
        return sched;
    }

    if (destination_map == nullptr)
        throw std::invalid_argument("build_chain_schedule: S4 sharing requires a destination map");
    for (NodeId owner : sorted) {
        auto it = destination_map->find(owner);
        if (it == destination_map->end() || it->second.empty())
            throw std::invalid_argument("build_chain_schedule: no destinations for node " +
                                        std::to_string(owner));
        std::vector<NodeId> dests = it->second;
        std::sort(dests.begin(), dests.end());
        for (NodeId dest : dests) sched.sub_slots.push_back({owner, dest});
    }
    return sched;
}

HoldSet::HoldSet(std::size_t n_nodes, std::size_t n_slots)
    : n_nodes_(n_nodes), n_slots_(n_slots), words_per_row_((n_slots + 63) / 64),
      bits_(n_nodes * ((n_slots + 63) / 64), 0) {}

bool HoldSet::test(std::size_t node_idx, std::size_t slot) const {
    return (bits_[node_idx * words_per_row_ + slot / 64] >> (slot % 64)) & 1;
}

void HoldSet::set(std::size_t node_idx, std::size_t slot) {
    bits_[node_idx * words_per_row_ + slot / 64] |= std::uint64_t{1} << (slot % 64);
}

std::size_t HoldSet::count(std::size_t node_idx) const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w)
        c += static_cast<std::size_t>(__builtin_popcountll(bits_[node_idx * words_per_row_ + w]));
    return c;
}

std::size_t HoldSet::count() const {
    std::size_t c = 0;
    for (auto w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
}

DisseminationResult run_dissemination(const Topology& topo, const ChainSchedule& schedule,
                                      const PayloadStore& payloads, unsigned ntx,
                                      std::mt19937_64& rng) {
    if (ntx < 1) throw std::invalid_argument("run_dissemination: ntx must be >= 1");
    const std::size_t n = topo.size();
    const std::size_t L = schedule.length();
    if (payloads.size() != L)
        throw std::invalid_argument("run_dissemination: payload store size does not match chain length");

    HoldSet holds(n, L);
    for (std::size_t s = 0; s < L; ++s) holds.set(topo.index_of(schedule.sub_slots[s].owner), s);

    DisseminationResult res;
    res.after_round.reserve(ntx);

    for (unsigned round = 0; round < ntx; ++round) {
        HoldSet prev = holds;  // one-hop-per-round snapshot
        for (const auto& link : topo.links()) {
            const std::uint64_t* src = prev.row(link.from);
            for (std::size_t w = 0; w < prev.words_per_row(); ++w) {
                std::uint64_t bits = src[w];
                while (bits) {
                    unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
                    bits &= bits - 1;
                    std::size_t slot = w * 64 + b;
                    if (holds.test(link.to, slot)) continue;  // already received, no draw
                    if (link.p >= 1.0 || bernoulli(rng, link.p)) holds.set(link.to, slot);
                }
            }
        }
        res.after_round.push_back(holds);
    }

    res.received = std::move(holds);
    res.rounds_executed = ntx;
    res.latency_ms = schedule.duration_ms(ntx);
    // Radio stays on for the whole chain in every round.
    res.radio_on_ms.assign(n, schedule.duration_ms(ntx));
    return res;
}

namespace {

// Probe chain used for profiling: one anonymous slot per node.
ChainSchedule probe_chain(const Topology& topo) {
    ChainSchedule sched;
    sched.phase = Phase::Reconstruction;
    for (NodeId id : topo.nodes()) sched.sub_slots.push_back({id, 0});
    return sched;
}

}  // namespace

ReachabilityCounts reachability_counts(const Topology& topo, unsigned max_ntx, unsigned trials,
                                       std::mt19937_64& rng) {
    if (trials < 1) throw std::invalid_argument("reachability_counts: trials must be >= 1");
    if (max_ntx < 1) throw std::invalid_argument("reachability_counts: max_ntx must be >= 1");
    const std::size_t n = topo.size();
    auto sched = probe_chain(topo);
    PayloadStore payloads(n);

    ReachabilityCounts rc;
    rc.trials = trials;
    rc.counts.assign(max_ntx, std::vector<std::vector<unsigned>>(n, std::vector<unsigned>(n, 0)));

    for (unsigned t = 0; t < trials; ++t) {
        auto res = run_dissemination(topo, sched, payloads, max_ntx, rng);
        for (unsigned r = 0; r < max_ntx; ++r)
            for (std::size_t v = 0; v < n; ++v)
                for (std::size_t s = 0; s < n; ++s)
                    if (res.after_round[r].test(v, s)) ++rc.counts[r][v][s];
    }
    return rc;
}

std::vector<ReachabilityProfile> reachability_profiles(const Topology& topo, unsigned max_ntx,
                                                       unsigned trials, double threshold,
                                                       std::mt19937_64& rng) {
    auto rc = reachability_counts(topo, max_ntx, trials, rng);
    const std::size_t n = topo.size();
    std::vector<ReachabilityProfile> profiles(n);
    for (std::size_t v = 0; v < n; ++v) {
        profiles[v].node = topo.node_at(v);
        profiles[v].by_ntx.resize(max_ntx);
        for (unsigned r = 0; r < max_ntx; ++r) {
            NodeMask m;
            for (std::size_t s = 0; s < n; ++s) {
                if (rc.frequency(r + 1, v, s) >= threshold) m.set(topo.node_at(s));
            }
            profiles[v].by_ntx[r] = std::move(m);
        }
    }
    return profiles;
}

ReachabilityProfile reachability_profile(const Topology& topo, NodeId node, unsigned max_ntx,
                                         unsigned trials, double threshold, std::mt19937_64& rng) {
    auto all = reachability_profiles(topo, max_ntx, trials, threshold, rng);
    return all[topo.index_of(node)];
}

std::optional<unsigned> min_ntx_full_coverage(const Topology& topo, unsigned max_ntx, unsigned trials,
                                              double quantile, std::mt19937_64& rng) {
    if (trials < 1) throw std::invalid_argument("min_ntx_full_coverage: trials must be >= 1");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("min_ntx_full_coverage: quantile must be in (0, 1]");
    const std::size_t n = topo.size();
    auto sched = probe_chain(topo);
    PayloadStore payloads(n);
    const std::size_t full = n * n;

    // covered_by[ntx-1] = number of trials fully covered within ntx rounds
    std::vector<unsigned> covered_by(max_ntx, 0);
    for (unsigned t = 0; t < trials; ++t) {
        auto res = run_dissemination(topo, sched, payloads, max_ntx, rng);
        for (unsigned r = 0; r < max_ntx; ++r) {
            if (res.after_round[r].count() == full) {
                for (unsigned rr = r; rr < max_ntx; ++rr) ++covered_by[rr];
                break;
            }
        }
    }
    for (unsigned r = 0; r < max_ntx; ++r) {
        if (static_cast<double>(covered_by[r]) / trials >= quantile) return r + 1;
    }
    return std::nullopt;
}

}  // namespace ctagg::ctsim
