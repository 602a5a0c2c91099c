#include "ctagg/protocol.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "ctagg/rng.hpp"

namespace ctagg::protocol {

using ffield::FieldElement;
using ffield::FieldModulus;

void ProtocolConfig::validate() const {
    if (n < 2) throw std::invalid_argument("protocol config: need at least 2 nodes (k >= 1 requires n >= 2)");
    if (degree < 1 || degree > n - 1)
        throw std::invalid_argument("protocol config: degree must satisfy 1 <= k <= n-1, got k=" +
                                    std::to_string(degree) + " n=" + std::to_string(n));
    if (ntx_share < 1 || ntx_recon < 1)
        throw std::invalid_argument("protocol config: NTX values must be >= 1");
    if (slot_duration_ms <= 0.0)
        throw std::invalid_argument("protocol config: slot duration must be positive");
    FieldModulus m(q);  // primality
    if (q <= n) throw std::invalid_argument("protocol config: q must exceed the node count");
    if (!(reach_threshold > 0.0 && reach_threshold <= 1.0))
        throw std::invalid_argument("protocol config: reachability threshold must be in (0, 1]");
    if (reach_trials < 1) throw std::invalid_argument("protocol config: reach_trials must be >= 1");
}

const sscrypto::PairwiseKey& BootstrapInfo::key_for(NodeId i, NodeId j) const {
    auto it = keys.find({std::min(i, j), std::max(i, j)});
    if (it == keys.end())
        throw std::invalid_argument("bootstrap: no key for pair (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    return it->second;
}

bool BootstrapInfo::is_aggregator(NodeId id) const {
    return std::binary_search(aggregators.begin(), aggregators.end(), id);
}

BootstrapInfo bootstrap(const ctsim::Topology& topo, const ProtocolConfig& config, std::mt19937_64& rng) {
    config.validate();
    if (topo.size() != config.n)
        throw std::invalid_argument("bootstrap: topology size does not match config n");

    BootstrapInfo boot;
    const auto& nodes = topo.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            boot.keys.emplace(std::make_pair(nodes[i], nodes[j]),
                              sscrypto::derive_pairwise_key(config.master_secret, nodes[i], nodes[j]));

    const unsigned m = config.degree + 1;

    if (config.variant == ctsim::Variant::S3) {
        // Naive variant addresses everyone; no trimming, profiles unused.
        boot.aggregators = nodes;
        for (NodeId id : nodes) boot.destinations[id] = nodes;
        return boot;
    }

    unsigned max_ntx = config.profile_max_ntx;
    if (max_ntx == 0) max_ntx = std::min<unsigned>(std::max<unsigned>(config.ntx_share, config.n), 64);
    auto rc = ctsim::reachability_counts(topo, max_ntx, config.reach_trials, rng);

    boot.profiles.resize(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        boot.profiles[v].node = nodes[v];
        boot.profiles[v].by_ntx.resize(max_ntx);
        for (unsigned r = 1; r <= max_ntx; ++r) {
            NodeMask mask;
            for (std::size_t s = 0; s < nodes.size(); ++s)
                if (rc.frequency(r, v, s) >= config.reach_threshold) mask.set(nodes[s]);
            boot.profiles[v].by_ntx[r - 1] = std::move(mask);
        }
    }

    // Aggregator score: worst-case delivery frequency into the candidate
    // across all sources at the sharing NTX.
    auto min_freq_at = [&](std::size_t cand, unsigned ntx) {
        double worst = 1.0;
        for (std::size_t s = 0; s < nodes.size(); ++s)
            worst = std::min(worst, rc.frequency(ntx, cand, s));
        return worst;
    };

    unsigned ntx = std::min(config.ntx_share, max_ntx);
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return min_freq_at(a, ntx) > min_freq_at(b, ntx);
    });

    std::vector<NodeId> chosen;
    for (std::size_t idx : order) {
        if (chosen.size() == m) break;
        if (min_freq_at(idx, ntx) >= config.reach_threshold) chosen.push_back(nodes[idx]);
    }
    if (chosen.size() < m) {
        // Report the smallest NTX at which k+1 fully-covered nodes exist.
        std::optional<unsigned> minimal;
        for (unsigned t = 1; t <= max_ntx; ++t) {
            unsigned covered = 0;
            for (std::size_t c = 0; c < nodes.size(); ++c)
                if (min_freq_at(c, t) >= config.reach_threshold) ++covered;
            if (covered >= m) {
                minimal = t;
                break;
            }
        }
        std::string msg = "bootstrap: no feasible S4 destination set at ntx_share=" +
                          std::to_string(config.ntx_share) + " (need " + std::to_string(m) +
                          " nodes reachable by everyone); minimal feasible ntx " +
                          (minimal ? std::to_string(*minimal) : "exceeds " + std::to_string(max_ntx));
        throw InfeasibleDestinationsError(msg, minimal);
    }

    std::sort(chosen.begin(), chosen.end());
    boot.aggregators = chosen;
    for (NodeId id : nodes) boot.destinations[id] = chosen;
    return boot;
}

std::vector<NodeState> init_states(const ctsim::Topology& topo, std::span<const std::uint64_t> secrets,
                                   const ProtocolConfig& config) {
    config.validate();
    if (secrets.size() != topo.size())
        throw std::invalid_argument("init_states: one secret per node required");
    FieldModulus m = config.modulus();

    std::vector<NodeState> states(topo.size());
    for (std::size_t i = 0; i < topo.size(); ++i) {
        NodeId id = topo.node_at(i);
        if (id >= config.q)
            throw std::invalid_argument("init_states: node id " + std::to_string(id) +
                                        " collides mod q; pick a larger field");
        states[i].id = id;
        states[i].point = shamir::point_for_node(id, m);
        states[i].secret = FieldElement(secrets[i], m);
    }
    return states;
}

PhaseResult sharing_phase(std::vector<NodeState>& states, const BootstrapInfo& boot,
                          const ctsim::Topology& topo, const ProtocolConfig& config,
                          std::uint32_t round_id, std::mt19937_64& rng) {
    FieldModulus m = config.modulus();

    for (auto& st : states) st.polynomial = shamir::make_polynomial(st.secret, config.degree, rng);

    PhaseResult out;
    out.schedule = ctsim::build_chain_schedule(ctsim::Phase::Sharing, config.variant, topo.nodes(),
                                               &boot.destinations, config.slot_duration_ms);

    sscrypto::NonceLedger ledger;
    out.payloads.assign(out.schedule.length(), {});
    for (std::size_t s = 0; s < out.schedule.length(); ++s) {
        const auto& slot = out.schedule.sub_slots[s];
        if (slot.owner == slot.destination) continue;  // own share never goes on air

        const auto& sender_state = states[topo.index_of(slot.owner)];
        const auto& dest_state = states[topo.index_of(slot.destination)];
        shamir::Share share{dest_state.point, shamir::evaluate(*sender_state.polynomial, dest_state.point.x)};

        sscrypto::Nonce nonce{round_id, static_cast<std::uint32_t>(s)};
        if (!ledger.claim(slot.owner, slot.destination, nonce))
            throw std::logic_error("sharing_phase: nonce reuse within a round");
        auto sealed = sscrypto::seal_share(boot.key_for(slot.owner, slot.destination), share, slot.owner,
                                           slot.destination, nonce);
        out.payloads[s] = sscrypto::encode_sealed(sealed);
    }

    out.dissemination = ctsim::run_dissemination(topo, out.schedule, out.payloads, config.ntx_share, rng);

    for (std::size_t v = 0; v < states.size(); ++v) {
        auto& st = states[v];
        st.incoming.clear();
        st.partial.reset();
        if (!boot.is_aggregator(st.id)) continue;

        std::vector<shamir::Share> shares;
        std::vector<NodeId> senders;
        // A destination node always addresses itself, so its own share
        // enters the local sum without touching the radio.
        shares.push_back(shamir::Share{st.point, shamir::evaluate(*st.polynomial, st.point.x)});
        senders.push_back(st.id);

        for (std::size_t s = 0; s < out.schedule.length(); ++s) {
            const auto& slot = out.schedule.sub_slots[s];
            if (slot.destination != st.id || slot.owner == st.id) continue;
            if (!out.dissemination.received.test(v, s)) continue;
            auto sealed = sscrypto::decode_sealed(out.payloads[s]);
            if (!sealed) {
                ++st.auth_failures;
                continue;
            }
            auto opened = sscrypto::open_share(boot.key_for(slot.owner, st.id), *sealed, m);
            if (!opened) {
                ++st.auth_failures;
                continue;
            }
            st.incoming.emplace_back(slot.owner, *opened);
            shares.push_back(*opened);
            senders.push_back(slot.owner);
        }
        st.partial = shamir::sum_shares(shares, senders);
    }
    return out;
}

PhaseResult reconstruction_phase(std::vector<NodeState>& states, const ctsim::Topology& topo,
                                 const ProtocolConfig& config, std::mt19937_64& rng) {
    FieldModulus m = config.modulus();

    PhaseResult out;
    out.schedule = ctsim::build_chain_schedule(ctsim::Phase::Reconstruction, config.variant, topo.nodes(),
                                               nullptr, config.slot_duration_ms);
    out.payloads.assign(out.schedule.length(), {});
    for (std::size_t s = 0; s < out.schedule.length(); ++s) {
        const auto& st = states[topo.index_of(out.schedule.sub_slots[s].owner)];
        out.payloads[s] = encode_sum_packet(st.partial ? &*st.partial : nullptr);
    }

    out.dissemination = ctsim::run_dissemination(topo, out.schedule, out.payloads, config.ntx_recon, rng);

    for (std::size_t v = 0; v < states.size(); ++v) {
        auto& st = states[v];
        st.collected.clear();
        st.aggregate.reset();
        for (std::size_t s = 0; s < out.schedule.length(); ++s) {
            if (!out.dissemination.received.test(v, s)) continue;
            auto pkt = decode_sum_packet(out.payloads[s], m, out.schedule.sub_slots[s].owner);
            if (pkt && pkt->present) st.collected.push_back(pkt->sum);
        }
        st.aggregate = shamir::reconstruct_aggregate(st.collected, config.degree);
    }
    return out;
}

RoundResult run_round(const ctsim::Topology& topo, std::span<const std::uint64_t> secrets,
                      const ProtocolConfig& config, const BootstrapInfo& boot, std::uint32_t round_id,
                      std::mt19937_64& rng) {
    RoundResult result;
    result.states = init_states(topo, secrets, config);

    auto share_res = sharing_phase(result.states, boot, topo, config, round_id, rng);
    auto recon_res = reconstruction_phase(result.states, topo, config, rng);

    FieldModulus m = config.modulus();
    FieldElement expected = FieldElement::zero(m);
    for (const auto& st : result.states) expected += st.secret;
    result.expected_aggregate = expected;

    auto& metrics = result.metrics;
    metrics.sharing_latency_ms = share_res.dissemination.latency_ms;
    metrics.reconstruction_latency_ms = recon_res.dissemination.latency_ms;
    metrics.latency_ms = metrics.sharing_latency_ms + metrics.reconstruction_latency_ms;
    metrics.radio_on_ms.resize(topo.size());
    for (std::size_t v = 0; v < topo.size(); ++v)
        metrics.radio_on_ms[v] =
            share_res.dissemination.radio_on_ms[v] + recon_res.dissemination.radio_on_ms[v];

    unsigned correct = 0;
    for (const auto& st : result.states) {
        metrics.auth_failures += st.auth_failures;
        if (st.aggregate) {
            if (st.aggregate->value == expected)
                ++correct;
            else
                result.reporting_all_correct = false;
        }
    }
    metrics.reliability = static_cast<double>(correct) / static_cast<double>(topo.size());
    return result;
}

std::vector<std::uint8_t> encode_sum_packet(const shamir::SumShare* sum) {
    if (sum == nullptr) return {0};  // explicit empty marker keeps the slot occupied
    const auto& words = sum->participant_mask.words();
    std::vector<std::uint8_t> out(1 + 8 + 8 + 2 + words.size() * 8);
    out[0] = 1;
    auto put64 = [&out](std::size_t off, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out[off + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    put64(1, sum->point.x.value());
    put64(9, sum->value.value());
    out[17] = static_cast<std::uint8_t>(words.size());
    out[18] = static_cast<std::uint8_t>(words.size() >> 8);
    for (std::size_t w = 0; w < words.size(); ++w) put64(19 + w * 8, words[w]);
    return out;
}

std::optional<SumPacket> decode_sum_packet(std::span<const std::uint8_t> bytes,
                                           const ffield::FieldModulus& modulus, NodeId owner) {
    if (bytes.empty()) return std::nullopt;
    if (bytes[0] == 0) return bytes.size() == 1 ? std::optional<SumPacket>(SumPacket{}) : std::nullopt;
    if (bytes[0] != 1 || bytes.size() < 19) return std::nullopt;

    auto get64 = [&bytes](std::size_t off) {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[off + static_cast<std::size_t>(i)];
        return v;
    };
    std::size_t n_words = bytes[17] | (static_cast<std::size_t>(bytes[18]) << 8);
    if (bytes.size() != 19 + n_words * 8) return std::nullopt;

    std::vector<std::uint64_t> words(n_words);
    for (std::size_t w = 0; w < n_words; ++w) words[w] = get64(19 + w * 8);

    SumPacket pkt;
    pkt.present = true;
    pkt.sum.point = shamir::PublicPoint{ffield::FieldElement(get64(1), modulus), owner};
    pkt.sum.value = ffield::FieldElement(get64(9), modulus);
    pkt.sum.participant_mask = NodeMask::from_words(std::move(words));
    if (pkt.sum.participant_mask.empty()) return std::nullopt;
    return pkt;
}

}  // namespace ctagg::protocol
