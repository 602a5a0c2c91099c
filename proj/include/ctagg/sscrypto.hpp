#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ctagg/shamir.hpp"
#include "ctagg/types.hpp"

namespace ctagg::sscrypto {

using MasterSecret = std::array<std::uint8_t, 16>;

// Symmetric 128-bit key for an unordered node pair, derived from the
// master secret; key(i, j) == key(j, i).
struct PairwiseKey {
    std::array<std::uint8_t, 16> bytes{};
    NodeId lo = 0;
    NodeId hi = 0;

    bool operator==(const PairwiseKey& o) const { return bytes == o.bytes && lo == o.lo && hi == o.hi; }
};

// (round, chain sub-slot) pair; unique per key within a round.
struct Nonce {
    std::uint32_t round = 0;
    std::uint32_t slot = 0;

    bool operator==(const Nonce& o) const { return round == o.round && slot == o.slot; }
};

// AES-128-GCM envelope around the canonical 16-byte share encoding
// (little-endian point and value, 8 bytes each). Sender, destination and
// nonce are bound as associated data, so a packet opened under the wrong
// key or addressing fails authentication.
struct SealedShare {
    NodeId sender = 0;
    NodeId destination = 0;
    Nonce nonce;
    std::vector<std::uint8_t> ciphertext;
    std::array<std::uint8_t, 16> tag{};
};

MasterSecret master_secret_from_hex(const std::string& hex);

// HMAC-SHA256 of the ordered pair, truncated to 128 bits. i == j is rejected.
PairwiseKey derive_pairwise_key(const MasterSecret& master, NodeId i, NodeId j);

SealedShare seal_share(const PairwiseKey& key, const shamir::Share& share, NodeId sender,
                       NodeId destination, Nonce nonce);

// Empty result on authentication failure; the caller drops the packet.
std::optional<shamir::Share> open_share(const PairwiseKey& key, const SealedShare& sealed,
                                        const ffield::FieldModulus& modulus);

std::vector<std::uint8_t> encode_sealed(const SealedShare& s);
std::optional<SealedShare> decode_sealed(std::span<const std::uint8_t> bytes);

// Tracks nonces issued per unordered pair so a reuse within a round is
// caught before sealing.
class NonceLedger {
public:
    // false when (pair, nonce) was already claimed.
    bool claim(NodeId a, NodeId b, Nonce nonce);
    void reset() { used_.clear(); }

private:
    std::set<std::tuple<NodeId, NodeId, std::uint32_t, std::uint32_t>> used_;
};

}  // namespace ctagg::sscrypto
