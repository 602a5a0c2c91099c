#include "ctagg/sscrypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace ctagg::sscrypto {

namespace {

void put_u32le(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

void put_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx new_ctx() {
    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx) throw std::runtime_error("sscrypto: EVP_CIPHER_CTX_new failed");
    return ctx;
}

// 12-byte GCM IV from the nonce; unique per key within a round because
// the chain gives every sealed packet a distinct sub-slot.
std::array<std::uint8_t, 12> make_iv(Nonce n) {
    std::array<std::uint8_t, 12> iv{};
    put_u32le(iv.data(), n.round);
    put_u32le(iv.data() + 4, n.slot);
    return iv;
}

std::array<std::uint8_t, 16> make_aad(NodeId sender, NodeId dest, Nonce n) {
    std::array<std::uint8_t, 16> aad{};
    put_u32le(aad.data(), sender);
    put_u32le(aad.data() + 4, dest);
    put_u32le(aad.data() + 8, n.round);
    put_u32le(aad.data() + 12, n.slot);
    return aad;
}

constexpr std::size_t kShareBytes = 16;

}  // namespace

MasterSecret master_secret_from_hex(const std::string& hex) {
    if (hex.size() != 32)
        throw std::invalid_argument("master secret must be 32 hex chars, got " + std::to_string(hex.size()));
    MasterSecret out{};
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument(std::string("master secret: invalid hex char '") + c + "'");
    };
    for (std::size_t i = 0; i < 16; ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

PairwiseKey derive_pairwise_key(const MasterSecret& master, NodeId i, NodeId j) {
    if (i == j) throw std::invalid_argument("derive_pairwise_key: i and j must differ");
    if (i == 0 || j == 0) throw std::invalid_argument("derive_pairwise_key: node ids are 1-based");
    PairwiseKey key;
    key.lo = std::min(i, j);
    key.hi = std::max(i, j);

    static constexpr char kLabel[] = "ctagg.pairwise.v1";
    std::uint8_t msg[sizeof(kLabel) - 1 + 8];
    std::memcpy(msg, kLabel, sizeof(kLabel) - 1);
    put_u32le(msg + sizeof(kLabel) - 1, key.lo);
    put_u32le(msg + sizeof(kLabel) - 1 + 4, key.hi);

    std::uint8_t digest[32];
    unsigned digest_len = 0;
    if (HMAC(EVP_sha256(), master.data(), static_cast<int>(master.size()), msg, sizeof(msg), digest,
             &digest_len) == nullptr ||
        digest_len < key.bytes.size())
        throw std::runtime_error("derive_pairwise_key: HMAC failed");
    std::memcpy(key.bytes.data(), digest, key.bytes.size());
    return key;
}

SealedShare seal_share(const PairwiseKey& key, const shamir::Share& share, NodeId sender,
                       NodeId destination, Nonce nonce) {
    std::uint8_t plain[kShareBytes];
    put_u64le(plain, share.point.x.value());
    put_u64le(plain + 8, share.value.value());

    auto iv = make_iv(nonce);
    auto aad = make_aad(sender, destination, nonce);

    SealedShare out;
    out.sender = sender;
    out.destination = destination;
    out.nonce = nonce;
    out.ciphertext.resize(kShareBytes);

    auto ctx = new_ctx();
    int len = 0;
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(iv.size()), nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), iv.data()) != 1 ||
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len, plain, kShareBytes) != 1 ||
        EVP_EncryptFinal_ex(ctx.get(), out.ciphertext.data() + len, &len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(out.tag.size()),
                            out.tag.data()) != 1)
        throw std::runtime_error("seal_share: AES-128-GCM encryption failed");
    return out;
}

std::optional<shamir::Share> open_share(const PairwiseKey& key, const SealedShare& sealed,
                                        const ffield::FieldModulus& modulus) {
    if (sealed.ciphertext.size() != kShareBytes) return std::nullopt;

    auto iv = make_iv(sealed.nonce);
    auto aad = make_aad(sealed.sender, sealed.destination, sealed.nonce);
    std::uint8_t plain[kShareBytes];
    std::array<std::uint8_t, 16> tag = sealed.tag;

    auto ctx = new_ctx();
    int len = 0;
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(iv.size()), nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), iv.data()) != 1 ||
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
        EVP_DecryptUpdate(ctx.get(), plain, &len, sealed.ciphertext.data(),
                          static_cast<int>(sealed.ciphertext.size())) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()), tag.data()) != 1)
        return std::nullopt;
    if (EVP_DecryptFinal_ex(ctx.get(), plain + len, &len) != 1) return std::nullopt;  // bad tag

    shamir::Share share{
        shamir::PublicPoint{ffield::FieldElement(get_u64le(plain), modulus), sealed.destination},
        ffield::FieldElement(get_u64le(plain + 8), modulus)};
    return share;
}

std::vector<std::uint8_t> encode_sealed(const SealedShare& s) {
    std::vector<std::uint8_t> out(4 * 4 + 2 + s.ciphertext.size() + s.tag.size());
    std::uint8_t* p = out.data();
    put_u32le(p, s.sender);
    put_u32le(p + 4, s.destination);
    put_u32le(p + 8, s.nonce.round);
    put_u32le(p + 12, s.nonce.slot);
    p[16] = static_cast<std::uint8_t>(s.ciphertext.size());
    p[17] = static_cast<std::uint8_t>(s.ciphertext.size() >> 8);
    std::memcpy(p + 18, s.ciphertext.data(), s.ciphertext.size());
    std::memcpy(p + 18 + s.ciphertext.size(), s.tag.data(), s.tag.size());
    return out;
}

std::optional<SealedShare> decode_sealed(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 18) return std::nullopt;
    SealedShare s;
    s.sender = get_u32le(bytes.data());
    s.destination = get_u32le(bytes.data() + 4);
    s.nonce.round = get_u32le(bytes.data() + 8);
    s.nonce.slot = get_u32le(bytes.data() + 12);
    std::size_t ct_len = bytes[16] | (static_cast<std::size_t>(bytes[17]) << 8);
    if (bytes.size() != 18 + ct_len + s.tag.size()) return std::nullopt;
    s.ciphertext.assign(bytes.begin() + 18, bytes.begin() + 18 + static_cast<std::ptrdiff_t>(ct_len));
    std::memcpy(s.tag.data(), bytes.data() + 18 + ct_len, s.tag.size());
    return s;
}

bool NonceLedger::claim(NodeId a, NodeId b, Nonce nonce) {
    auto lo = std::min(a, b);
    auto hi = std::max(a, b);
    return used_.emplace(lo, hi, nonce.round, nonce.slot).second;
}

}  // namespace ctagg::sscrypto
