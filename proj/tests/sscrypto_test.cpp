#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "ctagg/sscrypto.hpp"

using namespace ctagg;
using namespace ctagg::sscrypto;

namespace {

const MasterSecret kMaster = master_secret_from_hex("000102030405060708090a0b0c0d0e0f");

shamir::Share random_share(const ffield::FieldModulus& m, std::mt19937_64& rng, NodeId dest) {
    return shamir::Share{shamir::PublicPoint{ffield::FieldElement::random(m, rng), dest},
                         ffield::FieldElement::random(m, rng)};
}

}  // namespace

TEST_CASE("master secret hex parsing") {
    auto ms = master_secret_from_hex("00112233445566778899aabbccddeeff");
    CHECK(ms[0] == 0x00);
    CHECK(ms[1] == 0x11);
    CHECK(ms[15] == 0xff);
    CHECK(master_secret_from_hex("00112233445566778899AABBCCDDEEFF") == ms);
    CHECK_THROWS_AS(master_secret_from_hex("1234"), std::invalid_argument);
    CHECK_THROWS_AS(master_secret_from_hex("zz112233445566778899aabbccddeeff"), std::invalid_argument);
}

TEST_CASE("pairwise key derivation is symmetric and deterministic") {
    auto k37 = derive_pairwise_key(kMaster, 3, 7);
    auto k73 = derive_pairwise_key(kMaster, 7, 3);
    CHECK(k37 == k73);
    CHECK(k37.lo == 3);
    CHECK(k37.hi == 7);
    CHECK(derive_pairwise_key(kMaster, 3, 7) == k37);

    CHECK(derive_pairwise_key(kMaster, 1, 2).bytes != derive_pairwise_key(kMaster, 1, 3).bytes);
    CHECK_THROWS_AS(derive_pairwise_key(kMaster, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS(derive_pairwise_key(kMaster, 0, 5), std::invalid_argument);

    auto other = master_secret_from_hex("ffeeddccbbaa99887766554433221100");
    CHECK(derive_pairwise_key(other, 3, 7).bytes != k37.bytes);
}

TEST_CASE("all pairwise keys in a 45-node network are distinct") {
    std::set<std::array<std::uint8_t, 16>> seen;
    for (NodeId i = 1; i <= 45; ++i)
        for (NodeId j = i + 1; j <= 45; ++j)
            CHECK(seen.insert(derive_pairwise_key(kMaster, i, j).bytes).second);
    CHECK(seen.size() == 45 * 44 / 2);
}

TEST_CASE("seal/open round trip") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    std::mt19937_64 rng(2024);
    auto key = derive_pairwise_key(kMaster, 2, 9);
    for (int i = 0; i < 10000; ++i) {
        auto share = random_share(m, rng, 9);
        Nonce nonce{static_cast<std::uint32_t>(i / 100), static_cast<std::uint32_t>(i % 100)};
        auto sealed = seal_share(key, share, 2, 9, nonce);
        auto opened = open_share(key, sealed, m);
        REQUIRE(opened.has_value());
        CHECK(opened->point.x == share.point.x);
        CHECK(opened->value == share.value);
        CHECK(opened->point.owner_node == 9);
        // opening twice gives the same plaintext
        auto again = open_share(key, sealed, m);
        REQUIRE(again.has_value());
        CHECK(again->value == share.value);
    }
}

TEST_CASE("wrong key fails authentication") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    std::mt19937_64 rng(7);
    auto key = derive_pairwise_key(kMaster, 1, 2);
    auto wrong = derive_pairwise_key(kMaster, 1, 3);
    for (int i = 0; i < 200; ++i) {
        auto sealed = seal_share(key, random_share(m, rng, 2), 1, 2, Nonce{0, static_cast<std::uint32_t>(i)});
        CHECK_FALSE(open_share(wrong, sealed, m).has_value());
        CHECK(open_share(key, sealed, m).has_value());
    }
}

TEST_CASE("every single-bit corruption of ciphertext or tag is rejected") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    std::mt19937_64 rng(55);
    auto key = derive_pairwise_key(kMaster, 4, 11);
    for (int pkt = 0; pkt < 4; ++pkt) {
        auto sealed = seal_share(key, random_share(m, rng, 11), 4, 11, Nonce{7, static_cast<std::uint32_t>(pkt)});
        for (std::size_t byte = 0; byte < sealed.ciphertext.size(); ++byte) {
            for (int bit = 0; bit < 8; ++bit) {
                auto tampered = sealed;
                tampered.ciphertext[byte] ^= static_cast<std::uint8_t>(1 << bit);
                CHECK_FALSE(open_share(key, tampered, m).has_value());
            }
        }
        for (std::size_t byte = 0; byte < sealed.tag.size(); ++byte) {
            for (int bit = 0; bit < 8; ++bit) {
                auto tampered = sealed;
                tampered.tag[byte] ^= static_cast<std::uint8_t>(1 << bit);
                CHECK_FALSE(open_share(key, tampered, m).has_value());
            }
        }
    }
}

TEST_CASE("tampering with addressing or nonce breaks authentication") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    std::mt19937_64 rng(66);
    auto key = derive_pairwise_key(kMaster, 4, 11);
    auto sealed = seal_share(key, random_share(m, rng, 11), 4, 11, Nonce{1, 5});

    auto s1 = sealed;
    s1.sender = 5;
    CHECK_FALSE(open_share(key, s1, m).has_value());
    auto s2 = sealed;
    s2.destination = 12;
    CHECK_FALSE(open_share(key, s2, m).has_value());
    auto s3 = sealed;
    s3.nonce.round = 2;
    CHECK_FALSE(open_share(key, s3, m).has_value());
    auto s4 = sealed;
    s4.ciphertext.pop_back();  // truncated
    CHECK_FALSE(open_share(key, s4, m).has_value());
}

TEST_CASE("different shares under one key give different ciphertexts") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    auto key = derive_pairwise_key(kMaster, 1, 2);
    shamir::Share a{shamir::PublicPoint{ffield::FieldElement(2, m), 2}, ffield::FieldElement(100, m)};
    shamir::Share b{shamir::PublicPoint{ffield::FieldElement(2, m), 2}, ffield::FieldElement(101, m)};
    auto sa = seal_share(key, a, 1, 2, Nonce{0, 0});
    auto sb = seal_share(key, b, 1, 2, Nonce{0, 1});
    CHECK(sa.ciphertext != sb.ciphertext);
    // determinism: same share, key and nonce seals identically
    auto sa2 = seal_share(key, a, 1, 2, Nonce{0, 0});
    CHECK(sa.ciphertext == sa2.ciphertext);
    CHECK(sa.tag == sa2.tag);
}

TEST_CASE("sealed packet wire encoding round-trips and rejects malformed input") {
    ffield::FieldModulus m(ffield::FieldModulus::kDefault);
    std::mt19937_64 rng(31);
    auto key = derive_pairwise_key(kMaster, 6, 13);
    for (int i = 0; i < 500; ++i) {
        auto sealed = seal_share(key, random_share(m, rng, 13), 6, 13,
                                 Nonce{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1)});
        auto bytes = encode_sealed(sealed);
        auto decoded = decode_sealed(bytes);
        REQUIRE(decoded.has_value());
        CHECK(decoded->sender == sealed.sender);
        CHECK(decoded->destination == sealed.destination);
        CHECK(decoded->nonce == sealed.nonce);
        CHECK(decoded->ciphertext == sealed.ciphertext);
        CHECK(decoded->tag == sealed.tag);
        auto reopened = open_share(key, *decoded, m);
        CHECK(reopened.has_value());

        auto truncated = bytes;
        truncated.pop_back();
        CHECK_FALSE(decode_sealed(truncated).has_value());
    }
    CHECK_FALSE(decode_sealed(std::vector<std::uint8_t>{}).has_value());
    CHECK_FALSE(decode_sealed(std::vector<std::uint8_t>(5, 0)).has_value());
}

TEST_CASE("nonce ledger rejects reuse within a round") {
    NonceLedger ledger;
    CHECK(ledger.claim(1, 2, Nonce{0, 5}));
    CHECK_FALSE(ledger.claim(1, 2, Nonce{0, 5}));
    CHECK_FALSE(ledger.claim(2, 1, Nonce{0, 5}));  // pair is unordered
    CHECK(ledger.claim(1, 2, Nonce{0, 6}));        // different slot
    CHECK(ledger.claim(1, 2, Nonce{1, 5}));        // different round
    CHECK(ledger.claim(1, 3, Nonce{0, 5}));        // different pair
    ledger.reset();
    CHECK(ledger.claim(1, 2, Nonce{0, 5}));
}
