#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "ctagg/rng.hpp"

namespace ctagg::ffield {

// Prime modulus of the field all secrets, shares and sums live in.
// Primality is checked at construction (deterministic Miller-Rabin,
// valid for any q < 2^64). Default is the Mersenne prime 2^31 - 1:
// sums of thousands of 16-bit sensor readings stay far below it.
class FieldModulus {
public:
    static constexpr std::uint64_t kDefault = 2147483647ULL;  // 2^31 - 1

    explicit FieldModulus(std::uint64_t q);

    std::uint64_t q() const { return q_; }

    bool operator==(const FieldModulus& other) const { return q_ == other.q_; }
    bool operator!=(const FieldModulus& other) const { return q_ != other.q_; }

private:
    std::uint64_t q_;
};

bool is_prime_u64(std::uint64_t n);

// Residue mod q, always stored as the canonical representative in [0, q),
// so equality is plain structural equality. Mixing moduli throws.
class FieldElement {
public:
    FieldElement() : v_(0), q_(FieldModulus::kDefault) {}
    FieldElement(std::uint64_t value, const FieldModulus& m) : v_(value % m.q()), q_(m.q()) {}

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return q_; }

    FieldElement operator+(const FieldElement& o) const {
        check_same(o);
        std::uint64_t s = v_ + o.v_;  // q < 2^63, no overflow
        if (s >= q_) s -= q_;
        return raw(s, q_);
    }

    FieldElement operator-(const FieldElement& o) const {
        check_same(o);
        std::uint64_t s = v_ >= o.v_ ? v_ - o.v_ : v_ + q_ - o.v_;
        return raw(s, q_);
    }

    FieldElement operator*(const FieldElement& o) const {
        check_same(o);
        auto p = static_cast<unsigned __int128>(v_) * o.v_;
        return raw(static_cast<std::uint64_t>(p % q_), q_);
    }

    FieldElement operator-() const { return raw(v_ == 0 ? 0 : q_ - v_, q_); }

    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    // Multiplicative inverse via extended Euclid; throws on zero.
    FieldElement inv() const;

    bool is_zero() const { return v_ == 0; }

    bool operator==(const FieldElement& o) const { return v_ == o.v_ && q_ == o.q_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    static FieldElement zero(const FieldModulus& m) { return raw(0, m.q()); }
    static FieldElement one(const FieldModulus& m) { return raw(1 % m.q(), m.q()); }

    // Uniform element of [0, q).
    static FieldElement random(const FieldModulus& m, std::mt19937_64& rng) {
        return raw(uniform_below(rng, m.q()), m.q());
    }

private:
    static FieldElement raw(std::uint64_t v, std::uint64_t q) {
        FieldElement e;
        e.v_ = v;
        e.q_ = q;
        return e;
    }

    void check_same(const FieldElement& o) const {
        if (q_ != o.q_)
            throw std::invalid_argument("FieldElement: modulus mismatch (" + std::to_string(q_) +
                                        " vs " + std::to_string(o.q_) + ")");
    }

    std::uint64_t v_;
    std::uint64_t q_;
};

}  // namespace ctagg::ffield
