#include "ctagg/ffield.hpp"

namespace ctagg::ffield {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

}  // namespace

// Deterministic Miller-Rabin; this witness set is exact for all n < 2^64.
bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldModulus::FieldModulus(std::uint64_t q) : q_(q) {
    if (q < 3) throw std::invalid_argument("FieldModulus: q must be >= 3, got " + std::to_string(q));
    if (q >= (std::uint64_t{1} << 63))
        throw std::invalid_argument("FieldModulus: q must be < 2^63");
    if (!is_prime_u64(q)) throw std::invalid_argument("FieldModulus: q is not prime: " + std::to_string(q));
}

FieldElement FieldElement::inv() const {
    if (v_ == 0) throw std::domain_error("FieldElement: inverse of zero");
    // Extended Euclid on (q, v); q < 2^63 keeps the Bezout coefficients in int64 range.
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(q_), new_r = static_cast<std::int64_t>(v_);
    while (new_r != 0) {
        std::int64_t quot = r / new_r;
        std::int64_t tmp = t - quot * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - quot * new_r;
        r = new_r;
        new_r = tmp;
    }
    // r == gcd == 1 since q is prime and v != 0
    if (t < 0) t += static_cast<std::int64_t>(q_);
    return raw(static_cast<std::uint64_t>(t), q_);
}

}  // namespace ctagg::ffield
