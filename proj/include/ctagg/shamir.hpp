#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ctagg/ffield.hpp"
#include "ctagg/types.hpp"

namespace ctagg::shamir {

using ffield::FieldElement;
using ffield::FieldModulus;

// Degree-k polynomial whose constant term carries the node's secret:
// P(0) = c_0 = secret, c_1..c_k drawn uniformly at random.
class SecretPolynomial {
public:
    // coefficients = [c_0, c_1, ..., c_k]; requires k >= 1 and a common modulus.
    explicit SecretPolynomial(std::vector<FieldElement> coefficients);

    unsigned degree() const { return static_cast<unsigned>(coeffs_.size() - 1); }
    const FieldElement& constant_term() const { return coeffs_.front(); }
    const std::vector<FieldElement>& coefficients() const { return coeffs_; }

private:
    std::vector<FieldElement> coeffs_;
};

// Nonzero evaluation point assigned to a node. Node i owns x = i mod q,
// ids are 1-based, so x != 0 whenever the node count stays below q.
struct PublicPoint {
    FieldElement x;
    NodeId owner_node = 0;

    bool operator==(const PublicPoint& o) const { return x == o.x && owner_node == o.owner_node; }
};

PublicPoint point_for_node(NodeId id, const FieldModulus& m);

struct Share {
    PublicPoint point;
    FieldElement value;
};

// Point-wise sum of shares from the nodes recorded in participant_mask.
// Sums are only interpolation-compatible when their masks agree.
struct SumShare {
    PublicPoint point;
    FieldElement value;
    NodeMask participant_mask;
};

struct AggregateResult {
    FieldElement value;
    NodeMask participants;
};

// c_0 = secret, c_1..c_k uniform from the rng stream. Requires 1 <= k < q-1.
SecretPolynomial make_polynomial(const FieldElement& secret, unsigned degree, std::mt19937_64& rng);

// Horner evaluation of the polynomial at x.
FieldElement evaluate(const SecretPolynomial& poly, const FieldElement& x);

// One share per point; points must be pairwise distinct and nonzero.
std::vector<Share> make_shares(const SecretPolynomial& poly, std::span<const PublicPoint> points);

// Field-sum of shares evaluated at one common point; senders become the
// participant mask and must be distinct.
SumShare sum_shares(std::span<const Share> shares, std::span<const NodeId> senders);

// Value at x = 0 of the unique degree-<=k polynomial through k+1 of the
// given shares. When more than k+1 are supplied the k+1 with the lowest
// point values are used, keeping the selection deterministic. Throws on
// fewer than k+1 shares or duplicate points.
FieldElement lagrange_interpolate_at_zero(std::span<const Share> shares, unsigned degree);

// Aggregate over the largest group of mask-consistent sums with at least
// k+1 members (ties between equal-sized masks break towards the smaller
// mask words, then the k+1 lowest points are used). Empty result when no
// mask has k+1 consistent sums.
std::optional<AggregateResult> reconstruct_aggregate(std::span<const SumShare> sums, unsigned degree);

}  // namespace ctagg::shamir
