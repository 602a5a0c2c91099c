#include "ctagg/shamir.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ctagg::shamir {

SecretPolynomial::SecretPolynomial(std::vector<FieldElement> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.size() < 2)
        throw std::invalid_argument("SecretPolynomial: degree must be at least 1");
    for (const auto& c : coeffs_) {
        if (c.modulus() != coeffs_.front().modulus())
            throw std::invalid_argument("SecretPolynomial: mixed moduli in coefficients");
    }
}

PublicPoint point_for_node(NodeId id, const FieldModulus& m) {
    if (id == 0) throw std::invalid_argument("point_for_node: node ids are 1-based");
    FieldElement x(id, m);
    if (x.is_zero())
        throw std::invalid_argument("point_for_node: node id collapses to x = 0 (mod q)");
    return PublicPoint{x, id};
}

SecretPolynomial make_polynomial(const FieldElement& secret, unsigned degree, std::mt19937_64& rng) {
    FieldModulus m(secret.modulus());
    if (degree < 1 || degree >= m.q() - 1)
        throw std::invalid_argument("make_polynomial: degree must satisfy 1 <= k < q-1");
    std::vector<FieldElement> coeffs;
    coeffs.reserve(degree + 1);
    coeffs.push_back(secret);
    for (unsigned j = 0; j < degree; ++j) coeffs.push_back(FieldElement::random(m, rng));
    return SecretPolynomial(std::move(coeffs));
}

FieldElement evaluate(const SecretPolynomial& poly, const FieldElement& x) {
    const auto& c = poly.coefficients();
    FieldElement acc = c.back();
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<Share> make_shares(const SecretPolynomial& poly, std::span<const PublicPoint> points) {
    std::set<std::uint64_t> seen;
    for (const auto& p : points) {
        if (p.x.is_zero()) throw std::invalid_argument("make_shares: public point x = 0 would expose the secret");
        if (!seen.insert(p.x.value()).second)
            throw std::invalid_argument("make_shares: duplicate public point");
    }
    std::vector<Share> shares;
    shares.reserve(points.size());
    for (const auto& p : points) shares.push_back(Share{p, evaluate(poly, p.x)});
    return shares;
}

SumShare sum_shares(std::span<const Share> shares, std::span<const NodeId> senders) {
    if (shares.empty()) throw std::invalid_argument("sum_shares: empty share list");
    if (shares.size() != senders.size())
        throw std::invalid_argument("sum_shares: one sender per share required");
    SumShare out{shares.front().point, shares.front().value, NodeMask::single(senders.front())};
    for (std::size_t i = 1; i < shares.size(); ++i) {
        if (!(shares[i].point.x == out.point.x))
            throw std::invalid_argument("sum_shares: shares evaluated at different points");
        if (out.participant_mask.test(senders[i]))
            throw std::invalid_argument("sum_shares: duplicate sender in mask");
        out.value += shares[i].value;
        out.participant_mask.set(senders[i]);
    }
    return out;
}

namespace {

// Core Lagrange step on exactly k+1 distinct points:
//   P(0) = sum_j y_j * prod_{m != j} x_m * (x_m - x_j)^-1
FieldElement interpolate_at_zero(const std::vector<std::pair<FieldElement, FieldElement>>& pts) {
    FieldModulus m(pts.front().first.modulus());
    FieldElement acc = FieldElement::zero(m);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        FieldElement num = FieldElement::one(m);
        FieldElement den = FieldElement::one(m);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == j) continue;
            num *= pts[i].first;
            den *= pts[i].first - pts[j].first;
        }
        acc += pts[j].second * num * den.inv();
    }
    return acc;
}

// Lowest-x selection of exactly k+1 points; throws on shortage/duplicates.
std::vector<std::pair<FieldElement, FieldElement>> select_points(
    std::vector<std::pair<FieldElement, FieldElement>> pts, unsigned degree) {
    if (pts.size() < degree + 1)
        throw std::invalid_argument("lagrange: need at least k+1 shares, got " + std::to_string(pts.size()));
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first.value() < b.first.value(); });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].first == pts[i - 1].first)
            throw std::invalid_argument("lagrange: duplicate interpolation points");
    }
    pts.resize(degree + 1);
    return pts;
}

}  // namespace

FieldElement lagrange_interpolate_at_zero(std::span<const Share> shares, unsigned degree) {
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    pts.reserve(shares.size());
    for (const auto& s : shares) {
        if (s.point.x.is_zero()) throw std::invalid_argument("lagrange: point x = 0 is not a share");
        pts.emplace_back(s.point.x, s.value);
    }
    return interpolate_at_zero(select_points(std::move(pts), degree));
}

std::optional<AggregateResult> reconstruct_aggregate(std::span<const SumShare> sums, unsigned degree) {
    // Group by participant mask; interpolation is only meaningful over
    // sums covering the same contributor set.
    std::map<NodeMask, std::map<std::uint64_t, const SumShare*>> groups;
    for (const auto& s : sums) {
        if (s.participant_mask.empty())
            throw std::invalid_argument("reconstruct_aggregate: empty participant mask");
        groups[s.participant_mask].emplace(s.point.x.value(), &s);  // dedupe by point
    }

    const NodeMask* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [mask, entries] : groups) {
        if (entries.size() < degree + 1) continue;
        std::size_t c = mask.count();
        if (best == nullptr || c > best_count) {
            best = &mask;
            best_count = c;
        }
        // equal count keeps the earlier (map-ordered, i.e. smaller) mask
    }
    if (best == nullptr) return std::nullopt;

    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (const auto& [xv, s] : groups[*best]) pts.emplace_back(s->point.x, s->value);
    FieldElement value = interpolate_at_zero(select_points(std::move(pts), degree));
    return AggregateResult{value, *best};
}

}  // namespace ctagg::shamir
