#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctagg {

using NodeId = std::uint32_t;  // 1-based; 0 is reserved as "no node"

// Set of node ids, used to record which nodes' secrets a sum covers.
// Stored as a packed bitset with no trailing zero words, so equal sets
// compare equal structurally.
class NodeMask {
public:
    NodeMask() = default;

    void set(NodeId id) {
        check_id(id);
        std::size_t w = (id - 1) / 64;
        if (w >= words_.size()) words_.resize(w + 1, 0);
        words_[w] |= std::uint64_t{1} << ((id - 1) % 64);
    }

    bool test(NodeId id) const {
        if (id == 0) return false;
        std::size_t w = (id - 1) / 64;
        if (w >= words_.size()) return false;
        return (words_[w] >> ((id - 1) % 64)) & 1;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    bool empty() const { return words_.empty(); }

    NodeMask& operator|=(const NodeMask& other) {
        if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
        for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    bool contains(const NodeMask& other) const {
        for (std::size_t i = 0; i < other.words_.size(); ++i) {
            std::uint64_t w = i < words_.size() ? words_[i] : 0;
            if ((w & other.words_[i]) != other.words_[i]) return false;
        }
        return true;
    }

    bool operator==(const NodeMask& other) const { return words_ == other.words_; }
    bool operator!=(const NodeMask& other) const { return !(*this == other); }

    // Strict weak order for deterministic grouping; larger sets do not
    // necessarily sort first, callers order by count() explicitly.
    bool operator<(const NodeMask& other) const { return words_ < other.words_; }

    std::vector<NodeId> ids() const {
        std::vector<NodeId> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
                out.push_back(static_cast<NodeId>(w * 64 + b + 1));
                bits &= bits - 1;
            }
        }
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    static NodeMask single(NodeId id) {
        NodeMask m;
        m.set(id);
        return m;
    }

    static NodeMask from_words(std::vector<std::uint64_t> words) {
        while (!words.empty() && words.back() == 0) words.pop_back();
        NodeMask m;
        m.words_ = std::move(words);
        return m;
    }

private:
    static void check_id(NodeId id) {
        if (id == 0) throw std::invalid_argument("NodeMask: node ids are 1-based, got 0");
    }

    std::vector<std::uint64_t> words_;
};

}  // namespace ctagg
