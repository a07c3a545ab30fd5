#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace maxpot {

using NodeId = int;

// Dynamic bitset over node indices with set algebra and ordered iteration.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::size_t universe) : n_(universe), words_((universe + 63) / 64, 0) {}
    NodeSet(std::size_t universe, std::initializer_list<NodeId> ids) : NodeSet(universe) {
        for (NodeId v : ids) insert(v);
    }
    static NodeSet from(std::size_t universe, const std::vector<NodeId>& ids) {
        NodeSet s(universe);
        for (NodeId v : ids) s.insert(v);
        return s;
    }
    static NodeSet full(std::size_t universe) {
        NodeSet s(universe);
        for (std::size_t i = 0; i < universe; ++i) s.insert(static_cast<NodeId>(i));
        return s;
    }

    std::size_t universe() const { return n_; }
    void insert(NodeId v) { words_[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
    void erase(NodeId v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
    bool contains(NodeId v) const { return (words_[v >> 6] >> (v & 63)) & 1U; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    NodeSet& operator|=(const NodeSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    NodeSet& operator&=(const NodeSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    NodeSet& operator-=(const NodeSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend NodeSet operator|(NodeSet a, const NodeSet& b) { return a |= b; }
    friend NodeSet operator&(NodeSet a, const NodeSet& b) { return a &= b; }
    friend NodeSet operator-(NodeSet a, const NodeSet& b) { return a -= b; }
    friend bool operator==(const NodeSet& a, const NodeSet& b) { return a.words_ == b.words_; }

    bool intersects(const NodeSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    bool subset_of(const NodeSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    std::vector<NodeId> to_vector() const {
        std::vector<NodeId> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(static_cast<NodeId>(i * 64 + b));
                w &= w - 1;
            }
        }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace maxpot
