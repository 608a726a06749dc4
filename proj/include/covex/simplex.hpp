#pragma once

#include "covex/types.hpp"

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace covex {

/// Ordered list of distinct vertices. Two orderings are the same oriented simplex iff they differ
/// by an even permutation.
class Simplex {
public:
    Simplex() = default;
    explicit Simplex(std::vector<VertexId> verts) : v_(std::move(verts)) { check_distinct(); }
    Simplex(std::initializer_list<std::uint32_t> ids) {
        v_.reserve(ids.size());
        for (auto i : ids) v_.push_back(vertex(i));
        check_distinct();
    }

    int dim() const noexcept { return static_cast<int>(v_.size()) - 1; }
    std::size_t size() const noexcept { return v_.size(); }
    VertexId operator[](std::size_t i) const { return v_[i]; }
    VertexId front() const { return v_.front(); }
    VertexId back() const { return v_.back(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }
    std::span<const VertexId> vertices() const noexcept { return v_; }

    bool contains(VertexId v) const { return std::find(v_.begin(), v_.end(), v) != v_.end(); }

    std::size_t position_of(VertexId v) const {
        auto it = std::find(v_.begin(), v_.end(), v);
        if (it == v_.end()) throw Error("vertex " + std::to_string(index_of(v)) + " not in simplex");
        return static_cast<std::size_t>(it - v_.begin());
    }

    /// Face with the i-th vertex removed; remaining order kept.
    Simplex without(std::size_t i) const {
        std::vector<VertexId> f;
        f.reserve(v_.size() - 1);
        for (std::size_t k = 0; k < v_.size(); ++k)
            if (k != i) f.push_back(v_[k]);
        return Simplex(std::move(f), unchecked);
    }

    Simplex without_vertex(VertexId v) const { return without(position_of(v)); }

    Simplex canonical() const {
        auto s = v_;
        std::sort(s.begin(), s.end());
        return Simplex(std::move(s), unchecked);
    }

    bool is_canonical() const { return std::is_sorted(v_.begin(), v_.end()); }

    /// +1 / -1 parity of this ordering relative to the sorted one.
    int parity() const {
        int inversions = 0;
        for (std::size_t i = 0; i < v_.size(); ++i)
            for (std::size_t j = i + 1; j < v_.size(); ++j)
                if (v_[j] < v_[i]) ++inversions;
        return inversions % 2 == 0 ? 1 : -1;
    }

    /// Reorders by position indices: result[k] = (*this)[perm[k]].
    Simplex permuted(std::span<const std::size_t> perm) const {
        std::vector<VertexId> p;
        p.reserve(perm.size());
        for (auto k : perm) p.push_back(v_.at(k));
        return Simplex(std::move(p), unchecked);
    }

    /// Vertex `v` moved to the front, the rest kept in order, and the parity of that move.
    std::pair<Simplex, int> leading(VertexId v) const {
        const auto k = position_of(v);
        std::vector<VertexId> p;
        p.reserve(v_.size());
        p.push_back(v);
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (i != k) p.push_back(v_[i]);
        return {Simplex(std::move(p), unchecked), k % 2 == 0 ? 1 : -1};
    }

    friend bool operator==(const Simplex&, const Simplex&) = default;
    friend auto operator<=>(const Simplex& a, const Simplex& b) { return a.v_ <=> b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Simplex& s) {
        os << '[';
        for (std::size_t i = 0; i < s.v_.size(); ++i) os << (i ? "," : "") << index_of(s.v_[i]);
        return os << ']';
    }

private:
    struct Unchecked {};
    static constexpr Unchecked unchecked{};
    Simplex(std::vector<VertexId> verts, Unchecked) : v_(std::move(verts)) {}

    void check_distinct() const {
        auto s = v_;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw Error("simplex has repeated vertices");
    }

    std::vector<VertexId> v_;
};

struct SignedFace {
    Simplex face;
    int sign;
    friend bool operator==(const SignedFace&, const SignedFace&) = default;
};

/// Faces [v0..v̂i..vl] with sign (-1)^i, in index order.
inline std::vector<SignedFace> boundary(const Simplex& s) {
    if (s.dim() < 1) throw Error("no boundary");
    std::vector<SignedFace> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back({s.without(i), i % 2 == 0 ? 1 : -1});
    return out;
}

/// +1 same oriented simplex, -1 opposite orientation, 0 different vertex sets.
inline int orientation_sign(const Simplex& a, const Simplex& b) {
    if (a.size() != b.size() || a.canonical() != b.canonical()) return 0;
    return a.parity() * b.parity();
}

/// Calls f(permuted simplex, sign) for all (k+1)! orderings, in lexicographic order of positions.
template <class F>
void for_each_permutation(const Simplex& s, F&& f) {
    std::vector<std::size_t> perm(s.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = i + 1; j < perm.size(); ++j)
                if (perm[j] < perm[i]) ++inversions;
        f(s.permuted(perm), inversions % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

} // namespace covex
