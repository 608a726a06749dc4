#pragma once

#include "covex/simplex.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace covex {

/// Simplicial complex embedded in R^n, closed under taking faces. Simplices are stored canonically
/// (sorted vertices); oriented access goes through orientation_sign.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    SimplicialComplex(std::vector<Point> positions, const std::vector<Simplex>& top) : positions_(std::move(positions)) {
        if (!positions_.empty()) {
            const auto n = positions_.front().size();
            for (const auto& p : positions_)
                if (p.size() != n) throw Error("positions must share one ambient dimension");
        }
        for (const auto& s : top) insert_closed(s.canonical());
        for (const auto& level : by_dim_)
            for (const auto& s : level)
                if (s.dim() > 0)
                    for (const auto& [f, sign] : boundary(s)) cofaces_[f].push_back(s);
        for (auto& [f, cs] : cofaces_) std::sort(cs.begin(), cs.end());
    }

    int ambient_dim() const { return positions_.empty() ? 0 : static_cast<int>(positions_.front().size()); }
    std::size_t num_vertices() const { return positions_.size(); }
    int max_dim() const { return static_cast<int>(by_dim_.size()) - 1; }

    const Point& position(VertexId v) const {
        if (index_of(v) >= positions_.size()) throw Error("unknown vertex " + std::to_string(index_of(v)));
        return positions_[index_of(v)];
    }
    const std::vector<Point>& positions() const { return positions_; }

    /// Canonical simplices of the given dimension in sorted order.
    std::vector<Simplex> simplices(int dim) const {
        if (dim < 0 || dim > max_dim()) return {};
        return {by_dim_[dim].begin(), by_dim_[dim].end()};
    }

    bool contains(const Simplex& s) const {
        return s.dim() >= 0 && s.dim() <= max_dim() && by_dim_[s.dim()].contains(s.canonical());
    }

    const std::vector<Simplex>& cofaces(const Simplex& s) const {
        static const std::vector<Simplex> none;
        auto it = cofaces_.find(s.canonical());
        return it == cofaces_.end() ? none : it->second;
    }

    std::vector<Point> positions_of(const Simplex& s) const {
        std::vector<Point> out;
        out.reserve(s.size());
        for (auto v : s) out.push_back(position(v));
        return out;
    }

private:
    void insert_closed(const Simplex& s) {
        for (auto v : s) position(v);
        if (static_cast<int>(by_dim_.size()) <= s.dim()) by_dim_.resize(s.dim() + 1);
        if (!by_dim_[s.dim()].insert(s).second) return;
        if (s.dim() > 0)
            for (std::size_t i = 0; i < s.size(); ++i) insert_closed(s.without(i));
    }

    std::vector<Point> positions_;
    std::vector<std::set<Simplex>> by_dim_;
    std::map<Simplex, std::vector<Simplex>> cofaces_;
};

inline Point barycenter(const SimplicialComplex& c, const Simplex& s) {
    Point b = Point::Zero(c.ambient_dim());
    for (auto v : s) b += c.position(v);
    return b / static_cast<double>(s.size());
}

/// Largest vertex-to-vertex distance.
inline double diameter(const SimplicialComplex& c, const Simplex& s) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, (c.position(s[i]) - c.position(s[j])).norm());
    return d;
}

/// Vertices of `s` move to fixed + factor * (p - fixed); everything else is unchanged.
inline SimplicialComplex scale_toward(const SimplicialComplex& c, const Simplex& s, VertexId fixed, double factor) {
    if (!(factor > 0.0)) throw Error("scale factor must be positive");
    if (factor > 1.0) throw Error("scale factor must not exceed 1");
    if (!s.contains(fixed)) throw Error("fixed vertex must belong to the simplex");
    // anchor + (p - anchor) need not round back to p
    if (factor == 1.0) return c;
    auto pos = c.positions();
    const Point anchor = c.position(fixed);
    for (auto v : s)
        if (v != fixed) pos[index_of(v)] = anchor + factor * (pos[index_of(v)] - anchor);
    std::vector<Simplex> top;
    for (int d = 0; d <= c.max_dim(); ++d)
        for (const auto& t : c.simplices(d))
            if (c.cofaces(t).empty()) top.push_back(t);
    return SimplicialComplex(std::move(pos), top);
}

/// Vertex map between complexes; images of simplices may be degenerate.
class SimplicialMap {
public:
    SimplicialMap() = default;
    explicit SimplicialMap(std::map<VertexId, VertexId> m) : map_(std::move(m)) {}
    SimplicialMap(std::initializer_list<std::pair<const std::uint32_t, std::uint32_t>> m) {
        for (auto [a, b] : m) map_.emplace(vertex(a), vertex(b));
    }

    VertexId operator()(VertexId v) const {
        auto it = map_.find(v);
        if (it == map_.end()) throw Error("unmapped vertex " + std::to_string(index_of(v)));
        return it->second;
    }
    const std::map<VertexId, VertexId>& table() const { return map_; }

private:
    std::map<VertexId, VertexId> map_;
};

/// Image with the ordering preserved, or nullopt when two vertices collide.
inline std::optional<Simplex> apply_map(const SimplicialMap& f, const Simplex& s) {
    std::vector<VertexId> img;
    img.reserve(s.size());
    for (auto v : s) img.push_back(f(v));
    auto sorted = img;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
    return Simplex(std::move(img));
}

} // namespace covex
