#pragma once

#include "covex/smooth.hpp"

#include <map>
#include <memory>
#include <utility>

namespace covex {

/// One invertible r×r matrix per edge. R(i, j) maps the fiber at j to the fiber at i. Only i < j is
/// stored; the reverse direction is the inverse, computed once, so R(i,j) R(j,i) = Id by construction.
class DiscreteConnection {
public:
    using EdgeKey = std::pair<VertexId, VertexId>;

    explicit DiscreteConnection(int rank) : data_(std::make_shared<Data>(rank)) {}

    /// Edges may be given in either orientation; a reversed key stores the inverse.
    DiscreteConnection(int rank, const std::map<EdgeKey, Mat>& edges) : DiscreteConnection(rank) {
        for (const auto& [key, m] : edges) insert(key.first, key.second, m);
    }

    /// Edges with their inverses supplied, keyed i < j as (R_ij, R_ji). Used where the
    /// inverse must match another connection's bit for bit.
    DiscreteConnection(int rank, const std::map<EdgeKey, std::pair<Mat, Mat>>& edges) : DiscreteConnection(rank) {
        for (const auto& [key, m] : edges) {
            if (!(key.first < key.second)) throw Error("edge keys with inverses must be ordered i < j");
            const double defect = (m.first * m.second - data_->identity).norm();
            if (!(defect <= 1e-8 * (1.0 + m.first.norm() * m.second.norm()))) throw Error("supplied inverse is not an inverse");
            data_->edges[key] = {m.first, m.second};
        }
    }

    /// Stores the given pairs as they are, consistent or not. Only for fault injection: an inconsistent
    /// pair must make the identity checks fail.
    static DiscreteConnection unchecked(int rank, const std::map<EdgeKey, std::pair<Mat, Mat>>& edges) {
        DiscreteConnection dc(rank);
        for (const auto& [key, m] : edges) {
            if (!(key.first < key.second)) throw Error("edge keys with inverses must be ordered i < j");
            dc.data_->edges[key] = {m.first, m.second};
        }
        return dc;
    }

    /// Stored pairs (R_ij, R_ji) with i < j.
    std::map<EdgeKey, std::pair<Mat, Mat>> edge_pairs() const {
        std::map<EdgeKey, std::pair<Mat, Mat>> out;
        for (const auto& [k, e] : data_->edges) out.emplace(k, std::pair{e.forward, e.backward});
        return out;
    }

    int rank() const { return data_->rank; }

    bool has_edge(VertexId i, VertexId j) const { return i == j || data_->edges.contains(ordered(i, j)); }

    /// Transport from the fiber at j to the fiber at i; identity when i == j.
    const Mat& operator()(VertexId i, VertexId j) const {
        if (i == j) return data_->identity;
        auto it = data_->edges.find(ordered(i, j));
        if (it == data_->edges.end())
            throw Error("missing edge " + std::to_string(index_of(i)) + "-" + std::to_string(index_of(j)));
        return i < j ? it->second.forward : it->second.backward;
    }

    /// Stored matrices R(i,j) with i < j.
    std::map<EdgeKey, Mat> edges() const {
        std::map<EdgeKey, Mat> out;
        for (const auto& [k, e] : data_->edges) out.emplace(k, e.forward);
        return out;
    }

private:
    struct Entry {
        Mat forward, backward;
    };
    struct Data {
        explicit Data(int r) : rank(r), identity(Mat::Identity(r, r)) {}
        int rank;
        Mat identity;
        std::map<EdgeKey, Entry> edges;
    };

    static EdgeKey ordered(VertexId i, VertexId j) { return i < j ? EdgeKey{i, j} : EdgeKey{j, i}; }

    void insert(VertexId i, VertexId j, const Mat& m) {
        if (i == j) throw Error("edge endpoints must differ");
        if (m.rows() != rank() || m.cols() != rank()) throw Error("edge matrix has wrong size");
        Eigen::FullPivLU<Mat> lu(m);
        if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error("edge matrix is not invertible");
        Mat inv = lu.inverse();
        auto& slot = data_->edges[ordered(i, j)];
        if (i < j) slot = {m, std::move(inv)};
        else slot = {std::move(inv), m};
    }

    std::shared_ptr<Data> data_;
};

/// Per-vertex basis change; identity unless stated.
class DiscreteFrame {
public:
    explicit DiscreteFrame(int rank) : rank_(rank) {}
    void set(VertexId v, Mat basis) {
        if (Eigen::FullPivLU<Mat>(basis).rcond() < 1e-14) throw Error("frame must be invertible");
        bases_[v] = std::move(basis);
    }
    Mat at(VertexId v) const {
        auto it = bases_.find(v);
        return it == bases_.end() ? Mat(Mat::Identity(rank_, rank_)) : it->second;
    }

private:
    int rank_;
    std::map<VertexId, Mat> bases_;
};

/// Connection expressed in another frame: F_i^{-1} R_ij F_j.
inline DiscreteConnection change_frame(const DiscreteConnection& dc, const DiscreteFrame& frame) {
    std::map<DiscreteConnection::EdgeKey, Mat> e;
    for (const auto& [k, m] : dc.edges()) e.emplace(k, frame.at(k.first).inverse() * m * frame.at(k.second));
    return {dc.rank(), e};
}

/// Transport along every edge of the complex.
inline DiscreteConnection from_smooth(const SimplicialComplex& c, const SmoothConnection& conn, int steps) {
    std::map<DiscreteConnection::EdgeKey, Mat> e;
    for (const auto& s : c.simplices(1))
        e.emplace(DiscreteConnection::EdgeKey{s[0], s[1]},
                  transport_segment(conn, c.position(s[0]), c.position(s[1]), steps));
    return {conn.rank(), e};
}

/// R_{p0 p1} R_{p1 p2} ...: maps the last fiber to the first.
inline Mat transport_chain(const DiscreteConnection& dc, std::span<const VertexId> path) {
    if (path.empty()) throw Error("empty path");
    Mat r = Mat::Identity(dc.rank(), dc.rank());
    for (std::size_t k = 0; k + 1 < path.size(); ++k) r = r * dc(path[k], path[k + 1]);
    return r;
}

inline Mat transport_chain(const DiscreteConnection& dc, std::initializer_list<std::uint32_t> path) {
    std::vector<VertexId> p;
    for (auto i : path) p.push_back(vertex(i));
    return transport_chain(dc, p);
}

/// R_ij - Id.
inline Mat connection_one_form(const DiscreteConnection& dc, VertexId i, VertexId j) {
    if (i == j || !dc.has_edge(i, j)) throw Error("connection one-form needs an edge");
    return dc(i, j) - Mat::Identity(dc.rank(), dc.rank());
}

inline bool is_metric_compatible(const DiscreteConnection& dc, double tol) {
    for (const auto& [k, m] : dc.edges())
        if ((m.transpose() * m - Mat::Identity(dc.rank(), dc.rank())).norm() > tol) return false;
    return true;
}

/// Edge (i,j) of the source complex gets R_{f(i) f(j)}, or Id when f collapses it.
inline DiscreteConnection pullback_connection(const SimplicialMap& f, const DiscreteConnection& dc,
                                              const SimplicialComplex& source) {
    std::map<DiscreteConnection::EdgeKey, std::pair<Mat, Mat>> e;
    for (const auto& s : source.simplices(1)) {
        const VertexId a = f(s[0]), b = f(s[1]);
        if (a != b && !dc.has_edge(a, b)) throw Error("map is not simplicial: image edge missing");
        e.emplace(DiscreteConnection::EdgeKey{s[0], s[1]}, std::pair{dc(a, b), dc(b, a)});
    }
    // pairs are copied from dc, so they are exactly as consistent as dc is
    return DiscreteConnection::unchecked(dc.rank(), e);
}

} // namespace covex
