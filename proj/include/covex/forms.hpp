#pragma once

#include "covex/bundle.hpp"

#include <map>
#include <sstream>

namespace covex {

/// Lazily evaluated discrete vector-valued form: (oriented simplex, corner v) -> vector in the fiber at v.
class VectorCochain {
public:
    using Evaluator = std::function<Vec(const Simplex&, VertexId)>;

    VectorCochain(int degree, int rank, Evaluator eval) : degree_(degree), rank_(rank), eval_(std::move(eval)) {}

    int degree() const { return degree_; }
    int rank() const { return rank_; }

    Vec operator()(const Simplex& s, VertexId v) const {
        if (s.dim() != degree_) throw Error("cochain evaluated on a simplex of the wrong dimension");
        if (!s.contains(v)) throw Error("evaluation vertex must belong to the simplex");
        return eval_(s, v);
    }

private:
    int degree_, rank_;
    Evaluator eval_;
};

/// Lazily evaluated discrete endomorphism-valued form: (oriented simplex, eval v, cut w) -> map E_w -> E_v.
class HomCochain {
public:
    using Evaluator = std::function<Mat(const Simplex&, VertexId, VertexId)>;

    HomCochain(int degree, int rank, Evaluator eval) : degree_(degree), rank_(rank), eval_(std::move(eval)) {}

    int degree() const { return degree_; }
    int rank() const { return rank_; }

    Mat operator()(const Simplex& s, VertexId v, VertexId w) const {
        if (s.dim() != degree_) throw Error("cochain evaluated on a simplex of the wrong dimension");
        if (!s.contains(v) || !s.contains(w)) throw Error("prong vertices must belong to the simplex");
        return eval_(s, v, w);
    }

private:
    int degree_, rank_;
    Evaluator eval_;
};

/// How a stored form answers for corners other than its anchor.
enum class CornerRecovery {
    edge_transport, ///< one value per simplex, moved by the discrete connection
    per_corner,     ///< every corner value stored explicitly
};

/// Stored discrete vector-valued form: one value per canonical simplex at its anchor vertex, plus
/// optional explicit corner values.
class DiscreteVectorForm {
public:
    struct Entry {
        VertexId anchor;
        Vec value;
        std::map<VertexId, Vec> corners;
    };

    DiscreteVectorForm(int degree, int rank) : degree_(degree), rank_(rank) {}

    int degree() const { return degree_; }
    int rank() const { return rank_; }

    /// Value in the fiber at `anchor` on the oriented simplex s.
    void set(const Simplex& s, VertexId anchor, const Vec& value) {
        check(s, anchor, value);
        auto& e = values_[s.canonical()];
        e.anchor = anchor;
        e.value = s.parity() * value;
    }

    /// Explicit corner value; the simplex must already have an anchor value.
    void set_corner(const Simplex& s, VertexId corner, const Vec& value) {
        check(s, corner, value);
        auto it = values_.find(s.canonical());
        if (it == values_.end()) throw Error("set the anchor value before corner values");
        it->second.corners[corner] = s.parity() * value;
    }

    const Entry& entry(const Simplex& s) const {
        auto it = values_.find(s.canonical());
        if (it == values_.end()) {
            std::ostringstream os;
            os << "form has no value on simplex " << s;
            throw Error(os.str());
        }
        return it->second;
    }
    bool contains(const Simplex& s) const { return values_.contains(s.canonical()); }
    const std::map<Simplex, Entry>& values() const { return values_; }

private:
    void check(const Simplex& s, VertexId v, const Vec& value) const {
        if (s.dim() != degree_) throw Error("simplex dimension does not match form degree");
        if (!s.contains(v)) throw Error("corner must belong to the simplex");
        if (value.size() != rank_) throw Error("value has wrong rank");
    }

    int degree_, rank_;
    std::map<Simplex, Entry> values_;
};

/// Stored discrete endomorphism-valued form: one matrix per canonical simplex with its eval and cut
/// prongs, plus optional explicit prong pairs.
class DiscreteHomForm {
public:
    struct Entry {
        VertexId eval, cut;
        Mat value;
        std::map<std::pair<VertexId, VertexId>, Mat> prongs;
    };

    DiscreteHomForm(int degree, int rank) : degree_(degree), rank_(rank) {}

    int degree() const { return degree_; }
    int rank() const { return rank_; }

    void set(const Simplex& s, VertexId eval, VertexId cut, const Mat& value) {
        check(s, eval, cut, value);
        auto& e = values_[s.canonical()];
        e.eval = eval;
        e.cut = cut;
        e.value = s.parity() * value;
    }

    void set_prongs(const Simplex& s, VertexId eval, VertexId cut, const Mat& value) {
        check(s, eval, cut, value);
        auto it = values_.find(s.canonical());
        if (it == values_.end()) throw Error("set the stored prongs before extra prong pairs");
        it->second.prongs[{eval, cut}] = s.parity() * value;
    }

    const Entry& entry(const Simplex& s) const {
        auto it = values_.find(s.canonical());
        if (it == values_.end()) {
            std::ostringstream os;
            os << "form has no value on simplex " << s;
            throw Error(os.str());
        }
        return it->second;
    }
    bool contains(const Simplex& s) const { return values_.contains(s.canonical()); }
    const std::map<Simplex, Entry>& values() const { return values_; }

private:
    void check(const Simplex& s, VertexId v, VertexId w, const Mat& value) const {
        if (s.dim() != degree_) throw Error("simplex dimension does not match form degree");
        if (!s.contains(v) || !s.contains(w)) throw Error("prongs must belong to the simplex");
        if (value.rows() != rank_ || value.cols() != rank_) throw Error("value has wrong rank");
    }

    int degree_, rank_;
    std::map<Simplex, Entry> values_;
};

/// sign(σ) · R_{v,anchor} · stored, or the stored corner value when present.
inline Vec eval_vector(const DiscreteVectorForm& form, const DiscreteConnection& dc, const Simplex& s, VertexId v) {
    if (!s.contains(v)) throw Error("evaluation vertex must belong to the simplex");
    const auto& e = form.entry(s);
    const double sign = s.parity();
    if (auto it = e.corners.find(v); it != e.corners.end()) return sign * it->second;
    if (v == e.anchor) return sign * e.value;
    return sign * (dc(v, e.anchor) * e.value);
}

/// sign(σ) · R_{v,eval} · stored · R_{cut,w}, or the stored prong pair when present.
inline Mat eval_hom(const DiscreteHomForm& form, const DiscreteConnection& dc, const Simplex& s, VertexId v,
                    VertexId w) {
    if (!s.contains(v) || !s.contains(w)) throw Error("prongs must belong to the simplex");
    const auto& e = form.entry(s);
    const double sign = s.parity();
    if (auto it = e.prongs.find({v, w}); it != e.prongs.end()) return sign * it->second;
    return sign * (dc(v, e.eval) * e.value * dc(e.cut, w));
}

inline VectorCochain view(const DiscreteVectorForm& form, const DiscreteConnection& dc) {
    auto shared = std::make_shared<const DiscreteVectorForm>(form);
    return {form.degree(), form.rank(),
            [shared, dc](const Simplex& s, VertexId v) { return eval_vector(*shared, dc, s, v); }};
}

inline HomCochain view(const DiscreteHomForm& form, const DiscreteConnection& dc) {
    auto shared = std::make_shared<const DiscreteHomForm>(form);
    return {form.degree(), form.rank(),
            [shared, dc](const Simplex& s, VertexId v, VertexId w) { return eval_hom(*shared, dc, s, v, w); }};
}

/// Which frame the de Rham integrals use.
enum class DiscretizationMode {
    vertex,     ///< frame propagated from each corner
    barycenter, ///< frame propagated from the barycenter, then moved to the corner along a segment
    coordinate, ///< no propagation at all (gauge = Id); only meaningful as a negative control
};

namespace detail {

inline Vec integrate_at_corner(const SmoothConnection& conn, const SmoothVectorForm& alpha, const SimplicialComplex& c,
                               const Simplex& s, VertexId corner, DiscretizationMode mode, const QuadratureRule& quad,
                               int steps) {
    switch (mode) {
    case DiscretizationMode::vertex: return derham_vector(conn, alpha, c, s, corner, quad, steps);
    case DiscretizationMode::barycenter:
        return transport_segment(conn, c.position(corner), barycenter(c, s), steps) *
               derham_vector(conn, alpha, c, s, Barycenter{}, quad, steps);
    case DiscretizationMode::coordinate: return derham_vector(conn, alpha, c, s, CoordinateFrame{}, quad, steps);
    }
    throw Error("unknown discretization mode");
}

inline Mat integrate_prongs(const SmoothConnection& conn, const SmoothHomForm& beta, const SimplicialComplex& c,
                            const Simplex& s, VertexId v, VertexId w, DiscretizationMode mode,
                            const QuadratureRule& quad, int steps) {
    switch (mode) {
    case DiscretizationMode::vertex: return derham_hom(conn, beta, c, s, v, w, quad, steps);
    case DiscretizationMode::barycenter: {
        const Point b = barycenter(c, s);
        return transport_segment(conn, c.position(v), b, steps) *
               derham_hom(conn, beta, c, s, Barycenter{}, Barycenter{}, quad, steps) *
               transport_segment(conn, b, c.position(w), steps);
    }
    case DiscretizationMode::coordinate:
        return derham_hom(conn, beta, c, s, CoordinateFrame{}, CoordinateFrame{}, quad, steps);
    }
    throw Error("unknown discretization mode");
}

} // namespace detail

/// de Rham map on every simplex of dimension degree(alpha); anchor = lowest-index vertex.
inline DiscreteVectorForm discretize_vector(const SmoothConnection& conn, const SmoothVectorForm& alpha,
                                            const SimplicialComplex& c, DiscretizationMode mode,
                                            CornerRecovery corners = CornerRecovery::edge_transport,
                                            int steps = 64) {
    const int l = alpha.degree();
    const QuadratureRule quad = default_rule(l);
    DiscreteVectorForm form(l, alpha.rank());
    for (const auto& s : c.simplices(l)) {
        form.set(s, s.front(), detail::integrate_at_corner(conn, alpha, c, s, s.front(), mode, quad, steps));
        if (corners == CornerRecovery::per_corner && mode != DiscretizationMode::coordinate)
            for (auto v : s)
                if (v != s.front())
                    form.set_corner(s, v, detail::integrate_at_corner(conn, alpha, c, s, v, mode, quad, steps));
    }
    return form;
}

/// de Rham map for endomorphism-valued forms; stored prongs are (lowest, highest) vertex.
inline DiscreteHomForm discretize_hom(const SmoothConnection& conn, const SmoothHomForm& beta,
                                      const SimplicialComplex& c, DiscretizationMode mode = DiscretizationMode::vertex,
                                      CornerRecovery corners = CornerRecovery::edge_transport, int steps = 64) {
    const int l = beta.degree();
    const QuadratureRule quad = default_rule(l);
    DiscreteHomForm form(l, beta.rank());
    for (const auto& s : c.simplices(l)) {
        form.set(s, s.front(), s.back(), detail::integrate_prongs(conn, beta, c, s, s.front(), s.back(), mode, quad, steps));
        if (corners == CornerRecovery::per_corner && mode != DiscretizationMode::coordinate)
            for (auto v : s)
                for (auto w : s)
                    if (v != s.front() || w != s.back())
                        form.set_prongs(s, v, w, detail::integrate_prongs(conn, beta, c, s, v, w, mode, quad, steps));
    }
    return form;
}

/// Pulled-back form on the source complex: alpha(f σ, f v), or zero where f collapses σ.
inline DiscreteVectorForm pullback_vector(const SimplicialMap& f, const DiscreteVectorForm& form,
                                          const DiscreteConnection& dc_target, const SimplicialComplex& source) {
    DiscreteVectorForm out(form.degree(), form.rank());
    for (const auto& s : source.simplices(form.degree())) {
        const auto img = apply_map(f, s);
        if (!img) {
            out.set(s, s.front(), Vec::Zero(form.rank()));
            continue;
        }
        out.set(s, s.front(), eval_vector(form, dc_target, *img, f(s.front())));
        for (auto v : s)
            if (v != s.front()) out.set_corner(s, v, eval_vector(form, dc_target, *img, f(v)));
    }
    return out;
}

/// Barycentric coordinates of p in the affine hull of the given vertices, with their differentials
/// (row j is dλ_j as a covector in R^n).
struct Barycentric {
    Vec lambda;
    Mat gradients;
};

inline Barycentric barycentric(std::span<const Point> verts, const Point& p) {
    const auto k = static_cast<Eigen::Index>(verts.size()) - 1;
    const auto n = verts[0].size();
    Mat e(n, k);
    for (Eigen::Index j = 0; j < k; ++j) e.col(j) = verts[j + 1] - verts[0];
    const Mat pinv = e.completeOrthogonalDecomposition().pseudoInverse();
    const Vec mu = pinv * (p - verts[0]);
    Barycentric b{Vec(k + 1), Mat(k + 1, n)};
    b.lambda[0] = 1.0 - mu.sum();
    b.lambda.tail(k) = mu;
    b.gradients.row(0) = -pinv.colwise().sum();
    b.gradients.bottomRows(k) = pinv;
    return b;
}

/// Scalar Whitney l-form of a face of a host simplex, evaluated through barycentric coordinates of the host.
class WhitneyBasis {
public:
    WhitneyBasis(std::vector<Point> host, std::vector<std::size_t> face) : host_(std::move(host)), face_(std::move(face)) {}

    /// l! Σ_i (-1)^i λ_{f_i} dλ_{f_0} ∧ .. (omit i) .. ∧ dλ_{f_l} applied to the vectors.
    double operator()(const Point& p, std::span<const Vec> vectors) const {
        const auto b = barycentric(host_, p);
        const int l = static_cast<int>(face_.size()) - 1;
        if (static_cast<int>(vectors.size()) != l) throw Error("Whitney form evaluated on wrong number of vectors");
        double factorial = 1.0;
        for (int k = 2; k <= l; ++k) factorial *= k;
        double acc = 0.0;
        Mat m(l, l);
        for (int i = 0; i <= l; ++i) {
            int row = 0;
            for (int j = 0; j <= l; ++j) {
                if (j == i) continue;
                for (int col = 0; col < l; ++col) m(row, col) = b.gradients.row(face_[j]).dot(vectors[col]);
                ++row;
            }
            const double det = l == 0 ? 1.0 : m.determinant();
            acc += (i % 2 == 0 ? 1.0 : -1.0) * b.lambda[face_[i]] * det;
        }
        return factorial * acc;
    }

private:
    std::vector<Point> host_;
    std::vector<std::size_t> face_;
};

/// Reconstructed smooth value at p of a form stored in barycenter-propagated frames, using the
/// lowest-dimensional face of `host` that contains p (of dimension at least the degree).
inline Vec whitney_eval(const SmoothConnection& conn, const SimplicialComplex& c, const DiscreteVectorForm& form,
                        const Simplex& host, const Point& p, std::span<const Vec> vectors, int steps = 64) {
    const int l = form.degree();
    if (host.dim() < l) throw Error("host simplex is smaller than the form degree");
    const auto hv = c.positions_of(host);
    const auto b = barycentric(hv, p);
    constexpr double tol = 1e-12;
    if (b.lambda.minCoeff() < -tol || (detail::node_point(hv, b.lambda) - p).norm() > 1e-9 * (1.0 + p.norm()))
        throw Error("point lies outside the host simplex");

    // Carrier: vertices with positive weight, padded with the lowest remaining ones up to dimension l.
    std::vector<VertexId> support;
    for (std::size_t k = 0; k < host.size(); ++k)
        if (b.lambda[static_cast<Eigen::Index>(k)] > tol) support.push_back(host[k]);
    auto sorted_host = host.canonical();
    for (auto v : sorted_host)
        if (static_cast<int>(support.size()) <= l && std::find(support.begin(), support.end(), v) == support.end())
            support.push_back(v);
    const Simplex carrier = Simplex(support).canonical();
    const auto cv = c.positions_of(carrier);
    const Point center = barycenter(c, carrier);

    Vec acc = Vec::Zero(form.rank());
    std::vector<std::size_t> idx(static_cast<std::size_t>(l) + 1);
    // all l-faces of the carrier, as increasing index tuples
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t start, std::size_t depth) {
        if (depth == idx.size()) {
            std::vector<VertexId> fv;
            for (auto k : idx) fv.push_back(carrier[k]);
            const Simplex face(fv);
            const auto& e = form.entry(face);
            const Point fc = barycenter(c, face);
            const Vec at_center = transport_segment(conn, fc, c.position(e.anchor), steps) * e.value;
            const double phi = WhitneyBasis(cv, idx)(p, vectors);
            acc += phi * (transport_segment(conn, center, fc, steps) * at_center);
            return;
        }
        for (std::size_t k = start; k < carrier.size(); ++k) {
            idx[depth] = k;
            visit(k + 1, depth + 1);
        }
    };
    visit(0, 0);
    return transport_segment(conn, p, center, steps) * acc;
}

} // namespace covex
