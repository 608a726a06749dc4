#pragma once

#include "covex/forms.hpp"

#include <algorithm>

namespace covex {

namespace detail {

/// Incremental mean m_k = m_{k-1} + (t_k - m_{k-1}) / k. Averaging equal terms reproduces them exactly,
/// which keeps flat-connection results bit-identical to the scalar coboundary.
template <class Value>
class RunningMean {
public:
    void add(const Value& t) {
        ++n_;
        if (n_ == 1) mean_ = t;
        else mean_ += (t - mean_) / static_cast<double>(n_);
    }
    const Value& value() const { return mean_; }

private:
    Value mean_;
    int n_ = 0;
};

/// Signed face terms summed in order of the omitted vertex id, so every ordering of a simplex adds the
/// same numbers in the same order.
template <class Value>
Value sum_by_omitted_vertex(std::vector<std::pair<VertexId, Value>> terms) {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Value acc = terms.front().second;
    for (std::size_t k = 1; k < terms.size(); ++k) acc += terms[k].second;
    return acc;
}

inline void require_leading(const Simplex& s, VertexId v) {
    if (s.front() != v) throw Error("sided derivative is evaluated at the leading vertex of the simplex");
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// Curvature

/// Positive boundary path minus negative boundary path from the cut fiber to the eval fiber. The
/// triangle's canonical orientation is rotated so eval leads, [e,x,y]:
///   cut y: R_ex R_xy - R_ey,  cut x: R_ex - R_ey R_yx,  cut e: R_ex R_xy R_ye - Id,
/// then multiplied by the orientation sign of `tri`.
inline Mat curvature(const DiscreteConnection& dc, const Simplex& tri, VertexId eval, VertexId cut) {
    if (tri.dim() != 2) throw Error("curvature is defined on triangles");
    if (!tri.contains(eval) || !tri.contains(cut)) throw Error("eval and cut must be vertices of the triangle");
    const Simplex canon = tri.canonical();
    const std::size_t k = canon.position_of(eval);
    const VertexId e = canon[k], x = canon[(k + 1) % 3], y = canon[(k + 2) % 3];
    Mat r;
    if (cut == y) r = dc(e, x) * dc(x, y) - dc(e, y);
    else if (cut == x) r = dc(e, x) - dc(e, y) * dc(y, x);
    else r = dc(e, x) * dc(x, y) * dc(y, e) - Mat::Identity(dc.rank(), dc.rank());
    return tri.parity() * r;
}

/// Difference of transports along two vertex paths with shared endpoints (eval first, cut last).
inline Mat curvature_cell(const DiscreteConnection& dc, std::span<const VertexId> path_a,
                          std::span<const VertexId> path_b) {
    if (path_a.empty() || path_b.empty() || path_a.front() != path_b.front() || path_a.back() != path_b.back())
        throw Error("paths must share their first and last vertices");
    return transport_chain(dc, path_a) - transport_chain(dc, path_b);
}

inline HomCochain curvature_cochain(const DiscreteConnection& dc) {
    return {2, dc.rank(), [dc](const Simplex& s, VertexId v, VertexId w) { return curvature(dc, s, v, w); }};
}

/// R_ij - Id on ordered edges, as a 2-prong form evaluated at (first, last) only.
inline HomCochain connection_cochain(const DiscreteConnection& dc) {
    return {1, dc.rank(), [dc](const Simplex& s, VertexId v, VertexId w) -> Mat {
                if (v != s.front() || w != s.back()) throw Error("connection one-form is read from tail to head");
                return connection_one_form(dc, v, w);
            }};
}

// ---------------------------------------------------------------------------------------------
// Vector-valued forms

/// R_01 α([v1..],v1) + Σ_{i≥1} (-1)^i α([v0..v̂i..],v0), at the leading vertex v0.
inline Vec sided_derivative(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& s, VertexId v0) {
    if (s.dim() != form.degree() + 1) throw Error("sided derivative needs a simplex one dimension above the form");
    detail::require_leading(s, v0);
    std::vector<std::pair<VertexId, Vec>> terms;
    terms.reserve(s.size());
    terms.emplace_back(s[0], dc(s[0], s[1]) * form(s.without(0), s[1]));
    for (std::size_t i = 1; i < s.size(); ++i) {
        Vec t = form(s.without(i), s[0]);
        if (i % 2 == 1) t = -t;
        terms.emplace_back(s[i], std::move(t));
    }
    return detail::sum_by_omitted_vertex(std::move(terms));
}

inline VectorCochain sided_derivative(const DiscreteConnection& dc, const VectorCochain& form) {
    return {form.degree() + 1, form.rank(),
            [dc, form](const Simplex& s, VertexId v) { return sided_derivative(dc, form, s, v); }};
}

/// Transport-aware signed average over all orderings: mean of sgn(π) R_{v,π0} α(πσ, π0).
inline Vec alternation(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& s, VertexId v) {
    if (!s.contains(v)) throw Error("evaluation vertex must belong to the simplex");
    detail::RunningMean<Vec> mean;
    for_each_permutation(s, [&](const Simplex& ps, int sign) {
        Vec t = ps.front() == v ? form(ps, v) : Vec(dc(v, ps.front()) * form(ps, ps.front()));
        mean.add(sign > 0 ? t : Vec(-t));
    });
    return mean.value();
}

inline VectorCochain alternation(const DiscreteConnection& dc, const VectorCochain& form) {
    return {form.degree(), form.rank(),
            [dc, form](const Simplex& s, VertexId v) { return alternation(dc, form, s, v); }};
}

enum class Parity { even, odd };

/// Average restricted to even (or odd) orderings, each term carrying sgn(π).
inline Vec reduced_alternation(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& s, VertexId v,
                               Parity parity) {
    if (!s.contains(v)) throw Error("evaluation vertex must belong to the simplex");
    detail::RunningMean<Vec> mean;
    const int wanted = parity == Parity::even ? 1 : -1;
    for_each_permutation(s, [&](const Simplex& ps, int sign) {
        if (sign != wanted) return;
        Vec t = ps.front() == v ? form(ps, v) : Vec(dc(v, ps.front()) * form(ps, ps.front()));
        mean.add(sign > 0 ? t : Vec(-t));
    });
    return mean.value();
}

inline VectorCochain reduced_alternation(const DiscreteConnection& dc, const VectorCochain& form, Parity parity) {
    return {form.degree(), form.rank(), [dc, form, parity](const Simplex& s, VertexId v) {
                return reduced_alternation(dc, form, s, v, parity);
            }};
}

/// Alternation of the sided derivative, recomputed per ordering.
inline VectorCochain covariant_derivative(const DiscreteConnection& dc, const VectorCochain& form) {
    return alternation(dc, sided_derivative(dc, form));
}

inline Vec covariant_derivative(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& s, VertexId v) {
    if (s.dim() != form.degree() + 1) throw Error("derivative needs a simplex one dimension above the form");
    return alternation(dc, sided_derivative(dc, form), s, v);
}

/// The covariant derivative applied twice; plays the role of the curvature wedge product.
inline Vec curvature_wedge(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& s, VertexId v) {
    return covariant_derivative(dc, covariant_derivative(dc, form), s, v);
}

/// Six-term sum over orderings of the outgoing edges at a: sgn · Ω([a,x,y],a,a) · α([a,z],a), averaged.
inline Vec curvature_wedge_explicit(const DiscreteConnection& dc, const VectorCochain& form, const Simplex& tet) {
    if (tet.dim() != 3 || form.degree() != 1) throw Error("explicit wedge takes a 1-form on a tetrahedron");
    const VertexId a = tet[0];
    const Simplex rest{index_of(tet[1]), index_of(tet[2]), index_of(tet[3])};
    detail::RunningMean<Vec> mean;
    for_each_permutation(rest, [&](const Simplex& p, int sign) {
        const Simplex tri{index_of(a), index_of(p[0]), index_of(p[1])};
        const Simplex edge{index_of(a), index_of(p[2])};
        Vec t = curvature(dc, tri, a, a) * form(edge, a);
        mean.add(sign > 0 ? t : Vec(-t));
    });
    return mean.value();
}

/// Both sides of the sided second-derivative identity on an (l+2)-simplex:
/// sided(sided α)(σ,v0) and Ω([v0,v1,v2],v0,v2) α([v2..],v2).
inline std::pair<Vec, Vec> sided_second_derivative_identity(const DiscreteConnection& dc, const VectorCochain& form,
                                                            const Simplex& s) {
    if (s.dim() != form.degree() + 2) throw Error("identity needs a simplex two dimensions above the form");
    const Vec left = sided_derivative(dc, sided_derivative(dc, form), s, s[0]);
    const Simplex tail = s.without(0).without(0);
    const Vec right = curvature(dc, Simplex{index_of(s[0]), index_of(s[1]), index_of(s[2])}, s[0], s[2]) *
                      form(tail, s[2]);
    return {left, right};
}

// ---------------------------------------------------------------------------------------------
// Endomorphism-valued forms

/// R_01 β(σ_{v0},v1,v_last) + Σ_{1≤i≤l} (-1)^i β(σ_{vi},v0,v_last) + (-1)^{l+1} β(σ_{v_last},v0,v_l) R_{l,last},
/// with the result's prongs then moved to (v, w) by edge transports.
inline Mat sided_derivative(const DiscreteConnection& dc, const HomCochain& form, const Simplex& s, VertexId v,
                            VertexId w) {
    if (s.dim() != form.degree() + 1) throw Error("sided derivative needs a simplex one dimension above the form");
    const std::size_t last = s.size() - 1;
    const VertexId first = s.front(), tail = s.back();
    std::vector<std::pair<VertexId, Mat>> terms;
    terms.reserve(s.size());
    terms.emplace_back(s[0], dc(s[0], s[1]) * form(s.without(0), s[1], tail));
    for (std::size_t i = 1; i < last; ++i) {
        Mat t = form(s.without(i), first, tail);
        if (i % 2 == 1) t = -t;
        terms.emplace_back(s[i], std::move(t));
    }
    Mat t = form(s.without(last), first, s[last - 1]) * dc(s[last - 1], tail);
    if (last % 2 == 1) t = -t;
    terms.emplace_back(s[last], std::move(t));
    Mat core = detail::sum_by_omitted_vertex(std::move(terms));
    if (v != first) core = dc(v, first) * core;
    if (w != tail) core = core * dc(tail, w);
    return core;
}

inline HomCochain sided_derivative(const DiscreteConnection& dc, const HomCochain& form) {
    return {form.degree() + 1, form.rank(),
            [dc, form](const Simplex& s, VertexId v, VertexId w) { return sided_derivative(dc, form, s, v, w); }};
}

/// Signed average over orderings; even orderings move the cut prong by one edge, odd ones through the
/// second-to-last vertex of the ordering.
inline Mat alternation(const DiscreteConnection& dc, const HomCochain& form, const Simplex& s, VertexId v, VertexId w) {
    if (!s.contains(v) || !s.contains(w)) throw Error("prongs must belong to the simplex");
    detail::RunningMean<Mat> mean;
    const std::size_t last = s.size() - 1;
    for_each_permutation(s, [&](const Simplex& ps, int sign) {
        Mat t = form(ps, ps.front(), ps[last]);
        if (ps.front() != v) t = dc(v, ps.front()) * t;
        if (sign > 0) {
            if (ps[last] != w) t = t * dc(ps[last], w);
            mean.add(t);
        } else {
            t = t * dc(ps[last], ps[last - 1]);
            if (ps[last - 1] != w) t = t * dc(ps[last - 1], w);
            mean.add(-t);
        }
    });
    return mean.value();
}

inline HomCochain alternation(const DiscreteConnection& dc, const HomCochain& form) {
    return {form.degree(), form.rank(),
            [dc, form](const Simplex& s, VertexId v, VertexId w) { return alternation(dc, form, s, v, w); }};
}

inline HomCochain covariant_derivative(const DiscreteConnection& dc, const HomCochain& form) {
    return alternation(dc, sided_derivative(dc, form));
}

inline Mat covariant_derivative(const DiscreteConnection& dc, const HomCochain& form, const Simplex& s, VertexId v,
                                VertexId w) {
    if (s.dim() != form.degree() + 1) throw Error("derivative needs a simplex one dimension above the form");
    return alternation(dc, sided_derivative(dc, form), s, v, w);
}

/// Sided derivative of the connection one-form read as vector columns, then the endomorphism
/// alternation. Agrees with curvature(dc, tri, a, c) exactly.
inline Mat connection_derivative(const DiscreteConnection& dc, const Simplex& tri) {
    if (tri.dim() != 2) throw Error("connection derivative is defined on triangles");
    const HomCochain columns(2, dc.rank(), [dc](const Simplex& s, VertexId v, VertexId w) -> Mat {
        if (v != s.front() || w != s.back()) throw Error("read from the leading to the last vertex only");
        const VertexId a = s[0], m = s[1], c = s[2];
        return connection_one_form(dc, a, m) + dc(a, m) * connection_one_form(dc, m, c) - connection_one_form(dc, a, c);
    });
    return alternation(dc, columns, tri, tri.front(), tri.back());
}

} // namespace covex
