#pragma once

#include "covex/complex.hpp"
#include "covex/quadrature.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

namespace covex {

/// Scaling-and-squaring Pade exponential (Eigen's degree-13 path for double).
inline Mat expm(const Mat& a) { return a.exp(); }

template <class Value>
Value zero_value(int rank) {
    if constexpr (std::is_same_v<Value, Vec>) return Vec::Zero(rank);
    else return Mat::Zero(rank, rank);
}

/// Central-difference step for a point p.
inline double fd_step(const Point& p) { return 1e-5 * (1.0 + p.norm()); }

/// Smooth bundle-valued form on R^n: a field that is multilinear and alternating in its
/// `degree` tangent arguments. Value is Vec (vector-valued) or Mat (endomorphism-valued).
template <class Value>
class SmoothForm {
public:
    using Evaluator = std::function<Value(const Point&, std::span<const Vec>)>;

    SmoothForm(int dim, int degree, int rank, Evaluator eval)
        : dim_(dim), degree_(degree), rank_(rank), eval_(std::move(eval)) {}

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int rank() const { return rank_; }

    Value operator()(const Point& p, std::span<const Vec> args) const {
        if (static_cast<int>(args.size()) != degree_) throw Error("form evaluated on wrong number of vectors");
        return eval_(p, args);
    }
    Value operator()(const Point& p, std::initializer_list<Vec> args) const {
        return (*this)(p, std::span<const Vec>(args.begin(), args.size()));
    }

    /// Copy carrying an analytic exterior derivative.
    SmoothForm with_derivative(SmoothForm d) const {
        if (d.degree() != degree_ + 1 || d.rank() != rank_) throw Error("derivative has mismatched degree or rank");
        SmoothForm out = *this;
        out.derivative_ = std::make_shared<const SmoothForm>(std::move(d));
        return out;
    }
    const SmoothForm* analytic_derivative() const { return derivative_.get(); }

private:
    int dim_, degree_, rank_;
    Evaluator eval_;
    std::shared_ptr<const SmoothForm> derivative_;
};

using SmoothVectorForm = SmoothForm<Vec>;
using SmoothHomForm = SmoothForm<Mat>;

template <class Value>
SmoothForm<Value> operator+(const SmoothForm<Value>& a, const SmoothForm<Value>& b) {
    if (a.degree() != b.degree() || a.rank() != b.rank()) throw Error("adding forms of different type");
    return {a.dim(), a.degree(), a.rank(), [a, b](const Point& p, std::span<const Vec> x) -> Value { return a(p, x) + b(p, x); }};
}

template <class Value>
SmoothForm<Value> operator*(double s, const SmoothForm<Value>& a) {
    return {a.dim(), a.degree(), a.rank(), [a, s](const Point& p, std::span<const Vec> x) -> Value { return s * a(p, x); }};
}

template <class Value>
SmoothForm<Value> operator-(const SmoothForm<Value>& a, const SmoothForm<Value>& b) {
    return a + (-1.0) * b;
}

/// Sum over (p,q)-shuffles of the arguments: f(first p arguments, remaining q) with shuffle sign.
template <class Value, class F>
Value shuffle_sum(std::span<const Vec> args, int p, int rank, F&& f) {
    const int k = static_cast<int>(args.size());
    Value acc = zero_value<Value>(rank);
    std::vector<Vec> head, tail;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        if (std::popcount(mask) != p) continue;
        head.clear();
        tail.clear();
        int displacement = 0;
        for (int i = 0; i < k; ++i) {
            if (mask & (1u << i)) {
                displacement += i - static_cast<int>(head.size());
                head.push_back(args[i]);
            } else {
                tail.push_back(args[i]);
            }
        }
        const Value term = f(std::span<const Vec>(head), std::span<const Vec>(tail));
        acc += (displacement % 2 == 0) ? term : Value(-term);
    }
    return acc;
}

/// a ∧ b with matrix-valued a acting on b by left multiplication.
template <class ValueB>
SmoothForm<ValueB> wedge(const SmoothHomForm& a, const SmoothForm<ValueB>& b) {
    const int p = a.degree(), q = b.degree(), r = b.rank();
    return {b.dim(), p + q, r, [a, b, p, r](const Point& x, std::span<const Vec> args) -> ValueB {
                return shuffle_sum<ValueB>(args, p, r, [&](std::span<const Vec> h, std::span<const Vec> t) -> ValueB {
                    return a(x, h) * b(x, t);
                });
            }};
}

/// b ∧ a for matrix-valued b and a (right multiplication).
inline SmoothHomForm wedge_right(const SmoothHomForm& b, const SmoothHomForm& a) {
    const int p = b.degree(), q = a.degree(), r = b.rank();
    return {b.dim(), p + q, r, [a, b, p, r](const Point& x, std::span<const Vec> args) -> Mat {
                return shuffle_sum<Mat>(args, p, r, [&](std::span<const Vec> h, std::span<const Vec> t) -> Mat {
                    return b(x, h) * a(x, t);
                });
            }};
}

/// One term of a coefficient expansion: coefficient(p) * dx_{axes[0]} ∧ ... ∧ dx_{axes[l-1]}.
template <class Value>
struct Component {
    std::vector<int> axes;
    std::function<Value(const Point&)> coefficient;
};

template <class Value>
SmoothForm<Value> coefficient_form(int dim, int degree, int rank, std::vector<Component<Value>> components) {
    for (const auto& c : components)
        if (static_cast<int>(c.axes.size()) != degree) throw Error("component has wrong number of axes");
    return {dim, degree, rank, [components, rank, degree](const Point& p, std::span<const Vec> args) -> Value {
                Value acc = zero_value<Value>(rank);
                Mat minor(degree, degree);
                for (const auto& c : components) {
                    for (int k = 0; k < degree; ++k)
                        for (int j = 0; j < degree; ++j) minor(k, j) = args[j][c.axes[k]];
                    const double det = degree == 0 ? 1.0 : minor.determinant();
                    if (det != 0.0) acc += det * c.coefficient(p);
                }
                return acc;
            }};
}

template <class Value>
SmoothForm<Value> zero_form(int dim, int degree, int rank) {
    return {dim, degree, rank, [rank](const Point&, std::span<const Vec>) { return zero_value<Value>(rank); }};
}

/// Central-difference exterior derivative: sum_i (-1)^i D_{X_i} f(X_0..X̂_i..X_l).
template <class Value>
SmoothForm<Value> finite_difference_derivative(const SmoothForm<Value>& f) {
    const int l = f.degree(), r = f.rank();
    return {f.dim(), l + 1, r, [f, l, r](const Point& p, std::span<const Vec> args) -> Value {
                Value acc = zero_value<Value>(r);
                std::vector<Vec> rest;
                for (int i = 0; i <= l; ++i) {
                    rest.clear();
                    for (int j = 0; j <= l; ++j)
                        if (j != i) rest.push_back(args[j]);
                    const double len = args[i].norm();
                    if (len == 0.0) continue;
                    const double t = fd_step(p) / len;
                    const Value diff = (f(p + t * args[i], rest) - f(p - t * args[i], rest)) / (2.0 * t);
                    acc += (i % 2 == 0) ? diff : Value(-diff);
                }
                return acc;
            }};
}

/// Analytic derivative when attached, finite differences otherwise.
template <class Value>
SmoothForm<Value> exterior_derivative(const SmoothForm<Value>& f) {
    if (const auto* d = f.analytic_derivative()) return *d;
    return finite_difference_derivative(f);
}

/// Local connection 1-form: omega_p(x) = sum_i x_i A_i(p) with r×r coefficient matrices.
class SmoothConnection {
public:
    using Coefficients = std::function<std::vector<Mat>(const Point&)>;
    /// Entry i*n + j holds the partial derivative of A_i along x_j.
    using Jacobian = std::function<std::vector<Mat>(const Point&)>;

    SmoothConnection(int dim, int rank, Coefficients a, Jacobian jac = {})
        : dim_(dim), rank_(rank), a_(std::move(a)), jac_(std::move(jac)) {}

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    bool has_analytic_derivative() const { return static_cast<bool>(jac_); }

    std::vector<Mat> coefficients(const Point& p) const { return a_(p); }

    Mat operator()(const Point& p, const Vec& x) const {
        const auto a = a_(p);
        Mat m = Mat::Zero(rank_, rank_);
        for (int i = 0; i < dim_; ++i)
            if (x[i] != 0.0) m += x[i] * a[i];
        return m;
    }

    /// d(omega)_p(x, y) for constant vector fields x, y.
    Mat differential(const Point& p, const Vec& x, const Vec& y) const {
        if (jac_) {
            const auto j = jac_(p);
            Mat m = Mat::Zero(rank_, rank_);
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < dim_; ++k) {
                    const double c = x[k] * y[i] - y[k] * x[i];
                    if (c != 0.0) m += c * j[i * dim_ + k];
                }
            return m;
        }
        auto directional = [&](const Vec& along, const Vec& arg) -> Mat {
            const double len = along.norm();
            if (len == 0.0) return Mat::Zero(rank_, rank_);
            const double t = fd_step(p) / len;
            return ((*this)(p + t * along, arg) - (*this)(p - t * along, arg)) / (2.0 * t);
        };
        return directional(x, y) - directional(y, x);
    }

private:
    int dim_, rank_;
    Coefficients a_;
    Jacobian jac_;
};

inline SmoothConnection flat_connection(int dim, int rank) {
    return {dim, rank, [dim, rank](const Point&) { return std::vector<Mat>(dim, Mat::Zero(rank, rank)); },
            [dim, rank](const Point&) { return std::vector<Mat>(dim * dim, Mat::Zero(rank, rank)); }};
}

inline SmoothConnection constant_connection(std::vector<Mat> a) {
    const int dim = static_cast<int>(a.size()), rank = static_cast<int>(a.front().rows());
    return {dim, rank, [a](const Point&) { return a; },
            [dim, rank](const Point&) { return std::vector<Mat>(dim * dim, Mat::Zero(rank, rank)); }};
}

/// omega seen as an endomorphism-valued 1-form, with d(omega) attached.
inline SmoothHomForm connection_form(const SmoothConnection& conn) {
    SmoothHomForm w(conn.dim(), 1, conn.rank(),
                    [conn](const Point& p, std::span<const Vec> x) -> Mat { return conn(p, x[0]); });
    SmoothHomForm dw(conn.dim(), 2, conn.rank(),
                     [conn](const Point& p, std::span<const Vec> x) -> Mat { return conn.differential(p, x[0], x[1]); });
    return w.with_derivative(dw);
}

/// Ordered product of exp(∫ omega) over `steps` equal subintervals of the segment a -> b, earlier
/// parameters to the left. Maps the fiber at b to the fiber at a.
inline Mat transport_segment(const SmoothConnection& conn, const Point& a, const Point& b, int steps) {
    if (steps < 1) throw Error("transport needs at least one subinterval");
    static const QuadratureRule gl = gauss_legendre5();
    const Vec dir = b - a;
    Mat r = identity(conn.rank());
    if (dir.isZero(0.0)) return r;
    for (int i = 0; i < steps; ++i) {
        Mat integral = Mat::Zero(conn.rank(), conn.rank());
        for (std::size_t q = 0; q < gl.size(); ++q) {
            const double t = (i + gl.nodes[q][1]) / steps;
            integral += gl.weights[q] * conn((1.0 - t) * a + t * b, dir);
        }
        integral /= steps;
        if (!integral.isZero(0.0)) r = r * expm(integral);
    }
    return r;
}

/// Composition along consecutive segments; maps the fiber at the last point to the first.
inline Mat transport_polyline(const SmoothConnection& conn, std::span<const Point> points, int steps) {
    if (points.size() < 2) throw Error("polyline needs at least two points");
    Mat r = identity(conn.rank());
    for (std::size_t k = 0; k + 1 < points.size(); ++k) r = r * transport_segment(conn, points[k], points[k + 1], steps);
    return r;
}

/// Gauge of the frame propagated radially from `base`: maps the fiber at p to the fiber at base.
inline Mat gauge_at(const SmoothConnection& conn, const Point& base, const Point& p, int steps) {
    return transport_segment(conn, base, p, steps);
}

/// Where an integral's frame is anchored.
struct Barycenter {};
struct CoordinateFrame {};
using FrameBase = std::variant<VertexId, Barycenter, CoordinateFrame>;

namespace detail {

inline std::vector<Vec> edge_frame(std::span<const Point> verts) {
    std::vector<Vec> e;
    double factorial = 1.0;
    for (std::size_t k = 1; k < verts.size(); ++k) factorial *= static_cast<double>(k);
    for (std::size_t k = 1; k < verts.size(); ++k) e.push_back(verts[k] - verts[0]);
    // the reference simplex has measure 1/l!
    if (!e.empty()) e[0] /= factorial;
    return e;
}

inline Point node_point(std::span<const Point> verts, const Vec& bc) {
    Point p = Point::Zero(verts[0].size());
    for (std::size_t k = 0; k < verts.size(); ++k) p += bc[k] * verts[k];
    return p;
}

inline Point mean(std::span<const Point> verts) {
    Point p = Point::Zero(verts[0].size());
    for (const auto& v : verts) p += v;
    return p / static_cast<double>(verts.size());
}

} // namespace detail

/// Optional base point: nullopt means the coordinate frame (gauge = Id).
using BasePoint = std::optional<Point>;

inline BasePoint resolve_base(const SimplicialComplex& c, const Simplex& s, const FrameBase& base) {
    if (const auto* v = std::get_if<VertexId>(&base)) {
        if (!s.contains(*v)) throw Error("base vertex must belong to the simplex");
        return c.position(*v);
    }
    if (std::holds_alternative<Barycenter>(base)) return barycenter(c, s);
    return std::nullopt;
}

/// ∫_s R^{base} alpha over an oriented simplex given by its vertex positions.
inline Vec derham_vector(const SmoothConnection& conn, const SmoothVectorForm& alpha, std::span<const Point> verts,
                         const BasePoint& base, const QuadratureRule& quad, int steps) {
    const int l = static_cast<int>(verts.size()) - 1;
    if (alpha.degree() != l) throw Error("form degree does not match simplex dimension");
    if (quad.dim != l) throw Error("quadrature rule dimension does not match simplex");
    const auto frame = detail::edge_frame(verts);
    Vec acc = Vec::Zero(alpha.rank());
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const Point p = detail::node_point(verts, quad.nodes[q]);
        const Vec value = alpha(p, frame);
        acc += quad.weights[q] * (base ? Vec(gauge_at(conn, *base, p, steps) * value) : value);
    }
    return acc;
}

inline Vec derham_vector(const SmoothConnection& conn, const SmoothVectorForm& alpha, const SimplicialComplex& c,
                         const Simplex& s, const FrameBase& base, const QuadratureRule& quad, int steps) {
    const auto verts = c.positions_of(s);
    return derham_vector(conn, alpha, verts, resolve_base(c, s, base), quad, steps);
}

/// ∫_s R^{eval} beta (R^{cut})^{-1} over an oriented simplex.
inline Mat derham_hom(const SmoothConnection& conn, const SmoothHomForm& beta, std::span<const Point> verts,
                      const BasePoint& eval, const BasePoint& cut, const QuadratureRule& quad, int steps) {
    const int l = static_cast<int>(verts.size()) - 1;
    if (beta.degree() != l) throw Error("form degree does not match simplex dimension");
    if (quad.dim != l) throw Error("quadrature rule dimension does not match simplex");
    const auto frame = detail::edge_frame(verts);
    Mat acc = Mat::Zero(beta.rank(), beta.rank());
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const Point p = detail::node_point(verts, quad.nodes[q]);
        Mat value = beta(p, frame);
        if (eval) value = gauge_at(conn, *eval, p, steps) * value;
        // inverse gauge = transport back along the same segment
        if (cut) value = value * transport_segment(conn, p, *cut, steps);
        acc += quad.weights[q] * value;
    }
    return acc;
}

inline Mat derham_hom(const SmoothConnection& conn, const SmoothHomForm& beta, const SimplicialComplex& c,
                      const Simplex& s, const FrameBase& eval, const FrameBase& cut, const QuadratureRule& quad,
                      int steps) {
    const auto verts = c.positions_of(s);
    return derham_hom(conn, beta, verts, resolve_base(c, s, eval), resolve_base(c, s, cut), quad, steps);
}

/// d alpha + omega ∧ alpha.
inline SmoothVectorForm covariant_derivative(const SmoothConnection& conn, const SmoothVectorForm& alpha) {
    return exterior_derivative(alpha) + wedge(connection_form(conn), alpha);
}

/// d beta + omega ∧ beta - (-1)^l beta ∧ omega (graded commutator with omega).
inline SmoothHomForm covariant_derivative_hom(const SmoothConnection& conn, const SmoothHomForm& beta) {
    const auto w = connection_form(conn);
    const double sign = beta.degree() % 2 == 0 ? -1.0 : 1.0;
    return exterior_derivative(beta) + wedge(w, beta) + sign * wedge_right(beta, w);
}

/// d omega + omega ∧ omega.
inline SmoothHomForm curvature(const SmoothConnection& conn) {
    const auto w = connection_form(conn);
    return exterior_derivative(w) + wedge(w, w);
}

/// Omega ∧ alpha: what applying the covariant derivative twice produces.
inline SmoothVectorForm curvature_wedge(const SmoothConnection& conn, const SmoothVectorForm& alpha) {
    return wedge(curvature(conn), alpha);
}

/// Omega ∧ beta - beta ∧ Omega: the endomorphism-valued analogue.
inline SmoothHomForm curvature_commutator(const SmoothConnection& conn, const SmoothHomForm& beta) {
    const auto omega = curvature(conn);
    return wedge(omega, beta) - wedge_right(beta, omega);
}

} // namespace covex
