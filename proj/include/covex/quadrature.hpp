#pragma once

#include "covex/types.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <vector>

namespace covex {

/// Rule on the reference k-simplex. Nodes are barycentric coordinates (k+1 entries),
/// weights are normalized to sum to 1.
struct QuadratureRule {
    int dim = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

namespace detail {

inline Vec bary(std::initializer_list<double> l) {
    Vec v(static_cast<Eigen::Index>(l.size()));
    Eigen::Index i = 0;
    for (double x : l) v[i++] = x;
    return v;
}

/// Gauss-Legendre nodes/weights on [0,1] via the Golub-Welsch eigenproblem.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
    Mat jacobi = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
    std::vector<double> x(n), w(n);
    for (int k = 0; k < n; ++k) {
        x[k] = 0.5 * (es.eigenvalues()[k] + 1.0);
        const double v0 = es.eigenvectors()(0, k);
        w[k] = v0 * v0;
    }
    return {x, w};
}

} // namespace detail

inline QuadratureRule point_rule() { return {0, {detail::bary({1.0})}, {1.0}}; }

/// 5-point Gauss-Legendre on an edge, exact to degree 9.
inline QuadratureRule gauss_legendre5() {
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const std::array<double, 5> t{-b, -a, 0.0, a, b};
    const std::array<double, 5> w{wb, wa, 128.0 / 225.0, wa, wb};
    QuadratureRule r{1, {}, {}};
    for (int k = 0; k < 5; ++k) {
        const double s = 0.5 * (t[k] + 1.0);
        r.nodes.push_back(detail::bary({1.0 - s, s}));
        r.weights.push_back(0.5 * w[k]);
    }
    return r;
}

/// 7-point symmetric triangle rule, exact to degree 5.
inline QuadratureRule triangle_degree5() {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    QuadratureRule r{2, {detail::bary({1.0 / 3, 1.0 / 3, 1.0 / 3})}, {9.0 / 40.0}};
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
        const double b = 1.0 - 2.0 * a;
        for (const auto& n : {detail::bary({b, a, a}), detail::bary({a, b, a}), detail::bary({a, a, b})}) {
            r.nodes.push_back(n);
            r.weights.push_back(w);
        }
    }
    return r;
}

/// 15-point symmetric tetrahedron rule with positive weights, exact to degree 5.
inline QuadratureRule tetrahedron_degree5() {
    const double s15 = std::sqrt(15.0);
    QuadratureRule r{3, {detail::bary({0.25, 0.25, 0.25, 0.25})}, {16.0 / 135.0}};
    const double r1 = (7.0 - s15) / 34.0, w1 = (2665.0 + 14.0 * s15) / 37800.0;
    const double r2 = (7.0 + s15) / 34.0, w2 = (2665.0 - 14.0 * s15) / 37800.0;
    for (auto [a, w] : {std::pair{r1, w1}, std::pair{r2, w2}}) {
        const double b = 1.0 - 3.0 * a;
        for (int k = 0; k < 4; ++k) {
            Vec n = Vec::Constant(4, a);
            n[k] = b;
            r.nodes.push_back(n);
            r.weights.push_back(w);
        }
    }
    const double s = (10.0 - 2.0 * s15) / 40.0, t = 0.5 - s;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Vec n = Vec::Constant(4, t);
            n[i] = n[j] = s;
            r.nodes.push_back(n);
            r.weights.push_back(20.0 / 378.0);
        }
    return r;
}

/// Default rule per simplex dimension (0..3).
inline QuadratureRule default_rule(int dim) {
    switch (dim) {
    case 0: return point_rule();
    case 1: return gauss_legendre5();
    case 2: return triangle_degree5();
    case 3: return tetrahedron_degree5();
    default: throw Error("no default quadrature for dimension " + std::to_string(dim));
    }
}

/// Collapsed tensor-product Gauss-Legendre rule with n points per direction. Not symmetric, but
/// positive and of arbitrary order; used where a refined reference integral is wanted.
inline QuadratureRule collapsed_rule(int dim, int n) {
    if (dim == 0) return point_rule();
    const auto [x, w] = detail::gauss_legendre_unit(n);
    QuadratureRule r{dim, {}, {}};
    std::vector<int> idx(dim, 0);
    double factorial = 1.0;
    for (int k = 2; k <= dim; ++k) factorial *= k;
    while (true) {
        // Duffy map: l_1 = u_1, l_k = (1 - l_1 - ... - l_{k-1}) u_k.
        Vec bc(dim + 1);
        double remaining = 1.0, weight = factorial;
        for (int k = 0; k < dim; ++k) {
            const double u = x[idx[k]];
            weight *= w[idx[k]] * remaining;
            bc[k + 1] = remaining * u;
            remaining -= bc[k + 1];
        }
        bc[0] = remaining;
        r.nodes.push_back(bc);
        r.weights.push_back(weight);
        int k = 0;
        while (k < dim && ++idx[k] == n) idx[k++] = 0;
        if (k == dim) break;
    }
    return r;
}

} // namespace covex
