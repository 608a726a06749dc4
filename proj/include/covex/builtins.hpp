#pragma once

#include "covex/smooth.hpp"

#include <string_view>

namespace covex {

namespace detail {

inline Mat mat3(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(3, 3);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Vec vec3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

// Skew generators of the sample connection: rotation in the x-z plane and in the x-y plane.
inline Mat generator_xz() { return mat3({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}); }
inline Mat generator_xy() { return mat3({{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}); }

} // namespace detail

/// Skew-valued test connection: omega = G_xz x dz + G_xy (y dx + dz).
inline SmoothConnection sample_connection() {
    using namespace detail;
    return {3, 3,
            [](const Point& p) {
                return std::vector<Mat>{p[1] * generator_xy(), Mat::Zero(3, 3), p[0] * generator_xz() + generator_xy()};
            },
            [](const Point&) {
                std::vector<Mat> j(9, Mat::Zero(3, 3));
                j[0 * 3 + 1] = generator_xy();
                j[2 * 3 + 0] = generator_xz();
                return j;
            }};
}

/// Tangent-valued identity form theta(X) = X.
inline SmoothVectorForm solder_form(int dim = 3) {
    SmoothVectorForm theta(dim, 1, dim, [](const Point&, std::span<const Vec> x) -> Vec { return x[0]; });
    return theta.with_derivative(zero_form<Vec>(dim, 2, dim));
}

/// (2x dy, x dx, dz - z dy).
inline SmoothVectorForm sample_one_form() {
    using detail::vec3;
    auto f = coefficient_form<Vec>(3, 1, 3,
                                   {{{0}, [](const Point& p) { return vec3(0, p[0], 0); }},
                                    {{1}, [](const Point& p) { return vec3(2 * p[0], 0, -p[2]); }},
                                    {{2}, [](const Point&) { return vec3(0, 0, 1); }}});
    auto d = coefficient_form<Vec>(3, 2, 3,
                                   {{{0, 1}, [](const Point&) { return vec3(2, 0, 0); }},
                                    {{1, 2}, [](const Point&) { return vec3(0, 0, 1); }}});
    return f.with_derivative(d);
}

/// (3y dy∧dz + x² dz∧dx, (xyz+1) dx∧dy, xy dy∧dz).
inline SmoothVectorForm sample_two_form() {
    using detail::vec3;
    auto f = coefficient_form<Vec>(3, 2, 3,
                                   {{{1, 2}, [](const Point& p) { return vec3(3 * p[1], 0, p[0] * p[1]); }},
                                    {{0, 2}, [](const Point& p) { return vec3(-p[0] * p[0], 0, 0); }},
                                    {{0, 1}, [](const Point& p) { return vec3(0, p[0] * p[1] * p[2] + 1, 0); }}});
    auto d = coefficient_form<Vec>(3, 3, 3, {{{0, 1, 2}, [](const Point& p) { return vec3(0, p[0] * p[1], p[1]); }}});
    return f.with_derivative(d);
}

/// Skew endomorphism-valued 1-form [[0,-x dy,0],[x dy,0,dz],[0,-dz,0]].
inline SmoothHomForm sample_endo_one_form() {
    using detail::mat3;
    auto f = coefficient_form<Mat>(3, 1, 3,
                                   {{{1}, [](const Point& p) { return mat3({{0, -p[0], 0}, {p[0], 0, 0}, {0, 0, 0}}); }},
                                    {{2}, [](const Point&) { return mat3({{0, 0, 0}, {0, 0, 1}, {0, -1, 0}}); }}});
    auto d = coefficient_form<Mat>(3, 2, 3,
                                   {{{0, 1}, [](const Point&) { return mat3({{0, -1, 0}, {1, 0, 0}, {0, 0, 0}}); }}});
    return f.with_derivative(d);
}

/// Skew endomorphism-valued 2-form [[0, x² dy∧dz, 2z dx∧dy], [-x² dy∧dz, 0, 0], [-2z dx∧dy, 0, 0]].
inline SmoothHomForm sample_endo_two_form() {
    using detail::mat3;
    auto f = coefficient_form<Mat>(
        3, 2, 3,
        {{{1, 2}, [](const Point& p) { return mat3({{0, p[0] * p[0], 0}, {-p[0] * p[0], 0, 0}, {0, 0, 0}}); }},
         {{0, 1}, [](const Point& p) { return mat3({{0, 0, 2 * p[2]}, {0, 0, 0}, {-2 * p[2], 0, 0}}); }}});
    auto d = coefficient_form<Mat>(
        3, 3, 3, {{{0, 1, 2}, [](const Point& p) { return mat3({{0, 2 * p[0], 2}, {-2 * p[0], 0, 0}, {-2, 0, 0}}); }}});
    return f.with_derivative(d);
}

using Builtin = std::variant<SmoothConnection, SmoothVectorForm, SmoothHomForm>;

struct BuiltinInfo {
    std::string name;
    std::string kind;
    std::string formula;
};

inline const std::vector<BuiltinInfo>& builtin_registry() {
    static const std::vector<BuiltinInfo> registry{
        {"sample-connection", "connection", "omega = [[0,0,1],[0,0,0],[-1,0,0]] x dz + [[0,1,0],[-1,0,0],[0,0,0]] (y dx + dz)"},
        {"flat", "connection", "omega = 0 (rank 3 on R^3)"},
        {"solder", "vector 1-form", "theta(X) = X"},
        {"sample-1-form", "vector 1-form", "(2x dy, x dx, dz - z dy)"},
        {"sample-2-form", "vector 2-form", "(3y dy^dz + x^2 dz^dx, (xyz+1) dx^dy, xy dy^dz)"},
        {"sample-endo-1-form", "endomorphism 1-form", "[[0,-x dy,0],[x dy,0,dz],[0,-dz,0]]"},
        {"sample-endo-2-form", "endomorphism 2-form", "[[0,x^2 dy^dz,2z dx^dy],[-x^2 dy^dz,0,0],[-2z dx^dy,0,0]]"},
        {"torsion", "vector 2-form", "covariant derivative of the solder form under sample-connection"},
        {"curvature", "endomorphism 2-form", "curvature of sample-connection"},
    };
    return registry;
}

inline std::string builtin_names() {
    std::string out;
    for (const auto& b : builtin_registry()) out += (out.empty() ? "" : ", ") + b.name;
    return out;
}

inline Builtin builtin(std::string_view name) {
    if (name == "sample-connection") return sample_connection();
    if (name == "flat") return flat_connection(3, 3);
    if (name == "solder") return solder_form();
    if (name == "sample-1-form") return sample_one_form();
    if (name == "sample-2-form") return sample_two_form();
    if (name == "sample-endo-1-form") return sample_endo_one_form();
    if (name == "sample-endo-2-form") return sample_endo_two_form();
    if (name == "torsion") return covariant_derivative(sample_connection(), solder_form());
    if (name == "curvature") return curvature(sample_connection());
    throw Error("unknown builtin '" + std::string(name) + "'; known: " + builtin_names());
}

template <class T>
T builtin_as(std::string_view name) {
    auto b = builtin(name);
    if (auto* t = std::get_if<T>(&b)) return std::move(*t);
    throw Error("builtin '" + std::string(name) + "' has a different kind");
}

} // namespace covex
