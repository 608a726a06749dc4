#pragma once

#include "covex/builtins.hpp"
#include "covex/calculus.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

namespace covex {

// ---------------------------------------------------------------------------------------------
// Placement

/// Reference triangle used by the triangle experiments, evaluation vertex first.
inline std::vector<Point> triangle_template() {
    return {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.4, 0.3, 0)};
}

/// Reference tetrahedron: apex at the origin, base on the unit circle at height 1.
inline std::vector<Point> tetrahedron_template() {
    using std::numbers::pi;
    auto ring = [](double a) -> Point { return Eigen::Vector3d(std::sin(a), std::cos(a), 1.0); };
    return {Eigen::Vector3d(0, 0, 0), ring(5 * pi / 3), ring(pi / 3), ring(pi)};
}

/// How the three Euler angles compose. Both apply the X angle first.
enum class EulerConvention {
    extrinsic, ///< about the fixed X, then fixed Y, then fixed Z axis: Rz Ry Rx
    intrinsic, ///< about X, then the rotated Y', then Z'': Rx Ry Rz
};

/// Rotation from X, Y, Z angles in degrees.
inline Eigen::Matrix3d euler_rotation(const Eigen::Vector3d& degrees, EulerConvention convention) {
    const Eigen::Vector3d r = degrees * (std::numbers::pi / 180.0);
    const Eigen::Matrix3d x = Eigen::AngleAxisd(r[0], Eigen::Vector3d::UnitX()).toRotationMatrix();
    const Eigen::Matrix3d y = Eigen::AngleAxisd(r[1], Eigen::Vector3d::UnitY()).toRotationMatrix();
    const Eigen::Matrix3d z = Eigen::AngleAxisd(r[2], Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return convention == EulerConvention::extrinsic ? Eigen::Matrix3d(z * y * x) : Eigen::Matrix3d(x * y * z);
}

/// p' = R (p + shift): shift first, then rotate.
inline std::vector<Point> place(const std::vector<Point>& verts, const Eigen::Vector3d& shift,
                                const Eigen::Vector3d& euler_degrees,
                                EulerConvention convention = EulerConvention::extrinsic) {
    const Eigen::Matrix3d r = euler_rotation(euler_degrees, convention);
    std::vector<Point> out;
    for (const auto& p : verts) out.push_back(r * (Eigen::Vector3d(p) + shift));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Ground truth

/// R_{v0,c} ∫ R^c alpha with c the barycenter.
inline Vec ground_truth(const SmoothConnection& conn, const SmoothVectorForm& alpha, std::span<const Point> verts,
                        const Point& eval, const QuadratureRule& quad, int steps) {
    const Point c = detail::mean(verts);
    return transport_segment(conn, eval, c, steps) * derham_vector(conn, alpha, verts, c, quad, steps);
}

/// R_{eval,c} ∫ R^c beta (R^c)^{-1} R_{c,cut}.
inline Mat ground_truth(const SmoothConnection& conn, const SmoothHomForm& beta, std::span<const Point> verts,
                        const Point& eval, const Point& cut, const QuadratureRule& quad, int steps) {
    const Point c = detail::mean(verts);
    return transport_segment(conn, eval, c, steps) * derham_hom(conn, beta, verts, c, c, quad, steps) *
           transport_segment(conn, c, cut, steps);
}

// ---------------------------------------------------------------------------------------------
// Convergence experiments

/// What is measured on each shrinking simplex. Compositions read right to left in the name:
/// sided_of_full is the sided derivative of the full derivative.
enum class Operator {
    curvature,      ///< discrete curvature vs the curvature 2-form
    sided,          ///< sided derivative vs the covariant derivative
    full,           ///< full derivative vs the covariant derivative
    sided_of_full,  ///< vs the curvature wedge
    full_of_full,   ///< vs the curvature wedge
    sided_of_sided, ///< vs the curvature wedge
    explicit_wedge, ///< explicit six-term wedge vs sided(even alternation(sided α)); absolute gap
};

inline const std::vector<std::pair<Operator, std::string>>& operator_names() {
    static const std::vector<std::pair<Operator, std::string>> names{
        {Operator::curvature, "curvature"},       {Operator::sided, "sided"},
        {Operator::full, "full"},                 {Operator::sided_of_full, "sided-full"},
        {Operator::full_of_full, "full-full"},    {Operator::sided_of_sided, "sided-sided"},
        {Operator::explicit_wedge, "explicit-wedge"},
    };
    return names;
}

inline std::string to_string(Operator op) {
    for (const auto& [o, n] : operator_names())
        if (o == op) return n;
    throw Error("unknown operator");
}

inline Operator parse_operator(std::string_view name) {
    for (const auto& [o, n] : operator_names())
        if (n == name) return o;
    std::string known;
    for (const auto& [o, n] : operator_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown operator '" + std::string(name) + "'; known: " + known);
}

/// Closed interval an observed slope must fall in.
struct SlopeBand {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double s) const { return s >= lo && s <= hi; }
};

/// Which error column a slope is fitted on.
enum class ErrorKind { relative, absolute };

struct ExperimentSpec {
    std::string name;
    SmoothConnection connection = sample_connection();
    std::string connection_label = "sample-connection";
    /// Absent for the curvature operator.
    std::optional<std::variant<SmoothVectorForm, SmoothHomForm>> form;
    std::string form_label;
    std::vector<Point> simplex; ///< unplaced template, evaluation vertex first
    Eigen::Vector3d shift = Eigen::Vector3d::Zero();
    Eigen::Vector3d euler_degrees = Eigen::Vector3d::Zero();
    EulerConvention euler = EulerConvention::extrinsic;
    int levels = 7;
    double factor = 0.5;
    int path_steps = 64;
    Operator op = Operator::full;
    DiscretizationMode mode = DiscretizationMode::vertex;
    CornerRecovery corners = CornerRecovery::per_corner;
    ErrorKind error = ErrorKind::relative;
    SlopeBand band;
};

struct ConvergenceRow {
    int level = 0;
    double h = 0, abs_error = 0, rel_error = 0;
};

struct SlopeFit {
    double slope = 0, intercept = 0, r2 = 0;
    int used = 0; ///< rows above the rounding floor
};

/// Rows whose error sits at rounding level are excluded before the fit.
inline double slope_floor() { return 1e3 * std::numeric_limits<double>::epsilon(); }

/// Least squares line through (log h, log error).
inline SlopeFit fit_slope(std::span<const ConvergenceRow> rows, ErrorKind kind = ErrorKind::relative) {
    const bool absolute = kind == ErrorKind::absolute;
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        const double e = absolute ? r.abs_error : r.rel_error;
        if (e > slope_floor() && r.h > 0) {
            xs.push_back(std::log(r.h));
            ys.push_back(std::log(e));
        }
    }
    if (xs.size() < 3) throw Error("slope fit needs at least 3 rows above the rounding floor");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0) throw Error("slope fit needs distinct mesh sizes");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.used = static_cast<int>(xs.size());
    return f;
}

/// Header, one line per row at 17 significant digits, then the fit as a comment. Extra comment
/// lines, if any, follow the fit.
inline void emit_csv(std::ostream& out, std::span<const ConvergenceRow> rows, const std::optional<SlopeFit>& fit,
                     const std::vector<std::string>& notes = {}) {
    out << "level,h,abs_error,rel_error\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.level << ',' << r.h << ',' << r.abs_error << ',' << r.rel_error << '\n';
    if (fit) out << "# slope=" << fit->slope << ",r2=" << fit->r2 << '\n';
    for (const auto& n : notes) out << "# " << n << '\n';
}

inline void emit_csv(const std::string& path, std::span<const ConvergenceRow> rows, const std::optional<SlopeFit>& fit,
                     const std::vector<std::string>& notes = {}) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    emit_csv(f, rows, fit, notes);
    if (!f) throw Error("write failed for " + path);
}

/// COVEX_THREADS caps the worker count; default is the hardware concurrency.
inline unsigned max_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COVEX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

namespace detail {

template <class Value>
double norm_of(const Value& v) {
    return v.norm();
}

inline ConvergenceRow measure_level(const ExperimentSpec& spec, int level) {
    const int k = static_cast<int>(spec.simplex.size()) - 1;
    std::vector<VertexId> ids;
    for (int i = 0; i <= k; ++i) ids.push_back(vertex(static_cast<std::uint32_t>(i)));
    const Simplex sigma(ids);
    const SimplicialComplex placed(place(spec.simplex, spec.shift, spec.euler_degrees, spec.euler), {sigma});
    const SimplicialComplex c = scale_toward(placed, sigma, sigma[0], std::pow(spec.factor, level));
    const auto verts = c.positions_of(sigma);
    const DiscreteConnection dc = from_smooth(c, spec.connection, spec.path_steps);
    const QuadratureRule quad = default_rule(k);
    const SmoothConnection& conn = spec.connection;
    const int n = spec.path_steps;
    const VertexId v0 = sigma.front(), last = sigma.back();

    ConvergenceRow row;
    row.level = level;
    row.h = diameter(c, sigma);
    auto record = [&](const auto& got, const auto& want) {
        row.abs_error = norm_of(got - want);
        row.rel_error = row.abs_error / norm_of(want);
    };

    if (spec.op == Operator::curvature) {
        const Mat got = curvature(dc, sigma, v0, last);
        record(got, ground_truth(conn, curvature(conn), verts, verts.front(), verts.back(), quad, n));
        return row;
    }
    if (!spec.form) throw Error("experiment '" + spec.name + "' needs a form");

    if (const auto* alpha = std::get_if<SmoothVectorForm>(&*spec.form)) {
        const DiscreteVectorForm stored = discretize_vector(conn, *alpha, c, spec.mode, spec.corners, n);
        const VectorCochain a = view(stored, dc);
        const int need = spec.op == Operator::sided || spec.op == Operator::full ? 1 : 2;
        if (alpha->degree() + need != k) throw Error("form degree does not fit the experiment simplex");
        switch (spec.op) {
        case Operator::sided:
            record(sided_derivative(dc, a, sigma, v0),
                   ground_truth(conn, covariant_derivative(conn, *alpha), verts, verts.front(), quad, n));
            break;
        case Operator::full:
            record(covariant_derivative(dc, a, sigma, v0),
                   ground_truth(conn, covariant_derivative(conn, *alpha), verts, verts.front(), quad, n));
            break;
        case Operator::sided_of_full:
        case Operator::full_of_full:
        case Operator::sided_of_sided: {
            const VectorCochain inner =
                spec.op == Operator::sided_of_sided ? sided_derivative(dc, a) : covariant_derivative(dc, a);
            const Vec got = spec.op == Operator::full_of_full ? covariant_derivative(dc, inner, sigma, v0)
                                                              : sided_derivative(dc, inner, sigma, v0);
            record(got, ground_truth(conn, curvature_wedge(conn, *alpha), verts, verts.front(), quad, n));
            break;
        }
        case Operator::explicit_wedge: {
            const Vec expl = curvature_wedge_explicit(dc, a, sigma);
            const Vec reduced =
                sided_derivative(dc, reduced_alternation(dc, sided_derivative(dc, a), Parity::even), sigma, v0);
            row.abs_error = (expl - reduced).norm();
            row.rel_error = row.abs_error / expl.norm();
            break;
        }
        case Operator::curvature: break;
        }
        return row;
    }

    const auto& beta = std::get<SmoothHomForm>(*spec.form);
    const DiscreteHomForm stored = discretize_hom(conn, beta, c, spec.mode, spec.corners, n);
    const HomCochain b = view(stored, dc);
    const int need = spec.op == Operator::sided || spec.op == Operator::full ? 1 : 2;
    if (beta.degree() + need != k) throw Error("form degree does not fit the experiment simplex");
    switch (spec.op) {
    case Operator::sided:
        record(sided_derivative(dc, b, sigma, v0, last),
               ground_truth(conn, covariant_derivative_hom(conn, beta), verts, verts.front(), verts.back(), quad, n));
        break;
    case Operator::full:
        record(covariant_derivative(dc, b, sigma, v0, last),
               ground_truth(conn, covariant_derivative_hom(conn, beta), verts, verts.front(), verts.back(), quad, n));
        break;
    case Operator::sided_of_full:
    case Operator::full_of_full:
    case Operator::sided_of_sided: {
        const HomCochain inner = spec.op == Operator::sided_of_sided ? sided_derivative(dc, b) : covariant_derivative(dc, b);
        const Mat got = spec.op == Operator::full_of_full ? covariant_derivative(dc, inner, sigma, v0, last)
                                                          : sided_derivative(dc, inner, sigma, v0, last);
        record(got, ground_truth(conn, curvature_commutator(conn, beta), verts, verts.front(), verts.back(), quad, n));
        break;
    }
    default: throw Error("operator not available for endomorphism-valued forms");
    }
    return row;
}

} // namespace detail

/// One row per level; the simplex is scaled toward its evaluation vertex by factor^level.
/// Levels run concurrently, at most max_threads() at a time.
inline std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec) {
    if (spec.simplex.size() < 2) throw Error("experiment needs a simplex of dimension at least 1");
    if (spec.levels < 3) throw Error("experiment needs at least 3 levels");
    if (!(spec.factor > 0 && spec.factor < 1)) throw Error("scale factor must lie in (0, 1)");
    std::vector<ConvergenceRow> rows(static_cast<std::size_t>(spec.levels));
    const int batch = static_cast<int>(max_threads());
    for (int start = 0; start < spec.levels; start += batch) {
        std::vector<std::future<ConvergenceRow>> jobs;
        for (int l = start; l < std::min(spec.levels, start + batch); ++l)
            jobs.push_back(std::async(std::launch::async, [&spec, l] {
                try {
                    return detail::measure_level(spec, l);
                } catch (const std::exception& e) {
                    throw Error("level " + std::to_string(l) + ": " + e.what());
                }
            }));
        for (int l = start; auto& j : jobs) rows[static_cast<std::size_t>(l++)] = j.get();
    }
    return rows;
}

inline SlopeFit fit_slope(const ExperimentSpec& spec, std::span<const ConvergenceRow> rows) {
    return fit_slope(rows, spec.error);
}

/// One measurable series of a built-in experiment.
struct Series {
    Operator op;
    SlopeBand band;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::vector<Series> series; ///< first entry is the default
};

inline const std::vector<ExperimentInfo>& experiment_registry() {
    const SlopeBand first{0.8, 1.3}, second{1.7, 2.3}, stalled{-std::numeric_limits<double>::infinity(), 0.3};
    static const std::vector<ExperimentInfo> registry{
        {"curvature", "discrete curvature on a shrinking triangle", {{Operator::curvature, second}}},
        {"dnabla1-solder", "derivative of the solder form (torsion) on a triangle",
         {{Operator::full, second}, {Operator::sided, first}}},
        {"dnabla1-alpha", "derivative of a vector 1-form on a triangle",
         {{Operator::full, second}, {Operator::sided, first}}},
        {"dnabla2", "derivative of a vector 2-form on a tetrahedron", {{Operator::full, second}, {Operator::sided, first}}},
        {"bianchi", "second derivatives of the solder form on a tetrahedron",
         {{Operator::full_of_full, first},
          {Operator::sided_of_full, first},
          {Operator::sided_of_sided, stalled},
          {Operator::explicit_wedge, {3.5, std::numeric_limits<double>::infinity()}}}},
        {"endo1", "derivative of an endomorphism 1-form on a triangle",
         {{Operator::full, second}, {Operator::sided, first}}},
        {"endo2", "derivative of an endomorphism 2-form on a tetrahedron",
         {{Operator::full, second}, {Operator::sided, first}}},
        {"endo-bianchi", "second derivative of an endomorphism 1-form on a tetrahedron",
         {{Operator::full_of_full, first}}},
        {"negative-noppf", "sided torsion with integrals taken in the coordinate frame", {{Operator::sided, stalled}}},
        {"negative-frakfrak", "sided derivative applied twice to the solder form", {{Operator::sided_of_sided, stalled}}},
    };
    return registry;
}

inline std::string experiment_names() {
    std::string out;
    for (const auto& e : experiment_registry()) out += (out.empty() ? "" : ", ") + e.name;
    return out;
}

inline const ExperimentInfo& experiment_info(std::string_view name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return e;
    throw Error("unknown experiment '" + std::string(name) + "'; known: " + experiment_names());
}

/// Built-in experiment with its default series, or the named one.
inline ExperimentSpec builtin_experiment(std::string_view name, std::optional<Operator> op = std::nullopt) {
    const ExperimentInfo& info = experiment_info(name);
    const Series* chosen = &info.series.front();
    if (op) {
        chosen = nullptr;
        for (const auto& s : info.series)
            if (s.op == *op) chosen = &s;
        if (!chosen) throw Error("experiment '" + info.name + "' has no series for operator " + to_string(*op));
    }
    ExperimentSpec spec;
    spec.name = info.name;
    spec.op = chosen->op;
    spec.band = chosen->band;
    if (spec.op == Operator::explicit_wedge) spec.error = ErrorKind::absolute;
    auto set_form = [&spec](const std::string& form) {
        spec.form_label = form;
        const Builtin b = builtin(form);
        if (const auto* v = std::get_if<SmoothVectorForm>(&b)) spec.form = *v;
        else spec.form = std::get<SmoothHomForm>(b);
    };
    auto on_triangle = [&spec](Eigen::Vector3d shift, Eigen::Vector3d euler) {
        spec.simplex = triangle_template();
        spec.shift = shift;
        spec.euler_degrees = euler;
    };
    auto on_tet = [&spec](Eigen::Vector3d shift, Eigen::Vector3d euler) {
        spec.simplex = tetrahedron_template();
        spec.shift = shift;
        spec.euler_degrees = euler;
    };
    const std::string& n = info.name;
    if (n == "curvature") {
        on_triangle({2.4, -1.3, 2.9}, {30, 45, 27});
    } else if (n == "dnabla1-solder" || n == "negative-noppf") {
        on_triangle({1.0, 4.8, -2.9}, {30, 25, 10});
        set_form("solder");
        if (n == "negative-noppf") spec.mode = DiscretizationMode::coordinate;
    } else if (n == "dnabla1-alpha") {
        on_triangle({2.4, -1.3, 2.9}, {30, 45, 27});
        set_form("sample-1-form");
    } else if (n == "dnabla2") {
        on_tet({3.4, -1.8, 3.9}, {50, 15, 70});
        set_form("sample-2-form");
    } else if (n == "bianchi" || n == "negative-frakfrak") {
        on_tet({3.4, -1.8, 3.9}, {50, 15, 70});
        set_form("solder");
    } else if (n == "endo1") {
        on_triangle({3.5, 1.1, -1.2}, {30, 45, 27});
        set_form("sample-endo-1-form");
    } else if (n == "endo2") {
        on_tet({3, 3, 2}, {30, 10, 190});
        set_form("sample-endo-2-form");
    } else if (n == "endo-bianchi") {
        on_tet({6.4, -3.8, 1.9}, {60, 50, 120});
        set_form("sample-endo-1-form");
    }
    return spec;
}

// ---------------------------------------------------------------------------------------------
// Random draws

/// GL(r): entries uniform in [-1, 1], redrawn until |det| >= 0.1.
template <class Rng>
Mat random_gl(Rng& rng, int r) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Mat m(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) m(i, j) = u(rng);
        if (std::abs(m.determinant()) >= 0.1) return m;
    }
}

/// SO(3) from a normalized Gaussian quaternion.
template <class Rng>
Mat random_so3(Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return q.toRotationMatrix();
}

template <class Rng>
Vec random_vec(Rng& rng, int r) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(r);
    for (int i = 0; i < r; ++i) v[i] = u(rng);
    return v;
}

template <class Rng>
Mat random_mat(Rng& rng, int r) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m(i, j) = u(rng);
    return m;
}

} // namespace covex
