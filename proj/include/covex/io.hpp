#pragma once

#include "covex/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace covex {

using Json = nlohmann::json;

namespace detail {

inline Json to_json(const Vec& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

inline Json to_json(const Mat& m) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        j.push_back(row);
    }
    return j;
}

inline Vec vec_from_json(const Json& j) {
    if (!j.is_array()) throw Error("expected a number array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

inline Mat mat_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error("expected a matrix as an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw Error("ragged matrix rows");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

inline std::string simplex_key(const Simplex& s) {
    std::string out;
    for (auto v : s) out += (out.empty() ? "" : "-") + std::to_string(index_of(v));
    return out;
}

inline Simplex simplex_from_key(const std::string& key) {
    std::vector<VertexId> vs;
    std::stringstream in(key);
    std::string part;
    while (std::getline(in, part, '-')) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw Error("bad simplex key '" + key + "'");
        vs.push_back(vertex(static_cast<std::uint32_t>(std::stoul(part))));
    }
    return Simplex(std::move(vs));
}

/// An affine scalar c0 + Σ c_j x_j; a bare number is the constant case.
struct Affine {
    double c0 = 0;
    std::vector<double> slope;

    static Affine parse(const Json& j, int dim) {
        if (j.is_number()) return {j.get<double>(), std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
        if (!j.is_array() || static_cast<int>(j.size()) != dim + 1)
            throw Error("affine entry must be a number or [c0, c1, ..., c" + std::to_string(dim) + "]");
        Affine a{j[0].get<double>(), {}};
        for (int k = 1; k <= dim; ++k) a.slope.push_back(j[static_cast<std::size_t>(k)].get<double>());
        return a;
    }
    double operator()(const Point& p) const {
        double v = c0;
        for (std::size_t k = 0; k < slope.size(); ++k) v += slope[k] * p[static_cast<Eigen::Index>(k)];
        return v;
    }
};

/// Affine matrix or vector entries, kept as value + Σ x_j slope_j.
template <class Value>
struct AffineValue {
    Value base;
    std::vector<Value> slope;

    Value operator()(const Point& p) const {
        Value v = base;
        for (std::size_t k = 0; k < slope.size(); ++k) v += p[static_cast<Eigen::Index>(k)] * slope[k];
        return v;
    }
};

inline AffineValue<Vec> affine_vec(const Json& j, int dim, int rank) {
    if (!j.is_array() || static_cast<int>(j.size()) != rank) throw Error("vector value must have rank entries");
    AffineValue<Vec> out{Vec::Zero(rank), std::vector<Vec>(static_cast<std::size_t>(dim), Vec::Zero(rank))};
    for (int i = 0; i < rank; ++i) {
        const auto a = Affine::parse(j[static_cast<std::size_t>(i)], dim);
        out.base[i] = a.c0;
        for (int k = 0; k < dim; ++k) out.slope[static_cast<std::size_t>(k)][i] = a.slope[static_cast<std::size_t>(k)];
    }
    return out;
}

inline AffineValue<Mat> affine_mat(const Json& j, int dim, int rank) {
    if (!j.is_array() || static_cast<int>(j.size()) != rank) throw Error("matrix value must have rank rows");
    AffineValue<Mat> out{Mat::Zero(rank, rank), std::vector<Mat>(static_cast<std::size_t>(dim), Mat::Zero(rank, rank))};
    for (int i = 0; i < rank; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != rank) throw Error("matrix rows must have rank entries");
        for (int c = 0; c < rank; ++c) {
            const auto a = Affine::parse(row[static_cast<std::size_t>(c)], dim);
            out.base(i, c) = a.c0;
            for (int k = 0; k < dim; ++k) out.slope[static_cast<std::size_t>(k)](i, c) = a.slope[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

template <class Value>
AffineValue<Value> affine_value(const Json& j, int dim, int rank) {
    if constexpr (std::is_same_v<Value, Vec>) return affine_vec(j, dim, rank);
    else return affine_mat(j, dim, rank);
}

inline int required_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw Error(std::string("missing integer field '") + key + "'");
    return j[key].get<int>();
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// Meshes: { "positions": [[x,y,z],...], "simplices": { "2": [[i,j,k],...], ... } }

inline Json mesh_to_json(const SimplicialComplex& c) {
    Json j;
    j["positions"] = Json::array();
    for (const auto& p : c.positions()) j["positions"].push_back(detail::to_json(Vec(p)));
    Json simplices = Json::object();
    for (int d = 0; d <= c.max_dim(); ++d) {
        Json level = Json::array();
        for (const auto& s : c.simplices(d))
            if (c.cofaces(s).empty()) {
                Json ids = Json::array();
                for (auto v : s) ids.push_back(index_of(v));
                level.push_back(ids);
            }
        if (!level.empty()) simplices[std::to_string(d)] = level;
    }
    j["simplices"] = simplices;
    return j;
}

inline SimplicialComplex mesh_from_json(const Json& j) {
    if (!j.contains("positions") || !j.contains("simplices")) throw Error("mesh needs 'positions' and 'simplices'");
    std::vector<Point> positions;
    for (const auto& p : j["positions"]) positions.push_back(detail::vec_from_json(p));
    std::vector<Simplex> top;
    for (const auto& [dim, list] : j["simplices"].items())
        for (const auto& ids : list) {
            std::vector<VertexId> vs;
            for (const auto& i : ids) vs.push_back(vertex(i.get<std::uint32_t>()));
            if (static_cast<int>(vs.size()) != std::stoi(dim) + 1)
                throw Error("simplex listed under dimension " + dim + " has " + std::to_string(vs.size()) + " vertices");
            top.emplace_back(std::move(vs));
        }
    return {std::move(positions), top};
}

// ---------------------------------------------------------------------------------------------
// Discrete connections: { "rank": r, "edges": { "i-j": [[...]], ... } }, keys i < j.

inline Json connection_to_json(const DiscreteConnection& dc) {
    Json j;
    j["rank"] = dc.rank();
    j["edges"] = Json::object();
    for (const auto& [k, m] : dc.edges())
        j["edges"][std::to_string(index_of(k.first)) + "-" + std::to_string(index_of(k.second))] = detail::to_json(m);
    return j;
}

/// Keys may name either orientation; "j-i" supplies R_ji and the stored R_ij is its inverse.
inline DiscreteConnection connection_from_json(const Json& j) {
    const int rank = detail::required_int(j, "rank");
    std::map<DiscreteConnection::EdgeKey, Mat> edges;
    for (const auto& [key, m] : j.at("edges").items()) {
        const Simplex e = detail::simplex_from_key(key);
        if (e.dim() != 1) throw Error("edge key '" + key + "' must name two vertices");
        edges[{e[0], e[1]}] = detail::mat_from_json(m);
    }
    return {rank, edges};
}

// ---------------------------------------------------------------------------------------------
// Stored discrete forms, keyed by canonical simplex.

inline Json form_to_json(const DiscreteVectorForm& f) {
    Json j;
    j["kind"] = "vector";
    j["degree"] = f.degree();
    j["rank"] = f.rank();
    j["values"] = Json::object();
    for (const auto& [s, e] : f.values()) {
        Json entry;
        entry["anchor"] = index_of(e.anchor);
        entry["value"] = detail::to_json(e.value);
        for (const auto& [v, x] : e.corners) entry["corners"][std::to_string(index_of(v))] = detail::to_json(x);
        j["values"][detail::simplex_key(s)] = entry;
    }
    return j;
}

inline Json form_to_json(const DiscreteHomForm& f) {
    Json j;
    j["kind"] = "endomorphism";
    j["degree"] = f.degree();
    j["rank"] = f.rank();
    j["values"] = Json::object();
    for (const auto& [s, e] : f.values()) {
        Json entry;
        entry["eval"] = index_of(e.eval);
        entry["cut"] = index_of(e.cut);
        entry["value"] = detail::to_json(e.value);
        for (const auto& [vw, x] : e.prongs)
            entry["prongs"][std::to_string(index_of(vw.first)) + "-" + std::to_string(index_of(vw.second))] =
                detail::to_json(x);
        j["values"][detail::simplex_key(s)] = entry;
    }
    return j;
}

inline DiscreteVectorForm vector_form_from_json(const Json& j) {
    DiscreteVectorForm f(detail::required_int(j, "degree"), detail::required_int(j, "rank"));
    for (const auto& [key, entry] : j.at("values").items()) {
        const Simplex s = detail::simplex_from_key(key).canonical();
        f.set(s, vertex(entry.at("anchor").get<std::uint32_t>()), detail::vec_from_json(entry.at("value")));
        if (entry.contains("corners"))
            for (const auto& [v, x] : entry["corners"].items())
                f.set_corner(s, vertex(static_cast<std::uint32_t>(std::stoul(v))), detail::vec_from_json(x));
    }
    return f;
}

inline DiscreteHomForm hom_form_from_json(const Json& j) {
    DiscreteHomForm f(detail::required_int(j, "degree"), detail::required_int(j, "rank"));
    for (const auto& [key, entry] : j.at("values").items()) {
        const Simplex s = detail::simplex_from_key(key).canonical();
        f.set(s, vertex(entry.at("eval").get<std::uint32_t>()), vertex(entry.at("cut").get<std::uint32_t>()),
              detail::mat_from_json(entry.at("value")));
        if (entry.contains("prongs"))
            for (const auto& [vw, x] : entry["prongs"].items()) {
                // "v-w" may repeat a vertex, so it is not a simplex key
                const auto dash = vw.find('-');
                if (dash == std::string::npos) throw Error("prong key '" + vw + "' must be 'v-w'");
                f.set_prongs(s, vertex(static_cast<std::uint32_t>(std::stoul(vw.substr(0, dash)))),
                             vertex(static_cast<std::uint32_t>(std::stoul(vw.substr(dash + 1)))), detail::mat_from_json(x));
            }
    }
    return f;
}

// ---------------------------------------------------------------------------------------------
// Smooth fields with affine coefficients.
//   connection: { "type": "connection", "dim": n, "rank": r, "coefficients": [A_0, ..., A_{n-1}] }
//   forms:      { "type": "vector-form" | "endomorphism-form", "dim": n, "rank": r, "degree": l,
//                 "components": [ { "axes": [i, ...], "value": ... }, ... ] }
// Every entry is a number or [c0, c1, ..., cn] meaning c0 + Σ c_j x_j. Derivatives are exact.

inline SmoothConnection connection_field_from_json(const Json& j) {
    const int dim = detail::required_int(j, "dim"), rank = detail::required_int(j, "rank");
    const Json& coeffs = j.at("coefficients");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != dim) throw Error("connection needs dim coefficient matrices");
    std::vector<detail::AffineValue<Mat>> a;
    for (const auto& m : coeffs) a.push_back(detail::affine_mat(m, dim, rank));
    return {dim, rank,
            [a](const Point& p) {
                std::vector<Mat> out;
                for (const auto& ai : a) out.push_back(ai(p));
                return out;
            },
            [a, dim](const Point&) {
                std::vector<Mat> jac;
                for (int i = 0; i < dim; ++i)
                    for (int k = 0; k < dim; ++k) jac.push_back(a[static_cast<std::size_t>(i)].slope[static_cast<std::size_t>(k)]);
                return jac;
            }};
}

template <class Value>
SmoothForm<Value> form_field_from_json(const Json& j) {
    const int dim = detail::required_int(j, "dim"), rank = detail::required_int(j, "rank");
    const int degree = detail::required_int(j, "degree");
    std::vector<Component<Value>> parts, derivative;
    for (const auto& c : j.at("components")) {
        const auto axes = c.at("axes").get<std::vector<int>>();
        for (int a : axes)
            if (a < 0 || a >= dim) throw Error("component axis out of range");
        const auto value = detail::affine_value<Value>(c.at("value"), dim, rank);
        parts.push_back({axes, [value](const Point& p) { return value(p); }});
        // d(f dx_I) = Σ_k ∂_k f dx_k ∧ dx_I
        for (int k = 0; k < dim; ++k) {
            std::vector<int> ax{k};
            ax.insert(ax.end(), axes.begin(), axes.end());
            const Value s = value.slope[static_cast<std::size_t>(k)];
            derivative.push_back({ax, [s](const Point&) { return s; }});
        }
    }
    auto f = coefficient_form<Value>(dim, degree, rank, std::move(parts));
    return f.with_derivative(coefficient_form<Value>(dim, degree + 1, rank, std::move(derivative)));
}

/// Builtin name or inline affine field.
inline Builtin field_from_json(const Json& j) {
    if (j.is_string()) return builtin(j.get<std::string>());
    const auto type = j.value("type", std::string{});
    if (type == "connection") return connection_field_from_json(j);
    if (type == "vector-form") return form_field_from_json<Vec>(j);
    if (type == "endomorphism-form") return form_field_from_json<Mat>(j);
    throw Error("field type must be connection, vector-form or endomorphism-form");
}

// ---------------------------------------------------------------------------------------------
// Experiment specs. Optional "base" starts from a built-in experiment; every other field overrides.

namespace detail {

inline std::string to_string(DiscretizationMode m) {
    switch (m) {
    case DiscretizationMode::vertex: return "vertex";
    case DiscretizationMode::barycenter: return "barycenter";
    case DiscretizationMode::coordinate: return "coordinate";
    }
    return "?";
}

inline DiscretizationMode parse_mode(const std::string& s) {
    if (s == "vertex") return DiscretizationMode::vertex;
    if (s == "barycenter") return DiscretizationMode::barycenter;
    if (s == "coordinate") return DiscretizationMode::coordinate;
    throw Error("mode must be vertex, barycenter or coordinate");
}

inline Json bound_to_json(double b) { return std::isfinite(b) ? Json(b) : Json(nullptr); }

} // namespace detail

inline ExperimentSpec experiment_from_json(const Json& j) {
    ExperimentSpec spec;
    // The base's series for the requested operator supplies the default band.
    if (j.contains("base"))
        spec = builtin_experiment(j["base"].get<std::string>(),
                                  j.contains("operator") ? std::optional(parse_operator(j["operator"].get<std::string>()))
                                                         : std::nullopt);
    if (j.contains("name")) spec.name = j["name"].get<std::string>();
    if (j.contains("connection")) {
        auto b = field_from_json(j["connection"]);
        auto* conn = std::get_if<SmoothConnection>(&b);
        if (!conn) throw Error("'connection' must describe a connection");
        spec.connection = *conn;
        spec.connection_label = j["connection"].is_string() ? j["connection"].get<std::string>() : "custom";
    }
    if (j.contains("form")) {
        if (j["form"].is_null()) {
            spec.form.reset();
            spec.form_label.clear();
        } else {
            auto b = field_from_json(j["form"]);
            if (auto* v = std::get_if<SmoothVectorForm>(&b)) spec.form = *v;
            else if (auto* h = std::get_if<SmoothHomForm>(&b)) spec.form = *h;
            else throw Error("'form' must describe a form");
            spec.form_label = j["form"].is_string() ? j["form"].get<std::string>() : "custom";
        }
    }
    if (j.contains("simplex")) {
        const Json& s = j["simplex"];
        if (s == "triangle") spec.simplex = triangle_template();
        else if (s == "tetrahedron") spec.simplex = tetrahedron_template();
        else if (s.is_array()) {
            spec.simplex.clear();
            for (const auto& p : s) spec.simplex.push_back(detail::vec_from_json(p));
        } else throw Error("'simplex' must be triangle, tetrahedron or a list of points");
    }
    if (j.contains("shift")) spec.shift = detail::vec_from_json(j["shift"]);
    if (j.contains("euler_degrees")) spec.euler_degrees = detail::vec_from_json(j["euler_degrees"]);
    if (j.contains("euler")) {
        const auto e = j["euler"].get<std::string>();
        if (e == "extrinsic") spec.euler = EulerConvention::extrinsic;
        else if (e == "intrinsic") spec.euler = EulerConvention::intrinsic;
        else throw Error("'euler' must be extrinsic or intrinsic");
    }
    if (j.contains("levels")) spec.levels = j["levels"].get<int>();
    if (j.contains("factor")) spec.factor = j["factor"].get<double>();
    if (j.contains("path_steps")) spec.path_steps = j["path_steps"].get<int>();
    if (j.contains("operator")) spec.op = parse_operator(j["operator"].get<std::string>());
    if (j.contains("mode")) spec.mode = detail::parse_mode(j["mode"].get<std::string>());
    if (j.contains("corners")) {
        const auto c = j["corners"].get<std::string>();
        if (c == "per-corner") spec.corners = CornerRecovery::per_corner;
        else if (c == "edge-transport") spec.corners = CornerRecovery::edge_transport;
        else throw Error("'corners' must be per-corner or edge-transport");
    }
    if (j.contains("error")) {
        const auto e = j["error"].get<std::string>();
        if (e == "relative") spec.error = ErrorKind::relative;
        else if (e == "absolute") spec.error = ErrorKind::absolute;
        else throw Error("'error' must be relative or absolute");
    }
    if (j.contains("band")) {
        const Json& b = j["band"];
        if (!b.is_array() || b.size() != 2) throw Error("'band' must be [lo, hi]; null means unbounded");
        spec.band = SlopeBand{};
        if (!b[0].is_null()) spec.band.lo = b[0].get<double>();
        if (!b[1].is_null()) spec.band.hi = b[1].get<double>();
    }
    if (spec.simplex.size() < 2) throw Error("experiment spec needs a simplex");
    if (spec.levels < 3) throw Error("experiment needs at least 3 levels");
    if (!(spec.factor > 0 && spec.factor < 1)) throw Error("scale factor must lie in (0, 1)");
    if (spec.path_steps < 1) throw Error("path steps must be positive");
    return spec;
}

/// Fields that round-trip through experiment_from_json; fields are written by label.
inline Json experiment_to_json(const ExperimentSpec& spec) {
    Json j;
    j["name"] = spec.name;
    j["connection"] = spec.connection_label;
    j["form"] = spec.form ? Json(spec.form_label) : Json(nullptr);
    j["simplex"] = Json::array();
    for (const auto& p : spec.simplex) j["simplex"].push_back(detail::to_json(Vec(p)));
    j["shift"] = detail::to_json(Vec(spec.shift));
    j["euler_degrees"] = detail::to_json(Vec(spec.euler_degrees));
    j["euler"] = spec.euler == EulerConvention::extrinsic ? "extrinsic" : "intrinsic";
    j["levels"] = spec.levels;
    j["factor"] = spec.factor;
    j["path_steps"] = spec.path_steps;
    j["operator"] = to_string(spec.op);
    j["mode"] = detail::to_string(spec.mode);
    j["corners"] = spec.corners == CornerRecovery::per_corner ? "per-corner" : "edge-transport";
    j["error"] = spec.error == ErrorKind::relative ? "relative" : "absolute";
    j["band"] = Json::array({detail::bound_to_json(spec.band.lo), detail::bound_to_json(spec.band.hi)});
    return j;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

} // namespace covex
