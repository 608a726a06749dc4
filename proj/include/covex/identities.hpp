#pragma once

#include "covex/harness.hpp"

#include <cstdint>

namespace covex {

/// Worst case of one exact identity across all trials. A residual r passes when
/// r <= tolerance * scale, with scale = (1 + M)^k (1 + A): M the largest spectral norm of an edge
/// matrix or its inverse, A the largest form value norm and k the longest product of edge matrices
/// in the identity. This is the forward error bound of the products, up to a modest constant.
struct IdentityCheck {
    std::string name;
    double max_residual = 0;
    double worst_ratio = 0; ///< max of residual / scale
    int evaluations = 0;
    int first_failing_trial = -1;
};

struct IdentityOptions {
    double tolerance = 1e-12;
    bool flat = false;         ///< every edge matrix is the identity
    bool corrupt_edge = false; ///< one stored edge loses consistency with its inverse
};

struct IdentityReport {
    std::uint64_t seed = 0;
    int trials = 0;
    double tolerance = 0;
    std::vector<IdentityCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.first_failing_trial < 0; });
    }
    std::vector<std::string> violated() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (c.first_failing_trial >= 0) out.push_back(c.name);
        return out;
    }
    const IdentityCheck& check(std::string_view name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw Error("no identity named '" + std::string(name) + "'");
    }
};

namespace detail {

class IdentityRecorder {
public:
    IdentityRecorder(double tolerance) : tolerance_(tolerance) {}

    void record(const std::string& name, int trial, double residual, double scale) {
        auto& c = find(name);
        ++c.evaluations;
        c.max_residual = std::max(c.max_residual, residual);
        const double ratio = residual / scale;
        c.worst_ratio = std::max(c.worst_ratio, ratio);
        if (!(ratio <= tolerance_) && c.first_failing_trial < 0) c.first_failing_trial = trial;
    }

    std::vector<IdentityCheck> take() { return std::move(checks_); }

private:
    IdentityCheck& find(const std::string& name) {
        for (auto& c : checks_)
            if (c.name == name) return c;
        checks_.push_back({name});
        return checks_.back();
    }

    double tolerance_;
    std::vector<IdentityCheck> checks_;
};

inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    return std::mt19937_64(seq);
}

inline std::vector<Simplex> orderings(const Simplex& s) {
    std::vector<Simplex> out;
    for_each_permutation(s, [&](const Simplex& p, int) { out.push_back(p); });
    return out;
}

} // namespace detail

/// Random complexes and edge matrices (GL(3) on even trials, SO(3) on odd ones) checked against every
/// identity the discrete calculus satisfies exactly.
inline IdentityReport identity_suite(std::uint64_t seed, int trials, const IdentityOptions& options = {}) {
    if (trials < 1) throw Error("identity suite needs at least one trial");
    constexpr int rank = 3;
    detail::IdentityRecorder rec(options.tolerance);

    for (int trial = 0; trial < trials; ++trial) {
        auto rng = detail::trial_rng(seed, trial);

        // A tetrahedron on four random labels out of eight, listed in random order.
        std::vector<std::uint32_t> labels(8);
        std::iota(labels.begin(), labels.end(), 0u);
        std::shuffle(labels.begin(), labels.end(), rng);
        const Simplex tet{labels[0], labels[1], labels[2], labels[3]};
        std::vector<Point> positions;
        for (int i = 0; i < 8; ++i) positions.push_back(random_vec(rng, 3));
        const SimplicialComplex c(positions, {tet});

        std::map<DiscreteConnection::EdgeKey, Mat> edges;
        for (const auto& e : c.simplices(1))
            edges[{e[0], e[1]}] = options.flat ? Mat(Mat::Identity(rank, rank))
                                  : trial % 2 == 0 ? random_gl(rng, rank)
                                                   : random_so3(rng);
        DiscreteConnection dc(rank, edges);
        if (options.corrupt_edge) {
            auto pairs = dc.edge_pairs();
            pairs.begin()->second.first(0, 0) += 1e-6;
            dc = DiscreteConnection::unchecked(rank, pairs);
        }

        double m = 0;
        const auto spectral = [](const Mat& a) { return Eigen::JacobiSVD<Mat>(a).singularValues()[0]; };
        for (const auto& [k, p] : dc.edge_pairs()) m = std::max({m, spectral(p.first), spectral(p.second)});
        const auto scale = [m](int k, double a = 0.0) { return std::pow(1.0 + m, k) * (1.0 + a); };

        // Random forms; vector forms carry independent corner values.
        auto random_vector_form = [&](int degree) {
            DiscreteVectorForm f(degree, rank);
            for (const auto& s : c.simplices(degree)) {
                f.set(s, s.front(), random_vec(rng, rank));
                for (auto v : s)
                    if (v != s.front()) f.set_corner(s, v, random_vec(rng, rank));
            }
            return f;
        };
        const DiscreteVectorForm a0 = random_vector_form(0), a1 = random_vector_form(1);
        // Naturality needs corners that agree with transport: one value per edge.
        DiscreteVectorForm consistent(1, rank);
        for (const auto& s : c.simplices(1)) consistent.set(s, s.front(), random_vec(rng, rank));
        DiscreteHomForm b1(1, rank);
        for (const auto& s : c.simplices(1)) b1.set(s, s.front(), s.back(), random_mat(rng, rank));
        double amax = 0;
        for (const DiscreteVectorForm* f : {&a0, &a1, static_cast<const DiscreteVectorForm*>(&consistent)})
            for (const auto& [s, e] : f->values()) {
                amax = std::max(amax, e.value.norm());
                for (const auto& [v, x] : e.corners) amax = std::max(amax, x.norm());
            }
        for (const auto& [s, e] : b1.values()) amax = std::max(amax, e.value.norm());
        const VectorCochain v0 = view(a0, dc), v1 = view(a1, dc), vc = view(consistent, dc);
        const HomCochain h1 = view(b1, dc);
        const HomCochain omega = curvature_cochain(dc);
        const Mat id = Mat::Identity(rank, rank);

        for (const auto& [k, p] : dc.edge_pairs())
            rec.record("transport-inverse", trial, (p.first * p.second - id).norm(), scale(2));

        const auto tet_orders = detail::orderings(tet);
        for (const auto& s : tet_orders) {
            // Differential Bianchi: both derivatives of the curvature vanish.
            rec.record("sided-derivative-of-curvature", trial, sided_derivative(dc, omega, s, s.front(), s.back()).norm(),
                       scale(3));
            rec.record("derivative-of-curvature", trial, covariant_derivative(dc, omega, s, s.front(), s.back()).norm(),
                       scale(6));
            // Second sided derivative is the curvature acting on the form.
            const auto [left, right] = sided_second_derivative_identity(dc, v1, s);
            rec.record("sided-second-derivative-1-form", trial, (left - right).norm(), scale(2, amax));
        }

        for (const auto& tri : c.simplices(2)) {
            for (const auto& s : detail::orderings(tri)) {
                const auto [left, right] = sided_second_derivative_identity(dc, v0, s);
                rec.record("sided-second-derivative-0-form", trial, (left - right).norm(), scale(2, amax));
                rec.record("connection-derivative-is-curvature", trial,
                           (connection_derivative(dc, s) - curvature(dc, s, s.front(), s.back())).norm(), scale(5));
                // The endomorphism alternation is read at (first, last) of the ordering.
                rec.record("curvature-alternation-fixed", trial,
                           (alternation(dc, omega, s, s.front(), s.back()) - curvature(dc, s, s.front(), s.back())).norm(),
                           scale(5));
                for (auto e : s)
                    for (auto x : s)
                        // Reordering the triangle only flips the sign.
                        rec.record("curvature-antisymmetry", trial,
                                   (curvature(dc, s, e, x) - s.parity() * tri.parity() * curvature(dc, tri, e, x)).norm(),
                                   scale(2));
                for (auto e : s) {
                    rec.record("derivative-antisymmetry-vector", trial,
                               (covariant_derivative(dc, v1, s, e) -
                                s.parity() * tri.parity() * covariant_derivative(dc, v1, tri, e))
                                   .norm(),
                               scale(2, amax));
                    // Odd and even orderings take different prong transports, so only even
                    // reorderings leave the endomorphism derivative unchanged.
                    if (s.parity() == tri.parity())
                        rec.record("derivative-even-reordering-endomorphism", trial,
                                   (covariant_derivative(dc, h1, s, e, s.back()) -
                                    covariant_derivative(dc, h1, tri, e, s.back()))
                                       .norm(),
                                   scale(5, amax));
                }
            }
        }

        // Curvatures of the two triangles of a quad add up to the quad's cell curvature.
        {
            const VertexId a = tet[0], b = tet[1], x = tet[2], d = tet[3];
            const std::vector<VertexId> long_path{a, b, x, d}, short_path{a, d};
            const Mat sum = curvature(dc, Simplex{index_of(a), index_of(b), index_of(x)}, a, x) * dc(x, d) +
                            curvature(dc, Simplex{index_of(a), index_of(x), index_of(d)}, a, d);
            rec.record("curvature-summability", trial, (sum - curvature_cell(dc, long_path, short_path)).norm(),
                       scale(3));
        }

        // Pullback along a random vertex map, possibly collapsing, commutes with both derivatives.
        {
            std::map<VertexId, VertexId> table;
            std::uniform_int_distribution<int> pick(0, 3);
            std::vector<Point> src_positions;
            for (std::uint32_t i = 0; i < 4; ++i) {
                table[vertex(i)] = tet[static_cast<std::size_t>(pick(rng))];
                src_positions.push_back(random_vec(rng, 3));
            }
            const SimplicialMap f(table);
            const SimplicialComplex source(src_positions, {Simplex{0, 1, 2, 3}});
            const DiscreteConnection pulled_dc = pullback_connection(f, dc, source);
            const VectorCochain pulled = view(pullback_vector(f, consistent, dc, source), pulled_dc);
            for (const auto& tri : source.simplices(2)) {
                const auto img = apply_map(f, tri);
                Vec want_sided = Vec::Zero(rank), want_full = Vec::Zero(rank);
                if (img) {
                    want_sided = sided_derivative(dc, vc, *img, img->front());
                    want_full = covariant_derivative(dc, vc, *img, img->front());
                }
                rec.record("pullback-sided-derivative", trial,
                           (sided_derivative(pulled_dc, pulled, tri, tri.front()) - want_sided).norm(),
                           scale(1, amax));
                rec.record("pullback-derivative", trial,
                           (covariant_derivative(pulled_dc, pulled, tri, tri.front()) - want_full).norm(),
                           scale(2, amax));
            }
        }
    }
    return {seed, trials, options.tolerance, rec.take()};
}

inline void print_report(std::ostream& out, const IdentityReport& r) {
    out << "identity suite: seed " << r.seed << ", " << r.trials << " trials, tolerance " << r.tolerance << "\n";
    out << std::scientific << std::setprecision(3);
    for (const auto& c : r.checks) {
        out << (c.first_failing_trial < 0 ? "  ok    " : "  FAIL  ") << c.name << "  max residual " << c.max_residual
            << "  worst ratio " << c.worst_ratio << "  (" << c.evaluations << " checks)";
        if (c.first_failing_trial >= 0) out << "  first failure in trial " << c.first_failing_trial;
        out << "\n";
    }
    out << std::defaultfloat;
    if (!r.passed()) out << "reproduce with: identities --seed " << r.seed << " --trials " << r.trials << "\n";
}

} // namespace covex
