#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace covex;

namespace {

const VertexId a = vertex(0), b = vertex(1), c = vertex(2), d = vertex(3);

SimplicialComplex tet_complex() {
    return {{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)},
            {Simplex{0, 1, 2, 3}}};
}

DiscreteConnection random_connection(const SimplicialComplex& cx, std::mt19937_64& rng, bool rotations = false) {
    std::map<DiscreteConnection::EdgeKey, Mat> e;
    for (const auto& s : cx.simplices(1)) e[{s[0], s[1]}] = rotations ? random_so3(rng) : random_gl(rng, 3);
    return {3, e};
}

/// Independent random values at every corner of every simplex of the given degree.
DiscreteVectorForm random_form(const SimplicialComplex& cx, int degree, std::mt19937_64& rng) {
    DiscreteVectorForm f(degree, 3);
    for (const auto& s : cx.simplices(degree)) {
        f.set(s, s.front(), random_vec(rng, 3));
        for (auto v : s)
            if (v != s.front()) f.set_corner(s, v, random_vec(rng, 3));
    }
    return f;
}

Simplex S(std::initializer_list<std::uint32_t> ids) { return Simplex(ids); }

} // namespace

TEST(Curvature, DisplayedBoundaryPaths) {
    std::mt19937_64 rng(21);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const Mat id = Mat::Identity(3, 3);
    EXPECT_EQ(curvature(dc, S({0, 1, 2}), a, c), Mat(dc(a, b) * dc(b, c) - dc(a, c)));
    EXPECT_EQ(curvature(dc, S({0, 1, 2}), a, b), Mat(dc(a, b) - dc(a, c) * dc(c, b)));
    EXPECT_EQ(curvature(dc, S({0, 1, 2}), a, a), Mat(dc(a, b) * dc(b, c) * dc(c, a) - id));
    // Eval b: the orientation is rotated to [b, c, a].
    EXPECT_EQ(curvature(dc, S({0, 1, 2}), b, a), Mat(dc(b, c) * dc(c, a) - dc(b, a)));
    // An odd ordering flips the sign.
    EXPECT_EQ(curvature(dc, S({1, 0, 2}), a, c), Mat(-(dc(a, b) * dc(b, c) - dc(a, c))));
    EXPECT_THROW(curvature(dc, S({0, 1}), a, b), Error);
    EXPECT_THROW(curvature(dc, S({0, 1, 2}), a, d), Error);
}

TEST(Curvature, ZeroForPathIndependentTransport) {
    // Edges R_ij = G_i G_j^{-1} from vertex gauges have trivial holonomy.
    std::mt19937_64 rng(22);
    std::vector<Mat> g;
    for (int i = 0; i < 4; ++i) g.push_back(random_gl(rng, 3));
    std::map<DiscreteConnection::EdgeKey, Mat> e;
    for (const auto& s : tet_complex().simplices(1)) e[{s[0], s[1]}] = g[index_of(s[0])] * g[index_of(s[1])].inverse();
    const DiscreteConnection dc(3, e);
    for (auto cut : {a, b, c}) EXPECT_LT(curvature(dc, S({0, 1, 2}), a, cut).norm(), 1e-12);
}

TEST(VectorDerivative, SidedOnEdgeAndTriangle) {
    std::mt19937_64 rng(23);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const auto z = view(random_form(cx, 0, rng), dc);
    EXPECT_EQ(sided_derivative(dc, z, S({0, 1}), a), Vec(dc(a, b) * z(S({1}), b) - z(S({0}), a)));
    const auto alpha = view(random_form(cx, 1, rng), dc);
    const Vec want = dc(a, b) * alpha(S({1, 2}), b) - alpha(S({0, 2}), a) + alpha(S({0, 1}), a);
    EXPECT_LT((sided_derivative(dc, alpha, S({0, 1, 2}), a) - want).norm(), 1e-14 * (1 + want.norm()));
    EXPECT_THROW(sided_derivative(dc, alpha, S({0, 1, 2}), b), Error);
    EXPECT_THROW(sided_derivative(dc, alpha, S({0, 1}), a), Error);
}

TEST(VectorDerivative, AlternationOnEdge) {
    std::mt19937_64 rng(24);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const auto alpha = view(random_form(cx, 1, rng), dc);
    const Vec want = 0.5 * (alpha(S({0, 1}), a) - dc(a, b) * alpha(S({1, 0}), b));
    EXPECT_LT((alternation(dc, alpha, S({0, 1}), a) - want).norm(), 1e-15 * (1 + want.norm()));
}

TEST(VectorDerivative, ConnectionColumnsAreStableUnderAlternation) {
    std::mt19937_64 rng(25);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    for (int j = 0; j < 3; ++j) {
        const VectorCochain col(1, 3, [dc, j](const Simplex& s, VertexId v) -> Vec {
            if (v != s.front()) throw Error("read at the tail");
            return connection_one_form(dc, s[0], s[1]).col(j);
        });
        const Vec want = connection_one_form(dc, a, d).col(j);
        EXPECT_LT((alternation(dc, col, S({0, 3}), a) - want).norm(), 1e-14);
    }
}

TEST(VectorDerivative, ReducedAlternationsAverageToFull) {
    std::mt19937_64 rng(26);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const auto alpha = view(random_form(cx, 2, rng), dc);
    for (auto v : {a, b, c}) {
        const Vec even = reduced_alternation(dc, alpha, S({0, 1, 2}), v, Parity::even);
        const Vec odd = reduced_alternation(dc, alpha, S({0, 1, 2}), v, Parity::odd);
        const Vec full = alternation(dc, alpha, S({0, 1, 2}), v);
        EXPECT_LT((0.5 * (even + odd) - full).norm(), 1e-14 * (1 + full.norm()));
    }
}

TEST(VectorDerivative, AlternationIsNotAProjector) {
    std::mt19937_64 rng(27);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng, true);
    const auto alpha = view(random_form(cx, 2, rng), dc);
    const auto once = alternation(dc, alpha);
    const Vec x = once(S({0, 1, 2}), a), y = alternation(dc, once, S({0, 1, 2}), a);
    EXPECT_GT((x - y).norm(), 1e-3 * x.norm());
}

TEST(VectorDerivative, FullDerivativeIsAntisymmetricWithFixedFiber) {
    std::mt19937_64 rng(28);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const auto alpha = view(random_form(cx, 1, rng), dc);
    const Vec base = covariant_derivative(dc, alpha, S({0, 1, 2}), b);
    for_each_permutation(S({0, 1, 2}), [&](const Simplex& p, int sign) {
        EXPECT_LT((covariant_derivative(dc, alpha, p, b) - static_cast<double>(sign) * base).norm(), 1e-13 * (1 + base.norm())) << p;
    });
}

TEST(VectorDerivative, SecondDerivativeOfZeroFormMatchesSixTermExpansion) {
    std::mt19937_64 rng(29);
    const auto cx = tet_complex();
    for (int trial = 0; trial < 20; ++trial) {
        const auto dc = random_connection(cx, rng, true);
        const auto stored = random_form(cx, 0, rng);
        const auto z = view(stored, dc);
        const Vec want = oracle::dd_zero_form(dc, a, b, c, z(S({0}), a), z(S({1}), b), z(S({2}), c));
        EXPECT_LT((curvature_wedge(dc, z, S({0, 1, 2}), a) - want).norm(), 1e-13);
    }
}

TEST(VectorDerivative, ExplicitWedgeVanishesWhenFlat) {
    const auto cx = tet_complex();
    const auto dc = from_smooth(cx, flat_connection(3, 3), 4);
    std::mt19937_64 rng(30);
    const auto alpha = view(random_form(cx, 1, rng), dc);
    EXPECT_EQ(curvature_wedge_explicit(dc, alpha, S({0, 1, 2, 3})), Vec(Vec::Zero(3)));
}

TEST(HomDerivative, SidedMatchesExpansion) {
    std::mt19937_64 rng(31);
    const auto cx = tet_complex();
    const auto dc = random_connection(cx, rng);
    const oracle::RandomHomForm beta(cx, 1, rng);
    const Mat want = oracle::sided_hom_triangle(dc, a, b, c, beta);
    EXPECT_LT((sided_derivative(dc, beta.cochain(), S({0, 1, 2}), a, c) - want).norm(), 1e-14 * (1 + want.norm()));
    // Other prongs move by one edge on each side.
    EXPECT_LT((sided_derivative(dc, beta.cochain(), S({0, 1, 2}), b, a) - dc(b, a) * want * dc(c, a)).norm(),
              1e-13 * (1 + want.norm()));
}

TEST(HomDerivative, AlternationMatchesSixTermExpansion) {
    std::mt19937_64 rng(32);
    const auto cx = tet_complex();
    for (int trial = 0; trial < 10; ++trial) {
        const auto dc = random_connection(cx, rng);
        const oracle::RandomHomForm beta(cx, 2, rng);
        const Mat want = oracle::alt_hom_triangle(dc, a, b, c, beta);
        EXPECT_LT((alternation(dc, beta.cochain(), S({0, 1, 2}), a, c) - want).norm(), 1e-13);
    }
}

TEST(HomDerivative, CurvatureIsAFixedPointOfAlternation) {
    std::mt19937_64 rng(33);
    const auto dc = random_connection(tet_complex(), rng);
    const auto omega = curvature_cochain(dc);
    EXPECT_LT((alternation(dc, omega, S({0, 2, 3}), a, d) - curvature(dc, S({0, 2, 3}), a, d)).norm(), 1e-12);
}

TEST(HomDerivative, ConnectionDerivativeIsCurvature) {
    std::mt19937_64 rng(34);
    const auto dc = random_connection(tet_complex(), rng, true);
    EXPECT_LT((connection_derivative(dc, S({1, 2, 3})) - curvature(dc, S({1, 2, 3}), b, d)).norm(), 1e-13);
    EXPECT_LT((connection_derivative(dc, S({3, 1, 2})) - curvature(dc, S({3, 1, 2}), d, c)).norm(), 1e-13);
}

TEST(HomDerivative, DifferentialBianchi) {
    std::mt19937_64 rng(35);
    const auto dc = random_connection(tet_complex(), rng);
    const auto omega = curvature_cochain(dc);
    EXPECT_LT(sided_derivative(dc, omega, S({0, 1, 2, 3}), a, d).norm(), 1e-12);
    EXPECT_LT(covariant_derivative(dc, omega, S({0, 1, 2, 3}), a, d).norm(), 1e-11);
}

TEST(HomDerivative, HybridEqualsCurvatureAlongSampleRefinement) {
    const auto tri = place(triangle_template(), Eigen::Vector3d(2.4, -1.3, 2.9), Eigen::Vector3d(30, 45, 27));
    SimplicialComplex cx(tri, {S({0, 1, 2})});
    for (int level = 0; level < 5; ++level) {
        const auto dc = from_smooth(cx, sample_connection(), 64);
        const Mat omega = curvature(dc, S({0, 1, 2}), a, c);
        EXPECT_LT((connection_derivative(dc, S({0, 1, 2})) - omega).norm(), 1e-14);
        cx = scale_toward(cx, S({0, 1, 2}), a, 0.5);
    }
}

TEST(FlatConnection, OperatorsReduceToScalarCoboundaryBitwise) {
    const auto cx = oracle::strip20();
    const auto dc = from_smooth(cx, flat_connection(2, 3), 8);
    std::mt19937_64 rng(36);
    std::map<Simplex, Vec> z, w;
    DiscreteVectorForm z_form(0, 3), w_form(1, 3);
    for (const auto& s : cx.simplices(0)) z_form.set(s, s.front(), z[s] = random_vec(rng, 3));
    for (const auto& s : cx.simplices(1)) w_form.set(s, s.front(), w[s] = random_vec(rng, 3));
    const auto dz = oracle::coboundary(cx, 0, z), dw = oracle::coboundary(cx, 1, w), ddz = oracle::coboundary(cx, 1, dz);
    const auto vz = view(z_form, dc), vw = view(w_form, dc);
    for (const auto& [s, want] : dz) {
        EXPECT_EQ(sided_derivative(dc, vz, s, s.front()), want);
        EXPECT_EQ(covariant_derivative(dc, vz, s, s.back()), want);
    }
    for (const auto& [s, want] : dw) {
        for_each_permutation(s, [&](const Simplex& p, int sign) {
            EXPECT_EQ(sided_derivative(dc, vw, p, p.front()), Vec(static_cast<double>(sign) * want));
            EXPECT_EQ(covariant_derivative(dc, vw, p, p[1]), Vec(static_cast<double>(sign) * want));
        });
        EXPECT_EQ(curvature_wedge(dc, vz, s, s.front()), ddz.at(s));
        EXPECT_EQ(curvature(dc, s, s.front(), s.back()), Mat(Mat::Zero(3, 3)));
    }
}
