#include "covex/complex.hpp"
#include "covex/quadrature.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <random>
#include <set>

using namespace covex;

namespace {

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Mean of λ^a over the reference simplex: dim! Π a_i! / (dim + Σ a_i)!.
double monomial_mean(const std::vector<int>& a) {
    const int dim = static_cast<int>(a.size()) - 1;
    double num = factorial(dim);
    int total = 0;
    for (int e : a) {
        num *= factorial(e);
        total += e;
    }
    return num / factorial(dim + total);
}

double apply_rule(const QuadratureRule& rule, const std::vector<int>& a) {
    double acc = 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        double m = 1;
        for (std::size_t i = 0; i < a.size(); ++i) m *= std::pow(rule.nodes[q][static_cast<Eigen::Index>(i)], a[i]);
        acc += rule.weights[q] * m;
    }
    return acc;
}

/// Every exponent vector with dim+1 entries and total degree <= max.
std::vector<std::vector<int>> exponents(int dim, int max) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(static_cast<std::size_t>(dim) + 1, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i == e.size()) {
            out.push_back(e);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[i] = k;
            rec(i + 1, left - k);
        }
        e[i] = 0;
    };
    rec(0, max);
    return out;
}

void expect_exact_to(const QuadratureRule& rule, int degree) {
    for (const auto& a : exponents(rule.dim, degree)) {
        const double want = monomial_mean(a);
        EXPECT_NEAR(apply_rule(rule, a), want, 1e-14 * (1 + want)) << "dim " << rule.dim << " exponent sum "
                                                                    << std::accumulate(a.begin(), a.end(), 0);
    }
}

} // namespace

TEST(Simplex, ParityCountsInversions) {
    EXPECT_EQ((Simplex{0, 1, 2}).parity(), 1);
    EXPECT_EQ((Simplex{1, 0, 2}).parity(), -1);
    EXPECT_EQ((Simplex{1, 2, 0}).parity(), 1);
    EXPECT_EQ((Simplex{3, 2, 1, 0}).parity(), 1);
    EXPECT_EQ((Simplex{3, 1, 2, 0}).parity(), -1);
}

TEST(Simplex, RepeatedVerticesAreRejected) { EXPECT_THROW((Simplex{1, 2, 1}), Error); }

TEST(Simplex, BoundaryHasAlternatingSigns) {
    const auto faces = boundary(Simplex{4, 7, 9});
    ASSERT_EQ(faces.size(), 3u);
    EXPECT_EQ(faces[0], (SignedFace{Simplex{7, 9}, 1}));
    EXPECT_EQ(faces[1], (SignedFace{Simplex{4, 9}, -1}));
    EXPECT_EQ(faces[2], (SignedFace{Simplex{4, 7}, 1}));
    EXPECT_THROW(boundary(Simplex{3}), Error);
}

TEST(Simplex, BoundaryOfBoundaryCancels) {
    // Each codimension-2 face appears twice with opposite orientation.
    std::map<Simplex, int> count;
    for (const auto& [f, s] : boundary(Simplex{0, 1, 2, 3}))
        for (const auto& [g, t] : boundary(f)) count[g.canonical()] += s * t * g.parity();
    for (const auto& [g, c] : count) EXPECT_EQ(c, 0) << g;
}

TEST(Simplex, OrientationSign) {
    EXPECT_EQ(orientation_sign(Simplex{0, 1, 2}, Simplex{2, 0, 1}), 1);
    EXPECT_EQ(orientation_sign(Simplex{0, 1, 2}, Simplex{0, 2, 1}), -1);
    EXPECT_EQ(orientation_sign(Simplex{0, 1, 2}, Simplex{0, 1, 3}), 0);
}

TEST(Simplex, PermutationsCoverAllOrderingsWithParity) {
    int n = 0, sum = 0;
    std::set<Simplex> seen;
    for_each_permutation(Simplex{5, 2, 8, 1}, [&](const Simplex& p, int sign) {
        ++n;
        sum += sign;
        seen.insert(p);
        EXPECT_EQ(sign, orientation_sign(p, Simplex{5, 2, 8, 1}));
    });
    EXPECT_EQ(n, 24);
    EXPECT_EQ(sum, 0);
    EXPECT_EQ(seen.size(), 24u);
}

TEST(Simplex, LeadingMovesVertexToFrontWithSign) {
    const auto [s, sign] = Simplex{3, 5, 7, 9}.leading(vertex(7));
    EXPECT_EQ(s, (Simplex{7, 3, 5, 9}));
    EXPECT_EQ(sign, 1);
    EXPECT_EQ(sign, orientation_sign(s, Simplex{3, 5, 7, 9}));
    EXPECT_EQ(Simplex({3, 5, 7}).leading(vertex(5)).second, -1);
}

TEST(Complex, ClosedUnderFaces) {
    const SimplicialComplex c({Point::Zero(2), Point::Unit(2, 0), Point::Unit(2, 1), Point::Ones(2)},
                              {Simplex{0, 1, 2}, Simplex{1, 3, 2}});
    EXPECT_EQ(c.max_dim(), 2);
    EXPECT_EQ(c.simplices(0).size(), 4u);
    EXPECT_EQ(c.simplices(1).size(), 5u);
    EXPECT_EQ(c.simplices(2).size(), 2u);
    EXPECT_TRUE(c.contains(Simplex{2, 1}));
    EXPECT_FALSE(c.contains(Simplex{0, 3}));
    EXPECT_EQ(c.cofaces(Simplex{1, 2}).size(), 2u);
    for (int d = 0; d <= 2; ++d)
        for (const auto& s : c.simplices(d)) EXPECT_TRUE(s.is_canonical());
}

TEST(Complex, UnknownVertexIsAnError) {
    EXPECT_THROW(SimplicialComplex({Point::Zero(2)}, {Simplex{0, 1}}), Error);
}

TEST(Complex, ScaleTowardKeepsFixedVertexAndScalesEdges) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<Point> pos;
    for (int i = 0; i < 4; ++i) pos.push_back(Eigen::Vector3d(g(rng), g(rng), g(rng)));
    const SimplicialComplex c(pos, {Simplex{0, 1, 2, 3}});
    const Simplex tet{0, 1, 2, 3};
    const auto half = scale_toward(c, tet, vertex(2), 0.5);
    EXPECT_EQ(half.position(vertex(2)), c.position(vertex(2)));
    for (std::uint32_t i : {0u, 1u, 3u}) {
        const Vec before = c.position(vertex(i)) - c.position(vertex(2));
        const Vec after = half.position(vertex(i)) - half.position(vertex(2));
        EXPECT_NEAR((after - 0.5 * before).norm(), 0.0, 1e-15);
    }
    EXPECT_NEAR(diameter(half, tet), 0.5 * diameter(c, tet), 1e-15);
    // Factor one is the identity, bit for bit.
    const auto same = scale_toward(c, tet, vertex(0), 1.0);
    for (std::uint32_t i = 0; i < 4; ++i) EXPECT_EQ(same.position(vertex(i)), c.position(vertex(i)));
    EXPECT_THROW(scale_toward(c, tet, vertex(0), 0.0), Error);
    EXPECT_THROW(scale_toward(c, tet, vertex(0), 1.5), Error);
}

TEST(Complex, BarycenterAndDiameter) {
    const SimplicialComplex c({Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 0), Eigen::Vector2d(0, 4)}, {Simplex{0, 1, 2}});
    EXPECT_EQ(barycenter(c, Simplex{0, 1, 2}), Point(Eigen::Vector2d(1, 4.0 / 3.0)));
    EXPECT_DOUBLE_EQ(diameter(c, Simplex{0, 1, 2}), 5.0);
}

TEST(SimplicialMap, ImageKeepsOrderAndDetectsCollapse) {
    const SimplicialMap f{{0, 5}, {1, 3}, {2, 5}};
    EXPECT_EQ(apply_map(f, Simplex{1, 0}), (Simplex{3, 5}));
    EXPECT_FALSE(apply_map(f, Simplex{0, 1, 2}).has_value());
    EXPECT_THROW(f(vertex(9)), Error);
}

TEST(Quadrature, WeightsSumToOne) {
    for (int d = 0; d <= 3; ++d) {
        const auto r = default_rule(d);
        EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-15);
        for (const auto& n : r.nodes) {
            EXPECT_NEAR(n.sum(), 1.0, 1e-15);
            EXPECT_GE(n.minCoeff(), 0.0);
        }
    }
}

TEST(Quadrature, GaussLegendreExactToDegreeNine) { expect_exact_to(gauss_legendre5(), 9); }

TEST(Quadrature, TriangleRuleExactToDegreeFive) { expect_exact_to(triangle_degree5(), 5); }

TEST(Quadrature, TetrahedronRuleExactToDegreeFive) {
    const auto r = tetrahedron_degree5();
    for (double w : r.weights) EXPECT_GT(w, 0.0);
    expect_exact_to(r, 5);
}

TEST(Quadrature, DefaultRulesMissDegreeSix) {
    // Guards against the oracle being trivially satisfied.
    EXPECT_GT(std::abs(apply_rule(triangle_degree5(), {6, 0, 0}) - monomial_mean({6, 0, 0})), 1e-6);
    EXPECT_GT(std::abs(apply_rule(tetrahedron_degree5(), {6, 0, 0, 0}) - monomial_mean({6, 0, 0, 0})), 1e-6);
}

TEST(Quadrature, CollapsedRuleExactness) {
    for (int dim = 1; dim <= 3; ++dim) expect_exact_to(collapsed_rule(dim, 6), 2 * 6 - dim);
}

TEST(Quadrature, NoDefaultBeyondDimensionThree) { EXPECT_THROW(default_rule(4), Error); }
