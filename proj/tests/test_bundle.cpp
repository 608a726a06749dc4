#include "covex/builtins.hpp"
#include "covex/bundle.hpp"
#include "covex/harness.hpp"

#include <gtest/gtest.h>

using namespace covex;

namespace {

const VertexId v0 = vertex(0), v1 = vertex(1), v2 = vertex(2), v3 = vertex(3);

SimplicialComplex unit_tet() {
    return {{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)},
            {Simplex{0, 1, 2, 3}}};
}

} // namespace

TEST(DiscreteConnection, ReverseDirectionIsTheInverse) {
    std::mt19937_64 rng(1);
    const Mat m = random_gl(rng, 3);
    const DiscreteConnection dc(3, {{{v2, v0}, m}});
    EXPECT_EQ(dc(v2, v0), m);
    EXPECT_LT((dc(v0, v2) * dc(v2, v0) - Mat::Identity(3, 3)).norm(), 1e-13);
    EXPECT_EQ(dc(v1, v1), Mat(Mat::Identity(3, 3)));
    EXPECT_TRUE(dc.has_edge(v0, v2));
    EXPECT_FALSE(dc.has_edge(v0, v1));
    EXPECT_THROW(dc(v0, v1), Error);
}

TEST(DiscreteConnection, RejectsBadMatrices) {
    EXPECT_THROW(DiscreteConnection(3, {{{v0, v1}, Mat::Zero(3, 3)}}), Error);
    EXPECT_THROW(DiscreteConnection(3, {{{v0, v1}, Mat::Identity(2, 2)}}), Error);
    EXPECT_THROW(DiscreteConnection(3, {{{v1, v1}, Mat::Identity(3, 3)}}), Error);
    const Mat id = Mat::Identity(3, 3);
    using Pairs = std::map<DiscreteConnection::EdgeKey, std::pair<Mat, Mat>>;
    EXPECT_THROW(DiscreteConnection(3, Pairs{{{v0, v1}, {id, 2 * id}}}), Error);
    EXPECT_THROW(DiscreteConnection(3, Pairs{{{v1, v0}, {id, id}}}), Error);
    // The unchecked factory keeps an inconsistent pair as given.
    const auto bad = DiscreteConnection::unchecked(3, Pairs{{{v0, v1}, {id, 2 * id}}});
    EXPECT_EQ(bad(v1, v0), Mat(2 * id));
}

TEST(DiscreteConnection, EdgePairsRoundTrip) {
    std::mt19937_64 rng(2);
    std::map<DiscreteConnection::EdgeKey, Mat> edges{{{v0, v1}, random_gl(rng, 3)}, {{v1, v2}, random_so3(rng)}};
    const DiscreteConnection dc(3, edges);
    const DiscreteConnection copy(3, dc.edge_pairs());
    for (auto [a, b] : {std::pair{v0, v1}, std::pair{v1, v0}, std::pair{v1, v2}, std::pair{v2, v1}})
        EXPECT_EQ(copy(a, b), dc(a, b));
}

TEST(DiscreteConnection, FromSmoothUsesSegmentTransport) {
    const auto c = unit_tet();
    const auto conn = sample_connection();
    const auto dc = from_smooth(c, conn, 64);
    EXPECT_EQ(dc.edges().size(), 6u);
    EXPECT_EQ(dc(v0, v3), transport_segment(conn, c.position(v0), c.position(v3), 64));
    EXPECT_LT((dc(v0, v3) * dc(v3, v0) - Mat::Identity(3, 3)).norm(), 1e-10);
    // Skew coefficients: every edge matrix is orthogonal.
    EXPECT_TRUE(is_metric_compatible(dc, 1e-12));
    std::mt19937_64 rng(4);
    EXPECT_FALSE(is_metric_compatible(DiscreteConnection(3, {{{v0, v1}, 2 * random_so3(rng)}}), 1e-6));
}

TEST(DiscreteConnection, TransportChainAndOneForm) {
    std::mt19937_64 rng(6);
    const DiscreteConnection dc(3, {{{v0, v1}, random_gl(rng, 3)}, {{v1, v2}, random_gl(rng, 3)}});
    EXPECT_EQ(transport_chain(dc, {0, 1, 2}), Mat(dc(v0, v1) * dc(v1, v2)));
    EXPECT_EQ(transport_chain(dc, {2}), Mat(Mat::Identity(3, 3)));
    EXPECT_EQ(connection_one_form(dc, v1, v2), Mat(dc(v1, v2) - Mat::Identity(3, 3)));
    EXPECT_THROW(connection_one_form(dc, v0, v2), Error);
    EXPECT_THROW(connection_one_form(dc, v0, v0), Error);
}

TEST(DiscreteConnection, FrameChangeConjugatesHolonomy) {
    std::mt19937_64 rng(8);
    const DiscreteConnection dc(3, {{{v0, v1}, random_gl(rng, 3)}, {{v1, v2}, random_gl(rng, 3)}, {{v0, v2}, random_gl(rng, 3)}});
    DiscreteFrame frame(3);
    frame.set(v0, random_gl(rng, 3));
    frame.set(v2, random_gl(rng, 3));
    const auto g = change_frame(dc, frame);
    const Mat loop = transport_chain(dc, {0, 1, 2, 0}), loop_g = transport_chain(g, {0, 1, 2, 0});
    EXPECT_LT((loop_g - frame.at(v0).inverse() * loop * frame.at(v0)).norm(), 1e-12 * (1 + loop.norm()));
    EXPECT_EQ(frame.at(v1), Mat(Mat::Identity(3, 3)));
    EXPECT_THROW(frame.set(v1, Mat::Zero(3, 3)), Error);
}

TEST(DiscreteConnection, PullbackCopiesImageEdgesAndCollapsesToIdentity) {
    std::mt19937_64 rng(9);
    const DiscreteConnection dc(3, {{{v0, v1}, random_gl(rng, 3)}, {{v1, v2}, random_gl(rng, 3)}, {{v0, v2}, random_gl(rng, 3)}});
    const SimplicialComplex source({Point::Zero(2), Point::Unit(2, 0), Point::Unit(2, 1)}, {Simplex{0, 1, 2}});
    const SimplicialMap f{{0, 2}, {1, 0}, {2, 2}};
    const auto pulled = pullback_connection(f, dc, source);
    EXPECT_EQ(pulled(v0, v1), dc(v2, v0));
    EXPECT_EQ(pulled(v1, v0), dc(v0, v2));
    EXPECT_EQ(pulled(v0, v2), Mat(Mat::Identity(3, 3)));
    const SimplicialMap g{{0, 0}, {1, 1}, {2, 3}};
    EXPECT_THROW(pullback_connection(g, dc, source), Error);
}
