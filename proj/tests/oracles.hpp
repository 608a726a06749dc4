#pragma once

// Independent reference computations shared by the unit tests and the acceptance suite. Nothing here
// calls the operators it is used to check.

#include "covex/covex.hpp"

#include <map>
#include <random>

namespace oracle {

using covex::Mat;
using covex::Simplex;
using covex::Vec;
using covex::VertexId;

/// 3 x 6 vertex grid on [0,5] x [0,2], each unit square cut along its diagonal: 20 triangles.
inline covex::SimplicialComplex strip20() {
    std::vector<covex::Point> pos;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 6; ++i) pos.push_back(Eigen::Vector2d(i, j));
    std::vector<Simplex> tris;
    for (std::uint32_t j = 0; j < 2; ++j)
        for (std::uint32_t i = 0; i < 5; ++i) {
            const std::uint32_t a = 6 * j + i, b = a + 1, c = a + 6, d = a + 7;
            tris.push_back(Simplex{a, b, d});
            tris.push_back(Simplex{a, d, c});
        }
    return {pos, tris};
}

/// Scalar coboundary on canonical simplices, one component at a time: Σ_i (-1)^i f(s without i),
/// accumulated in index order.
template <class Value>
std::map<Simplex, Value> coboundary(const covex::SimplicialComplex& c, int degree, const std::map<Simplex, Value>& f) {
    std::map<Simplex, Value> out;
    for (const auto& s : c.simplices(degree + 1)) {
        Value acc = f.at(s.without(0));
        for (std::size_t i = 1; i < s.size(); ++i) {
            const Value& t = f.at(s.without(i));
            for (Eigen::Index k = 0; k < acc.size(); ++k) {
                if (i % 2 == 1) acc.data()[k] = acc.data()[k] - t.data()[k];
                else acc.data()[k] = acc.data()[k] + t.data()[k];
            }
        }
        out.emplace(s, acc);
    }
    return out;
}

/// The six-term expansion of dd z on [a,b,c] at a, for a vector 0-form z.
inline Vec dd_zero_form(const covex::DiscreteConnection& dc, VertexId a, VertexId b, VertexId c, const Vec& za,
                        const Vec& zb, const Vec& zc) {
    const auto R = [&](VertexId x, VertexId y) -> Mat { return dc(x, y); };
    const Vec sum = (R(a, b) * R(b, c) - R(a, c)) * zc + R(a, b) * (R(b, c) * R(c, a) - R(b, a)) * za +
                    R(a, c) * (R(c, a) * R(a, b) - R(c, b)) * zb - (R(a, c) * R(c, b) - R(a, b)) * zb -
                    R(a, b) * (R(b, a) * R(a, c) - R(b, c)) * zc - R(a, c) * (R(c, b) * R(b, a) - R(c, a)) * za;
    return sum / 6.0;
}

/// Endomorphism alternation of a 2-form on [a,b,c] with prongs (a, c), written out term by term.
/// `beta(ordering, eval, cut)` supplies the form on each ordering.
template <class Beta>
Mat alt_hom_triangle(const covex::DiscreteConnection& dc, VertexId a, VertexId b, VertexId c, Beta&& beta) {
    const auto R = [&](VertexId x, VertexId y) -> Mat { return dc(x, y); };
    const auto S = [](VertexId x, VertexId y, VertexId z) { return Simplex(std::vector<VertexId>{x, y, z}); };
    // even orderings: R_{a,π0} β R_{π2,c}
    const Mat even = beta(S(a, b, c), a, c) + R(a, b) * beta(S(b, c, a), b, a) * R(a, c) +
                     R(a, c) * beta(S(c, a, b), c, b) * R(b, c);
    // odd orderings: R_{a,π0} β R_{π2,π1} R_{π1,c}
    const Mat odd = beta(S(a, c, b), a, b) * R(b, c) + R(a, b) * beta(S(b, a, c), b, c) * R(c, a) * R(a, c) +
                    R(a, c) * beta(S(c, b, a), c, a) * R(a, b) * R(b, c);
    return (even - odd) / 6.0;
}

/// Endomorphism sided derivative of a 1-form on [a,b,c] with prongs (a, c).
template <class Beta>
Mat sided_hom_triangle(const covex::DiscreteConnection& dc, VertexId a, VertexId b, VertexId c, Beta&& beta) {
    const auto E = [](VertexId x, VertexId y) { return Simplex(std::vector<VertexId>{x, y}); };
    return dc(a, b) * beta(E(b, c), b, c) - beta(E(a, c), a, c) + beta(E(a, b), a, b) * dc(b, c);
}

/// Random endomorphism form with independent values on every (canonical simplex, eval, cut); other
/// orderings pick up the orientation sign.
class RandomHomForm {
public:
    RandomHomForm(const covex::SimplicialComplex& c, int degree, std::mt19937_64& rng) : degree_(degree) {
        for (const auto& s : c.simplices(degree))
            for (auto v : s)
                for (auto w : s) values_[{s, v, w}] = covex::random_mat(rng, 3);
    }
    Mat operator()(const Simplex& s, VertexId v, VertexId w) const {
        return s.parity() * values_.at({s.canonical(), v, w});
    }
    covex::HomCochain cochain() const {
        auto self = *this;
        return {degree_, 3, [self](const Simplex& s, VertexId v, VertexId w) { return self(s, v, w); }};
    }

private:
    int degree_;
    std::map<std::tuple<Simplex, VertexId, VertexId>, Mat> values_;
};

} // namespace oracle
