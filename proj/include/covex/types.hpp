#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace covex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

/// Vertex handle. Strongly typed so it cannot be mixed up with positions or counts.
enum class VertexId : std::uint32_t {};

constexpr std::uint32_t index_of(VertexId v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr VertexId vertex(std::uint32_t i) noexcept { return VertexId{i}; }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Mat identity(Eigen::Index r) { return Mat::Identity(r, r); }

} // namespace covex

template <>
struct std::hash<covex::VertexId> {
    std::size_t operator()(covex::VertexId v) const noexcept { return std::hash<std::uint32_t>{}(covex::index_of(v)); }
};
