#pragma once

#include <span>

#include <Eigen/Core>

namespace statgeo {

/// Largest supported spatial dimension; spacetime objects carry one more.
inline constexpr int kMaxSpatialDim = 8;

// Fixed-capacity storage keeps per-point metric work off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxSpatialDim + 1, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxSpatialDim + 1,
                          kMaxSpatialDim + 1>;

inline std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace statgeo
