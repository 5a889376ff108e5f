#pragma once

#include <cstdint>
#include <vector>

#include "rtrecover/mesh.hpp"

namespace rtrecover {

/// Bowyer-Watson Delaunay triangulation of a point set (counterclockwise
/// triangles over the convex hull). Points are inserted in the given order.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& points);

/// Delaunay mesh of [0,1]^2 with m equispaced points per side and randomly
/// placed interior points (seeded, minimum spacing enforced). The triangle
/// count is 2 I + 4 m - 2; m and I are chosen to hit `target_nt` when it is even.
Mesh delaunay_unit_square(int target_nt, std::uint64_t seed);

/// n x n grid on [0,1]^2, each square cut by its lower-left/upper-right diagonal.
Mesh structured_unit_square(int n);

/// [-1,1]^2 minus the wedge between the rays of angle 0 and omega from the
/// origin (omega = pi/24): eight triangles around the origin, regularly
/// refined until the triangle count reaches `min_nt`.
Mesh slit_square(int min_nt = 8);

/// Angle of the removed wedge in slit_square.
double slit_angle();

}  // namespace rtrecover
