#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "hybridwave/geometry.hpp"

namespace hybridwave {

/// Quadrilateral mesh with bilinear element geometry. Element vertices are
/// counter-clockwise; local edge k joins local vertices k and (k+1) % 4.
struct QuadMesh {
  struct Edge {
    int element = 0;
    int local_edge = 0;
  };

  std::vector<Point2> vertices;
  std::vector<std::array<int, 4>> elements;
  /// Edges on the coupling interface, ordered left to right.
  std::vector<Edge> interface_edges;
  /// (left, right) vertex pairs identified by x-periodicity.
  std::vector<std::pair<int, int>> periodic_pairs;

  std::pair<int, int> edge_vertices(const Edge& e) const;
};

/// nx by ny squares of side dx with the bottom row on the interface.
QuadMesh structured_mesh(int nx, int ny, double dx, Point2 origin, bool periodic = true);

struct SinusoidalMeshOptions {
  /// Maximum vertex perturbation as a fraction of the local spacing.
  double jitter = 0.1;
  std::uint32_t seed = 20240611;
};

/// Flat bottom at origin.y (the interface), top at
///   y = origin.y + base_height - A (1 - cos(2 pi (x - origin.x) / width)),
/// A = amplitude_fraction * base_height. Interior vertices are graded between
/// the two and jittered deterministically; the interface and top rows are not.
QuadMesh sinusoidal_mesh(int nx, int ny, double width, double base_height, double amplitude_fraction,
                         Point2 origin, const SinusoidalMeshOptions& options = {});

/// Appends `rows` rows of squares of side dx below the interface edges. The
/// new bottom row becomes the mesh's interface list.
QuadMesh extend_below(const QuadMesh& mesh, int rows, double dx);

/// Bilinear map of element e at reference point (xi, eta).
Point2 map_to_physical(const QuadMesh& mesh, int e, double xi, double eta);
/// Jacobian determinant of element e at (xi, eta).
double jacobian_det(const QuadMesh& mesh, int e, double xi, double eta);

/// Throws a mesh error on a non-positive Jacobian, bad connectivity or
/// periodic pairs at different heights.
void validate_mesh(const QuadMesh& mesh);

/// Throws a mesh error unless the interface edges are horizontal, contiguous,
/// of length dx and start at x0 + i dx for consecutive i (covering nx cells).
void validate_interface(const QuadMesh& mesh, double x0, double dx, int nx);

void write_mesh(const QuadMesh& mesh, const std::filesystem::path& path);
QuadMesh read_mesh(const std::filesystem::path& path);

}  // namespace hybridwave
