#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <set>
#include <vector>

namespace ocfem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryLabel { gamma1, gamma2 };
enum class Side { bottom, right, top, left };

// Oriented boundary edge (a -> b) with the domain on its left, so the
// outward normal is the left-hand rotation of b - a.
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryLabel label = BoundaryLabel::gamma2;
};

// Conforming triangulation with counterclockwise triangles and a labeled
// boundary. Meshes are immutable after construction; the constructor
// validates conformity and caches the mesh size h (longest triangle side).
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<BoundaryEdge> boundary_edges);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  double h() const { return h_; }

  double triangle_area(int t) const;
  double edge_length(int a, int b) const;

  // Vertices incident to at least one boundary edge with the given label,
  // sorted ascending, no duplicates.
  std::vector<int> vertices_on(BoundaryLabel label) const;

 private:
  void validate() const;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  double h_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

// Structured triangulation of the unit square with n subdivisions per side.
// Vertices are row major from (0,0); every cell is split along the same
// diagonal. Sides listed in gamma1_sides are labeled Gamma1, the rest
// Gamma2; both parts must be nonempty.
MeshPtr build_unit_square(int n, const std::set<Side>& gamma1_sides);

// Splits every triangle into four congruent children via edge midpoints.
// Boundary edges inherit the parent label; h halves.
MeshPtr refine_uniform(const Mesh& mesh);

double boundary_measure(const Mesh& mesh, BoundaryLabel label);

// Plain text dump: "v x y" / "t i j k" / "e i j Gamma1|Gamma2" sections.
void write_mesh(std::ostream& os, const Mesh& mesh);

// Uniform-grid bucket index for point location in a mesh.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  // Triangle containing (x, y), with barycentric coordinates; points on
  // shared edges resolve to the lowest triangle index. Returns -1 if the
  // point lies outside the mesh.
  int locate(double x, double y, std::array<double, 3>& bary) const;

 private:
  const Mesh* mesh_;
  int nx_ = 1;
  double xlo_ = 0.0, xhi_ = 1.0, ylo_ = 0.0, yhi_ = 1.0;
  std::vector<std::vector<int>> cells_;

  int cell_of(double x, double y) const;
};

}  // namespace ocfem
