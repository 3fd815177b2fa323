#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fdstokes {

using Point = Eigen::Vector2d;
using TrianglePoints = std::array<Point, 3>;

/// Mesh edge: vertex pair in ascending order and up to two adjacent triangles.
/// Boundary edges carry -1 in the second triangle slot.
struct Edge {
  std::array<int, 2> vertices{};
  std::array<int, 2> triangles{-1, -1};

  bool on_boundary() const { return triangles[1] < 0; }
};

/// Uniform triangulation of the unit square with n subdivisions per side.
///
/// Vertex (i, j) sits at (i/n, j/n) and has index j*(n+1) + i. Every grid
/// square is split by its lower-left to upper-right diagonal into a lower
/// triangle (v00, v10, v11) and an upper triangle (v00, v11, v01), both
/// counter-clockwise. Square (i, j) owns triangles 2*(j*n + i) and
/// 2*(j*n + i) + 1.
class BackgroundMesh {
 public:
  explicit BackgroundMesh(int n);

  int subdivisions() const { return n_; }
  /// Triangle diameter, sqrt(2)/n.
  double h() const { return h_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Point& vertex(int v) const { return vertices_[v]; }
  std::span<const Point> vertices() const { return vertices_; }
  /// Integer lattice coordinates (i, j) of a vertex.
  std::array<int, 2> vertex_lattice(int v) const { return {v % (n_ + 1), v / (n_ + 1)}; }

  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  TrianglePoints triangle_points(int t) const;
  double triangle_area(int t) const;

  /// Edge k of triangle t joins local vertices k and (k+1)%3.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  double edge_length(int e) const;

  /// Triangles sharing at least one vertex with t (t excluded), ascending.
  std::vector<int> node_neighbors(int t) const;
  std::span<const int> vertex_triangles(int v) const;

  /// Plain-text dump: "v x y" per vertex then "t i j k" per triangle.
  void write_text(std::ostream& out) const;

 private:
  int n_;
  double h_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Edge> edges_;
  std::vector<int> vertex_tri_offsets_;
  std::vector<int> vertex_tri_list_;
};

/// Throws std::invalid_argument for n < 1.
BackgroundMesh build_background_mesh(int n);

/// Subset of background triangles plus the edges interior to that subset.
struct Submesh {
  const BackgroundMesh* parent = nullptr;
  std::vector<int> members;         // ascending triangle indices
  std::vector<int> interior_edges;  // ascending edge indices, both sides in members
  std::vector<char> member_flag;    // indexed by background triangle

  bool contains(int t) const { return member_flag[t] != 0; }
  int size() const { return static_cast<int>(members.size()); }
  bool empty() const { return members.empty(); }
};

/// Throws std::out_of_range on invalid triangle indices. Duplicates are merged.
Submesh extract_submesh(const BackgroundMesh& mesh, std::vector<int> members);

}  // namespace fdstokes
