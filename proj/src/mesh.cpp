#include "fdstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fdstokes {

BackgroundMesh::BackgroundMesh(int n) : n_(n) {
  if (n < 1) {
    throw std::invalid_argument("background mesh needs n >= 1, got " + std::to_string(n));
  }
  h_ = std::sqrt(2.0) / n;

  const int nv = (n + 1) * (n + 1);
  vertices_.reserve(nv);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices_.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }

  triangles_.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + (n + 1);
      const int v11 = v01 + 1;
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
  }

  // Edges in order of first appearance while sweeping triangles.
  std::map<std::pair<int, int>, int> lookup;
  triangle_edges_.resize(triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[k];
      int b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = lookup.try_emplace({a, b}, num_edges());
      if (inserted) {
        Edge e;
        e.vertices = {a, b};
        e.triangles = {t, -1};
        edges_.push_back(e);
      } else {
        edges_[it->second].triangles[1] = t;
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  vertex_tri_offsets_.assign(nv + 1, 0);
  for (const auto& tri : triangles_) {
    for (int v : tri) ++vertex_tri_offsets_[v + 1];
  }
  for (int v = 0; v < nv; ++v) vertex_tri_offsets_[v + 1] += vertex_tri_offsets_[v];
  vertex_tri_list_.resize(vertex_tri_offsets_.back());
  std::vector<int> fill(vertex_tri_offsets_.begin(), vertex_tri_offsets_.end() - 1);
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles_[t]) vertex_tri_list_[fill[v]++] = t;
  }
}

TrianglePoints BackgroundMesh::triangle_points(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double BackgroundMesh::triangle_area(int t) const {
  const auto p = triangle_points(t);
  const Point a = p[1] - p[0];
  const Point b = p[2] - p[0];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double BackgroundMesh::edge_length(int e) const {
  const auto& ed = edges_[e];
  return (vertices_[ed.vertices[1]] - vertices_[ed.vertices[0]]).norm();
}

std::span<const int> BackgroundMesh::vertex_triangles(int v) const {
  return std::span<const int>(vertex_tri_list_).subspan(
      vertex_tri_offsets_[v], vertex_tri_offsets_[v + 1] - vertex_tri_offsets_[v]);
}

std::vector<int> BackgroundMesh::node_neighbors(int t) const {
  std::vector<int> out;
  for (int v : triangles_[t]) {
    for (int s : vertex_triangles(v)) {
      if (s != t) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void BackgroundMesh::write_text(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (const auto& v : vertices_) out << "v " << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : triangles_) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out.precision(old_precision);
}

BackgroundMesh build_background_mesh(int n) { return BackgroundMesh(n); }

Submesh extract_submesh(const BackgroundMesh& mesh, std::vector<int> members) {
  for (int t : members) {
    if (t < 0 || t >= mesh.num_triangles()) {
      throw std::out_of_range("submesh member " + std::to_string(t) + " outside [0, " +
                              std::to_string(mesh.num_triangles()) + ")");
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  Submesh sub;
  sub.parent = &mesh;
  sub.member_flag.assign(mesh.num_triangles(), 0);
  for (int t : members) sub.member_flag[t] = 1;
  sub.members = std::move(members);

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edge(e);
    if (!ed.on_boundary() && sub.contains(ed.triangles[0]) && sub.contains(ed.triangles[1])) {
      sub.interior_edges.push_back(e);
    }
  }
  return sub;
}

}  // namespace fdstokes
