#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "fdstokes/mesh.hpp"
#include "fdstokes/parallel.hpp"

namespace fdstokes {

/// Circular level set phi(x) = |x - center| - radius. Fluid is phi > 0,
/// the solid disk is phi < 0.
struct LevelSet {
  Point center{0.5, 0.5};
  double radius = 0.21;

  double operator()(const Point& x) const { return (x - center).norm() - radius; }
  /// Unit normal pointing out of the fluid, i.e. toward the disk center.
  Point normal(const Point& x) const { return (center - x).normalized(); }
  /// Throws std::invalid_argument unless radius > 0 and the disk lies
  /// strictly inside the unit square.
  void validate() const;
};

enum class ElementTag { Interior, Cut, Exterior };

/// Straight piece of the interface approximation. Traversed with the fluid
/// on the left, so the right-hand normal points toward the disk.
struct InterfaceSegment {
  Point a;
  Point b;

  double length() const { return (b - a).norm(); }
  Point normal() const {
    const Point d = b - a;
    return Point(d.y(), -d.x()) / d.norm();
  }
  Point midpoint() const { return 0.5 * (a + b); }
};

struct ClipResult {
  std::vector<TrianglePoints> fluid_triangles;
  std::vector<InterfaceSegment> interface;
};

/// Clips a background triangle against the fluid side of the circle. Every
/// circle arc inside the triangle is replaced by `subsegments` chords whose
/// endpoints lie on the circle. Throws std::invalid_argument when the
/// triangle does not meet the circle or subsegments < 1; a degenerate
/// contact (arc shorter than 1e-14) yields an empty polyline and either the
/// whole triangle or nothing, by majority of vertex sides.
ClipResult clip_fluid_region(const TrianglePoints& tri, const LevelSet& ls, int subsegments);

/// Per-triangle tags using vertex signs and exact edge/circle intersections.
std::vector<ElementTag> classify_elements(const BackgroundMesh& mesh, const LevelSet& ls);

struct CutCell {
  int triangle = -1;
  std::vector<TrianglePoints> fluid_triangles;
  std::vector<InterfaceSegment> interface;
  double fluid_area = 0.0;
  double fluid_fraction = 0.0;

  double interface_length() const;
};

/// Result of the good/bad element test.
struct GoodBadMap {
  double theta_min = 0.0;
  std::vector<char> good;          // per triangle; meaningful for cut triangles
  std::vector<int> good_neighbor;  // per triangle; -1 unless the triangle is bad
  std::vector<int> bad_elements;   // ascending

  int bad_count() const { return static_cast<int>(bad_elements.size()); }
};

class NoGoodNeighborError : public std::runtime_error {
 public:
  NoGoodNeighborError(int triangle, double fraction);
  int triangle() const { return triangle_; }

 private:
  int triangle_;
};

/// Interior/cut/exterior classification, clipped cut cells and the
/// submeshes built from them. Holds a reference to the background mesh,
/// which must outlive it.
class CutGeometry {
 public:
  CutGeometry(const BackgroundMesh& mesh, const LevelSet& ls, int subsegments,
              ExecPolicy policy = ExecPolicy::OpenMP);

  const BackgroundMesh& mesh() const { return *mesh_; }
  const LevelSet& level_set() const { return ls_; }
  int subsegments() const { return subsegments_; }

  ElementTag tag(int t) const { return tags_[t]; }
  const std::vector<ElementTag>& tags() const { return tags_; }
  const std::vector<CutCell>& cells() const { return cells_; }
  /// nullptr unless t is a cut triangle.
  const CutCell* cell(int t) const { return cell_index_[t] < 0 ? nullptr : &cells_[cell_index_[t]]; }

  /// 1 on interior, 0 on exterior, |F_T|/|T| on cut triangles.
  double fluid_fraction(int t) const;

  const Submesh& interior() const { return interior_; }
  const Submesh& cut() const { return cut_; }
  const Submesh& extended() const { return extended_; }

  const GoodBadMap& good_bad() const { return good_bad_; }
  void set_good_bad(GoodBadMap map) { good_bad_ = std::move(map); }
  /// t itself unless t is bad, in which case its good neighbor.
  int reconstruction_target(int t) const;

  double fluid_area() const;
  double interface_length() const;

  /// Per cut triangle: "cut t fraction good|bad neighbor" followed by one
  /// "p x y" line per polyline point and a blank line.
  void write_text(std::ostream& out) const;

 private:
  const BackgroundMesh* mesh_;
  LevelSet ls_;
  int subsegments_;
  std::vector<ElementTag> tags_;
  std::vector<CutCell> cells_;
  std::vector<int> cell_index_;
  Submesh interior_;
  Submesh cut_;
  Submesh extended_;
  GoodBadMap good_bad_;
};

/// Good elements have fluid fraction >= theta_min. Each bad element gets
/// the node-sharing element of the extended mesh with the largest fluid
/// fraction among those with fraction >= theta_min (interior elements count
/// as 1), ties to the lowest index. Throws NoGoodNeighborError if none exists.
GoodBadMap classify_good_bad(const CutGeometry& cut, double theta_min);

}  // namespace fdstokes
