#include "fdstokes/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

namespace fdstokes {

namespace {

constexpr double kDegenerateLength = 1e-14;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Crossing {
  Point x;
  double angle = 0.0;
  bool enter = false;  // fluid -> solid when walking the triangle boundary CCW
};

struct Event {
  Point x;
  int crossing = -1;  // -1 for a triangle vertex
};

enum class CellKind { Interior, Exterior, Cut };

struct CellTrace {
  CellKind kind = CellKind::Interior;
  bool contact = false;  // the circle touches the triangle at all
  std::vector<std::vector<Point>> loops;
  std::vector<InterfaceSegment> segments;
};

Point on_circle(const LevelSet& ls, double angle) {
  return ls.center + ls.radius * Point(std::cos(angle), std::sin(angle));
}

// Roots of |a + t(b - a) - c|^2 = R^2 in ascending order; false if none.
bool line_circle_roots(const Point& a, const Point& b, const LevelSet& ls, double& lo, double& hi) {
  const Point d = b - a;
  const Point w = a - ls.center;
  const double qa = d.squaredNorm();
  const double qb = 2.0 * d.dot(w);
  const double qc = w.squaredNorm() - ls.radius * ls.radius;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0 || qa == 0.0) return false;
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  double r1 = q / qa;
  double r2 = q != 0.0 ? qc / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  lo = r1;
  hi = r2;
  return true;
}

bool point_in_triangle(const Point& p, const TrianglePoints& tri) {
  const double c0 = cross(tri[1] - tri[0], p - tri[0]);
  const double c1 = cross(tri[2] - tri[1], p - tri[1]);
  const double c2 = cross(tri[0] - tri[2], p - tri[2]);
  return c0 > 0.0 && c1 > 0.0 && c2 > 0.0;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

CellTrace trace_cell(const TrianglePoints& tri, const LevelSet& ls, int subsegments) {
  CellTrace out;
  std::array<bool, 3> fluid{};
  int fluid_vertices = 0;
  for (int k = 0; k < 3; ++k) {
    fluid[k] = ls(tri[k]) >= 0.0;
    fluid_vertices += fluid[k] ? 1 : 0;
  }

  std::vector<Crossing> crossings;
  std::vector<Event> events;
  for (int k = 0; k < 3; ++k) {
    const Point& a = tri[k];
    const Point& b = tri[(k + 1) % 3];
    events.push_back({a, -1});
    double lo = 0.0;
    double hi = 0.0;
    if (!line_circle_roots(a, b, ls, lo, hi)) continue;
    const double len = (b - a).norm();
    auto push = [&](double t, bool enter) {
      const Point x = a + std::clamp(t, 0.0, 1.0) * (b - a);
      const Point r = x - ls.center;
      crossings.push_back({x, std::atan2(r.y(), r.x()), enter});
      events.push_back({x, static_cast<int>(crossings.size()) - 1});
    };
    if (fluid[k] && !fluid[(k + 1) % 3]) {
      push(lo, true);
    } else if (!fluid[k] && fluid[(k + 1) % 3]) {
      push(hi, false);
    } else if (fluid[k] && fluid[(k + 1) % 3]) {
      constexpr double slack = 1e-12;
      if (lo > -slack && hi < 1.0 + slack && (hi - lo) * len > kDegenerateLength) {
        push(lo, true);
        push(hi, false);
      }
    }
  }

  if (crossings.empty()) {
    if (fluid_vertices == 3) {
      const bool encloses = point_in_triangle(ls.center, tri) &&
                            segment_distance(ls.center, tri[0], tri[1]) > ls.radius &&
                            segment_distance(ls.center, tri[1], tri[2]) > ls.radius &&
                            segment_distance(ls.center, tri[2], tri[0]) > ls.radius;
      if (encloses) {
        throw std::runtime_error(
            "disk lies inside a single background triangle; refine the mesh");
      }
      out.kind = CellKind::Interior;
    } else {
      out.kind = CellKind::Exterior;
    }
    return out;
  }

  out.contact = true;
  const int ncross = static_cast<int>(crossings.size());
  std::vector<int> event_of(ncross, -1);
  for (int i = 0; i < static_cast<int>(events.size()); ++i) {
    if (events[i].crossing >= 0) event_of[events[i].crossing] = i;
  }

  std::vector<char> visited(ncross, 0);
  const int nevents = static_cast<int>(events.size());
  for (int start = 0; start < ncross; ++start) {
    if (crossings[start].enter || visited[start]) continue;
    std::vector<Point> loop;
    int exit = start;
    int guard = 0;
    do {
      if (++guard > ncross + 1) throw std::logic_error("cut-cell tracing did not close");
      visited[exit] = 1;
      loop.push_back(crossings[exit].x);
      int j = (event_of[exit] + 1) % nevents;
      while (events[j].crossing < 0) {
        loop.push_back(events[j].x);
        j = (j + 1) % nevents;
      }
      const int enter = events[j].crossing;
      if (!crossings[enter].enter) throw std::logic_error("cut-cell tracing hit two exits");
      loop.push_back(crossings[enter].x);

      // Follow the circle clockwise (fluid on the left) to the next crossing.
      int next = -1;
      double best = kTwoPi + 1.0;
      for (int c = 0; c < ncross; ++c) {
        if (c == enter) continue;
        double delta = std::fmod(crossings[enter].angle - crossings[c].angle + 2.0 * kTwoPi, kTwoPi);
        if (delta <= 0.0) delta += kTwoPi;
        if (delta < best) {
          best = delta;
          next = c;
        }
      }
      if (next < 0 || crossings[next].enter) {
        throw std::logic_error("cut-cell tracing: arc does not end at an exit point");
      }
      Point prev = crossings[enter].x;
      for (int i = 1; i < subsegments; ++i) {
        const Point p = on_circle(ls, crossings[enter].angle - best * i / subsegments);
        out.segments.push_back({prev, p});
        loop.push_back(p);
        prev = p;
      }
      out.segments.push_back({prev, crossings[next].x});
      exit = next;
    } while (exit != start);
    out.loops.push_back(std::move(loop));
  }

  double total = 0.0;
  for (const auto& s : out.segments) total += s.length();
  if (total < kDegenerateLength) {
    out.segments.clear();
    out.loops.clear();
    out.kind = fluid_vertices >= 2 ? CellKind::Interior : CellKind::Exterior;
    return out;
  }
  out.kind = CellKind::Cut;
  return out;
}

// Ear clipping of a simple counter-clockwise polygon.
std::vector<TrianglePoints> triangulate(std::vector<Point> poly) {
  std::vector<TrianglePoints> out;
  if (poly.size() < 3) return out;

  Point lo = poly[0];
  Point hi = poly[0];
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).norm();
  const double merge_tol = 1e-15 * scale;
  const double area_tol = 1e-14 * scale * scale;

  std::vector<Point> clean;
  for (const auto& p : poly) {
    if (clean.empty() || (p - clean.back()).norm() > merge_tol) clean.push_back(p);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= merge_tol) clean.pop_back();
  poly = std::move(clean);

  auto strictly_inside = [&](const Point& q, const Point& a, const Point& b, const Point& c) {
    return cross(b - a, q - a) > area_tol && cross(c - b, q - b) > area_tol &&
           cross(a - c, q - c) > area_tol;
  };

  while (poly.size() > 3) {
    const std::size_t m = poly.size();
    bool progressed = false;
    for (std::size_t i = 0; i < m && !progressed; ++i) {
      const Point& a = poly[(i + m - 1) % m];
      const Point& b = poly[i];
      const Point& c = poly[(i + 1) % m];
      const double cr = cross(b - a, c - b);
      if (std::abs(cr) <= area_tol) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
        progressed = true;
        break;
      }
      if (cr < 0.0) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < m && !blocked; ++j) {
        if (j == i || j == (i + 1) % m || j == (i + m - 1) % m) continue;
        blocked = strictly_inside(poly[j], a, b, c);
      }
      if (blocked) continue;
      out.push_back({a, b, c});
      poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
      progressed = true;
    }
    if (!progressed) throw std::logic_error("ear clipping made no progress");
  }
  if (poly.size() == 3 && cross(poly[1] - poly[0], poly[2] - poly[1]) > area_tol) {
    out.push_back({poly[0], poly[1], poly[2]});
  }
  return out;
}

double triangle_area(const TrianglePoints& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

}  // namespace

void LevelSet::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("level-set radius must be positive");
  if (center.x() - radius <= 0.0 || center.x() + radius >= 1.0 || center.y() - radius <= 0.0 ||
      center.y() + radius >= 1.0) {
    throw std::invalid_argument("disk must lie strictly inside the unit square");
  }
}

ClipResult clip_fluid_region(const TrianglePoints& tri, const LevelSet& ls, int subsegments) {
  if (subsegments < 1) throw std::invalid_argument("interface subsegments must be >= 1");
  CellTrace trace = trace_cell(tri, ls, subsegments);
  if (!trace.contact) throw std::invalid_argument("triangle does not meet the interface");

  ClipResult out;
  if (trace.kind == CellKind::Interior) {
    out.fluid_triangles.push_back(tri);
    return out;
  }
  if (trace.kind == CellKind::Exterior) return out;
  for (auto& loop : trace.loops) {
    auto tris = triangulate(std::move(loop));
    out.fluid_triangles.insert(out.fluid_triangles.end(), tris.begin(), tris.end());
  }
  out.interface = std::move(trace.segments);
  return out;
}

std::vector<ElementTag> classify_elements(const BackgroundMesh& mesh, const LevelSet& ls) {
  ls.validate();
  std::vector<ElementTag> tags(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    switch (trace_cell(mesh.triangle_points(t), ls, 1).kind) {
      case CellKind::Interior: tags[t] = ElementTag::Interior; break;
      case CellKind::Exterior: tags[t] = ElementTag::Exterior; break;
      case CellKind::Cut: tags[t] = ElementTag::Cut; break;
    }
  }
  return tags;
}

double CutCell::interface_length() const {
  double sum = 0.0;
  for (const auto& s : interface) sum += s.length();
  return sum;
}

NoGoodNeighborError::NoGoodNeighborError(int triangle, double fraction)
    : std::runtime_error("bad element " + std::to_string(triangle) + " (fluid fraction " +
                         std::to_string(fraction) + ") has no admissible good neighbor"),
      triangle_(triangle) {}

CutGeometry::CutGeometry(const BackgroundMesh& mesh, const LevelSet& ls, int subsegments,
                         ExecPolicy policy)
    : mesh_(&mesh), ls_(ls), subsegments_(subsegments) {
  ls_.validate();
  if (subsegments < 1) throw std::invalid_argument("interface subsegments must be >= 1");

  const int nt = mesh.num_triangles();
  tags_.assign(nt, ElementTag::Interior);
  std::vector<std::optional<CutCell>> slot(nt);

  auto work = [&](int t) {
    const auto tri = mesh.triangle_points(t);
    CellTrace trace = trace_cell(tri, ls_, subsegments_);
    switch (trace.kind) {
      case CellKind::Interior: tags_[t] = ElementTag::Interior; return;
      case CellKind::Exterior: tags_[t] = ElementTag::Exterior; return;
      case CellKind::Cut: break;
    }
    tags_[t] = ElementTag::Cut;
    CutCell cell;
    cell.triangle = t;
    for (auto& loop : trace.loops) {
      auto tris = triangulate(std::move(loop));
      cell.fluid_triangles.insert(cell.fluid_triangles.end(), tris.begin(), tris.end());
    }
    cell.interface = std::move(trace.segments);
    for (const auto& ft : cell.fluid_triangles) cell.fluid_area += triangle_area(ft);
    cell.fluid_fraction = std::clamp(cell.fluid_area / mesh.triangle_area(t), 0.0, 1.0);
    slot[t] = std::move(cell);
  };

  if (policy == ExecPolicy::Serial) {
    for (int t = 0; t < nt; ++t) work(t);
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (int t = 0; t < nt; ++t) work(t);
  }

  cell_index_.assign(nt, -1);
  std::vector<int> interior;
  std::vector<int> cut;
  std::vector<int> extended;
  for (int t = 0; t < nt; ++t) {
    if (tags_[t] == ElementTag::Interior) interior.push_back(t);
    if (tags_[t] == ElementTag::Cut) {
      cut.push_back(t);
      cell_index_[t] = static_cast<int>(cells_.size());
      cells_.push_back(std::move(*slot[t]));
    }
    if (tags_[t] != ElementTag::Exterior) extended.push_back(t);
  }
  interior_ = extract_submesh(mesh, std::move(interior));
  cut_ = extract_submesh(mesh, std::move(cut));
  extended_ = extract_submesh(mesh, std::move(extended));

  good_bad_.theta_min = 0.0;
  good_bad_.good.assign(nt, 1);
  good_bad_.good_neighbor.assign(nt, -1);
}

double CutGeometry::fluid_fraction(int t) const {
  switch (tags_[t]) {
    case ElementTag::Interior: return 1.0;
    case ElementTag::Exterior: return 0.0;
    case ElementTag::Cut: return cells_[cell_index_[t]].fluid_fraction;
  }
  return 0.0;
}

int CutGeometry::reconstruction_target(int t) const {
  const int nb = good_bad_.good_neighbor[t];
  return nb < 0 ? t : nb;
}

double CutGeometry::fluid_area() const {
  double sum = 0.0;
  for (int t : interior_.members) sum += mesh_->triangle_area(t);
  for (const auto& c : cells_) sum += c.fluid_area;
  return sum;
}

double CutGeometry::interface_length() const {
  double sum = 0.0;
  for (const auto& c : cells_) sum += c.interface_length();
  return sum;
}

void CutGeometry::write_text(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (const auto& c : cells_) {
    const int t = c.triangle;
    out << "cut " << t << ' ' << c.fluid_fraction << ' ' << (good_bad_.good[t] ? "good" : "bad")
        << ' ' << good_bad_.good_neighbor[t] << '\n';
    if (!c.interface.empty()) {
      out << "p " << c.interface.front().a.x() << ' ' << c.interface.front().a.y() << '\n';
      for (const auto& s : c.interface) out << "p " << s.b.x() << ' ' << s.b.y() << '\n';
    }
    out << '\n';
  }
  out.precision(old_precision);
}

GoodBadMap classify_good_bad(const CutGeometry& cut, double theta_min) {
  if (theta_min < 0.0 || theta_min > 1.0) {
    throw std::invalid_argument("theta_min must lie in [0, 1]");
  }
  const auto& mesh = cut.mesh();
  GoodBadMap map;
  map.theta_min = theta_min;
  map.good.assign(mesh.num_triangles(), 1);
  map.good_neighbor.assign(mesh.num_triangles(), -1);

  for (const auto& c : cut.cells()) {
    map.good[c.triangle] = c.fluid_fraction >= theta_min ? 1 : 0;
  }
  for (const auto& c : cut.cells()) {
    const int t = c.triangle;
    if (map.good[t]) continue;
    map.bad_elements.push_back(t);
    int best = -1;
    double best_fraction = -1.0;
    for (int s : mesh.node_neighbors(t)) {
      if (!cut.extended().contains(s)) continue;
      const double f = cut.fluid_fraction(s);
      if (f >= theta_min && f > best_fraction) {
        best = s;
        best_fraction = f;
      }
    }
    if (best < 0) throw NoGoodNeighborError(t, c.fluid_fraction);
    map.good_neighbor[t] = best;
  }
  return map;
}

}  // namespace fdstokes
