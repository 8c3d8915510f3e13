#include "nbound/fem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "nbound/core.hpp"
#include "nbound/errors.hpp"

namespace nb::fem {

const char* to_string(BoundaryTag tag) noexcept {
  switch (tag) {
    case BoundaryTag::outer: return "outer";
    case BoundaryTag::left: return "left";
    case BoundaryTag::top: return "top";
    case BoundaryTag::bottom: return "bottom";
    case BoundaryTag::right: return "right";
    case BoundaryTag::curve: return "curve";
    case BoundaryTag::truncation: return "truncation";
    case BoundaryTag::inner: return "inner";
  }
  return "unknown";
}

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point e1 = vertices[tri[1]] - vertices[tri[0]];
  const Point e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double TriMesh::area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += signed_area(t);
  return s;
}

double TriMesh::diameter() const {
  std::vector<int> ids;
  for (const auto& e : boundary) ids.push_back(e.v0);
  if (ids.empty()) {
    for (std::size_t i = 0; i < vertices.size(); ++i) ids.push_back(static_cast<int>(i));
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      d2 = std::max(d2, (vertices[ids[i]] - vertices[ids[j]]).squaredNorm());
    }
  }
  return std::sqrt(d2);
}

namespace {

using Classifier = std::function<std::optional<BoundaryTag>(const Point&, const Point&)>;

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double angle_at(const Point& p, const Point& q, const Point& r) {
  const Point u = q - p;
  const Point v = r - p;
  const double c = u.dot(v) / (u.norm() * v.norm());
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

void add_triangle(std::vector<Point>& verts, std::vector<Triangle>& tris, int a, int b, int c) {
  const Point e1 = verts[b] - verts[a];
  const Point e2 = verts[c] - verts[a];
  const double cross = e1.x() * e2.y() - e1.y() * e2.x();
  if (cross > 0.0) {
    tris.push_back({a, b, c});
  } else {
    tris.push_back({a, c, b});
  }
}

// Triangulate the strip between two polylines, always taking the shorter diagonal.
void zip_open(std::vector<Point>& verts, std::vector<Triangle>& tris, const std::vector<int>& lower,
              const std::vector<int>& upper) {
  std::size_t i = 0, j = 0;
  while (i + 1 < lower.size() || j + 1 < upper.size()) {
    bool advance_lower;
    if (i + 1 == lower.size()) {
      advance_lower = false;
    } else if (j + 1 == upper.size()) {
      advance_lower = true;
    } else {
      advance_lower = (verts[lower[i + 1]] - verts[upper[j]]).squaredNorm() <=
                      (verts[lower[i]] - verts[upper[j + 1]]).squaredNorm();
    }
    if (advance_lower) {
      add_triangle(verts, tris, lower[i], lower[i + 1], upper[j]);
      ++i;
    } else {
      add_triangle(verts, tris, lower[i], upper[j + 1], upper[j]);
      ++j;
    }
  }
}

// Same for two closed rings; `inner` and `outer` are in counterclockwise order.
void zip_closed(std::vector<Point>& verts, std::vector<Triangle>& tris, const std::vector<int>& inner,
                const std::vector<int>& outer) {
  const std::size_t ni = inner.size(), no = outer.size();
  // Align the starting vertex of the outer ring with inner[0].
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < no; ++k) {
    const double d = (verts[outer[k]] - verts[inner[0]]).squaredNorm();
    if (d < best) {
      best = d;
      start = k;
    }
  }
  std::size_t i = 0, j = 0;
  while (i < ni || j < no) {
    const int a = inner[i % ni], a1 = inner[(i + 1) % ni];
    const int b = outer[(start + j) % no], b1 = outer[(start + j + 1) % no];
    bool advance_inner;
    if (i == ni) {
      advance_inner = false;
    } else if (j == no) {
      advance_inner = true;
    } else {
      advance_inner = (verts[a1] - verts[b]).squaredNorm() <= (verts[a] - verts[b1]).squaredNorm();
    }
    if (advance_inner) {
      add_triangle(verts, tris, a, a1, b);
      ++i;
    } else {
      add_triangle(verts, tris, a, b1, b);
      ++j;
    }
  }
}

void finish_boundary(TriMesh& mesh, const Classifier& classify) {
  std::map<std::uint64_t, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) directed[edge_key(t[k], t[(k + 1) % 3])]++;
  }
  mesh.boundary.clear();
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (directed.count(edge_key(b, a))) continue;
      const auto tag = classify(mesh.vertices[a], mesh.vertices[b]);
      if (!tag) {
        throw NumericalError("mesh generation: boundary edge off the domain boundary (non-conforming strip)");
      }
      mesh.boundary.push_back({a, b, *tag});
    }
  }
}

}  // namespace

MeshAudit audit(const TriMesh& mesh) {
  MeshAudit res;
  std::map<std::uint64_t, int> directed;
  std::map<std::uint64_t, int> undirected;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (!(mesh.signed_area(t) > 0.0)) {
      res.oriented = false;
      res.problem = "triangle " + std::to_string(t) + " is not counterclockwise";
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (++directed[edge_key(a, b)] > 1) {
        res.conforming = false;
        res.problem = "directed edge repeated";
      }
      if (++undirected[edge_key(std::min(a, b), std::max(a, b))] > 2) {
        res.conforming = false;
        res.problem = "edge shared by more than two triangles";
      }
    }
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double amin = std::min({angle_at(p0, p1, p2), angle_at(p1, p2, p0), angle_at(p2, p0, p1)});
    res.min_angle_all_deg = std::min(res.min_angle_all_deg, amin);
    const double zone = mesh.grading.tip_zone;
    if (zone <= 0.0 || std::min({p0.y(), p1.y(), p2.y()}) >= zone) {
      res.min_angle_deg = std::min(res.min_angle_deg, amin);
    }
  }
  for (const auto& [key, count] : undirected) {
    if (count == 1) ++res.boundary_edges;
  }
  res.euler_characteristic = static_cast<int>(mesh.vertices.size()) -
                             static_cast<int>(undirected.size()) +
                             static_cast<int>(mesh.triangles.size());
  return res;
}

TriMesh mesh_cusp_2d(double gamma1, double h, int grading_levels, double y_min) {
  if (!(gamma1 >= 1.0)) throw InvalidInput("mesh_cusp_2d: gamma1 must be >= 1");
  if (!(h > 0.0 && h < 0.5)) throw InvalidInput("mesh_cusp_2d: h must lie in (0, 0.5)");
  if (grading_levels < 1) throw InvalidInput("mesh_cusp_2d: grading_levels must be positive");
  if (y_min < 0.0) y_min = h * h;
  if (!(y_min > 0.0 && y_min < 0.5)) throw InvalidInput("mesh_cusp_2d: y_min must lie in (0, 0.5)");

  const auto width = [gamma1](double y) { return std::pow(y, gamma1); };
  const double tip_zone = std::max(std::pow(h, 1.0 / gamma1), y_min);
  const double ratio = std::pow(y_min / tip_zone, 1.0 / grading_levels);

  // Rows from the top down. Spacing follows the arc length of the curved side in
  // the bulk and shrinks geometrically toward the tip.
  std::vector<double> rows{1.0};
  for (;;) {
    const double y = rows.back();
    const double slope = gamma1 * std::pow(y, gamma1 - 1.0);
    const double dy = std::min(h / std::sqrt(1.0 + slope * slope), (1.0 - ratio) * y);
    const double next = y - dy;
    if (next <= y_min * (1.0 + 1e-9)) {
      if (y - y_min < 0.5 * dy && rows.size() > 1) rows.back() = y_min;
      else rows.push_back(y_min);
      break;
    }
    rows.push_back(next);
  }

  TriMesh mesh;
  std::vector<std::vector<int>> ids(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double y = rows[j];
    const double w = width(y);
    const double dy = j + 1 < rows.size() ? rows[j] - rows[j + 1] : rows[j - 1] - rows[j];
    // Horizontal size follows the drift of the curved side per row, so boundary
    // cells are parallelograms with angles bounded by atan(1 / slope).
    const double slope = gamma1 * std::pow(y, gamma1 - 1.0);
    const int cells = std::max(1, static_cast<int>(std::lround(w / (dy * std::max(1.0, slope)))));
    for (int k = 0; k <= cells; ++k) {
      ids[j].push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.emplace_back(w * k / cells, y);
    }
  }
  for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
    zip_open(mesh.vertices, mesh.triangles, ids[j + 1], ids[j]);
  }

  int tip_levels = 0;
  for (double y : rows) tip_levels += y < tip_zone ? 1 : 0;
  mesh.grading = Grading{ratio, tip_levels, tip_zone, y_min};

  const double eps = 1e-12;
  finish_boundary(mesh, [&](const Point& a, const Point& b) -> std::optional<BoundaryTag> {
    if (std::abs(a.x()) < eps && std::abs(b.x()) < eps) return BoundaryTag::left;
    if (std::abs(a.y() - 1.0) < eps && std::abs(b.y() - 1.0) < eps) return BoundaryTag::top;
    if (std::abs(a.y() - y_min) < eps && std::abs(b.y() - y_min) < eps) return BoundaryTag::truncation;
    const auto on_curve = [&](const Point& p) { return std::abs(p.x() - width(p.y())) < 1e-12; };
    if (on_curve(a) && on_curve(b)) return BoundaryTag::curve;
    return std::nullopt;
  });
  return mesh;
}

TriMesh mesh_rectangle(double width, double height, double h) {
  if (!(width > 0.0 && height > 0.0)) throw InvalidInput("mesh_rectangle: sides must be positive");
  if (!(h > 0.0 && h < std::min(width, height))) throw InvalidInput("mesh_rectangle: degenerate h");
  const int nx = static_cast<int>(std::ceil(width / h - 1e-9));
  const int ny = static_cast<int>(std::ceil(height / h - 1e-9));
  TriMesh mesh;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(width * i / nx, height * j / ny);
  }
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      // Alternate diagonals so the mesh has no preferred direction.
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  const double eps = 1e-12 * std::max(width, height);
  finish_boundary(mesh, [&](const Point& a, const Point& b) -> std::optional<BoundaryTag> {
    if (std::abs(a.y()) < eps && std::abs(b.y()) < eps) return BoundaryTag::bottom;
    if (std::abs(a.y() - height) < eps && std::abs(b.y() - height) < eps) return BoundaryTag::top;
    if (std::abs(a.x()) < eps && std::abs(b.x()) < eps) return BoundaryTag::left;
    if (std::abs(a.x() - width) < eps && std::abs(b.x() - width) < eps) return BoundaryTag::right;
    return std::nullopt;
  });
  return mesh;
}

namespace {

std::vector<int> add_ring(TriMesh& mesh, double radius, int count) {
  std::vector<int> ring;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * k / count;
    ring.push_back(static_cast<int>(mesh.vertices.size()));
    mesh.vertices.emplace_back(radius * std::cos(t), radius * std::sin(t));
  }
  return ring;
}

int ring_count(double radius, double h) {
  return std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h - 1e-9)));
}

}  // namespace

TriMesh mesh_disc(double radius, double h) {
  if (!(radius > 0.0)) throw InvalidInput("mesh_disc: radius must be positive");
  if (!(h > 0.0 && h < radius)) throw InvalidInput("mesh_disc: degenerate h");
  TriMesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  const int rings = static_cast<int>(std::ceil(radius / h - 1e-9));
  std::vector<int> prev;
  for (int k = 1; k <= rings; ++k) {
    const double r = radius * k / rings;
    auto ring = add_ring(mesh, r, ring_count(r, h));
    if (k == 1) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        add_triangle(mesh.vertices, mesh.triangles, 0, ring[i], ring[(i + 1) % ring.size()]);
      }
    } else {
      zip_closed(mesh.vertices, mesh.triangles, prev, ring);
    }
    prev = std::move(ring);
  }
  const double tol = 1e-9 * radius;
  finish_boundary(mesh, [&](const Point& a, const Point& b) -> std::optional<BoundaryTag> {
    if (std::abs(a.norm() - radius) < tol && std::abs(b.norm() - radius) < tol) return BoundaryTag::outer;
    return std::nullopt;
  });
  return mesh;
}

TriMesh mesh_annulus(double inner, double outer, double h) {
  if (!(inner > 0.0 && outer > inner)) throw InvalidInput("mesh_annulus: need 0 < inner < outer");
  if (!(h > 0.0 && h < outer - inner)) throw InvalidInput("mesh_annulus: degenerate h");
  TriMesh mesh;
  const int layers = static_cast<int>(std::ceil((outer - inner) / h - 1e-9));
  std::vector<int> prev = add_ring(mesh, inner, ring_count(inner, h));
  for (int k = 1; k <= layers; ++k) {
    const double r = inner + (outer - inner) * k / layers;
    auto ring = add_ring(mesh, r, ring_count(r, h));
    zip_closed(mesh.vertices, mesh.triangles, prev, ring);
    prev = std::move(ring);
  }
  const double tol = 1e-9 * outer;
  finish_boundary(mesh, [&](const Point& a, const Point& b) -> std::optional<BoundaryTag> {
    if (std::abs(a.norm() - outer) < tol && std::abs(b.norm() - outer) < tol) return BoundaryTag::outer;
    if (std::abs(a.norm() - inner) < tol && std::abs(b.norm() - inner) < tol) return BoundaryTag::inner;
    return std::nullopt;
  });
  return mesh;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
  for (const auto& v : mesh.vertices) out << format_double(v.x()) << ' ' << format_double(v.y()) << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriMesh read_mesh(std::istream& in) {
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw InvalidInput("read_mesh: missing header");
  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    std::string xs, ys;
    if (!(in >> xs >> ys)) throw InvalidInput("read_mesh: truncated vertex list");
    v = Point(parse_double("x", xs), parse_double("y", ys));
  }
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw InvalidInput("read_mesh: truncated triangle list");
    for (int k : t) {
      if (k < 0 || static_cast<std::size_t>(k) >= nv) throw InvalidInput("read_mesh: vertex index out of range");
    }
  }
  finish_boundary(mesh, [](const Point&, const Point&) -> std::optional<BoundaryTag> { return BoundaryTag::outer; });
  return mesh;
}

void write_field(std::ostream& out, const Eigen::VectorXd& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << '\n';
}

Eigen::VectorXd read_field(std::istream& in) {
  std::vector<double> xs;
  std::string s;
  while (in >> s) xs.push_back(parse_double("field", s));
  return Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

}  // namespace nb::fem
