#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nb::fem {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

enum class BoundaryTag { outer, left, top, bottom, right, curve, truncation, inner };

const char* to_string(BoundaryTag tag) noexcept;

struct BoundaryEdge {
  int v0;
  int v1;
  BoundaryTag tag;
};

/// Grading metadata of cusp meshes. Triangles with every vertex at y >= tip_zone
/// are regular; below it rows shrink geometrically toward the tip.
struct Grading {
  double ratio = 1.0;
  int levels = 0;
  double tip_zone = 0.0;
  double y_min = 0.0;  // truncation height of the tip, 0 when untruncated
};

/// Conforming P1 triangulation with counterclockwise triangles.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary;
  Grading grading;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  double signed_area(std::size_t t) const;
  double area() const;
  double diameter() const;  // over vertices
};

struct MeshAudit {
  bool oriented = true;       // every signed area > 0
  bool conforming = true;     // each edge shared by at most two triangles, opposite orientation
  int euler_characteristic = 0;
  double min_angle_deg = 180.0;       // over regular triangles
  double min_angle_all_deg = 180.0;   // over every triangle
  std::size_t boundary_edges = 0;
  std::string problem;

  bool ok() const noexcept { return oriented && conforming; }
};

MeshAudit audit(const TriMesh& mesh);

/// Cusp H_g = {0 < y < 1, 0 < x < y^gamma1}, truncated at y_min = h^2, rows
/// graded geometrically toward the tip over `grading_levels` levels.
TriMesh mesh_cusp_2d(double gamma1, double h, int grading_levels, double y_min = -1.0);

/// Axis-aligned rectangle [0, width] x [0, height].
TriMesh mesh_rectangle(double width, double height, double h);

/// Disc of the given radius centred at the origin; boundary polygon has ceil(2 pi r / h) vertices.
TriMesh mesh_disc(double radius, double h);

/// Annulus inner <= |x| <= outer centred at the origin.
TriMesh mesh_annulus(double inner, double outer, double h);

void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);

void write_field(std::ostream& out, const Eigen::VectorXd& values);
Eigen::VectorXd read_field(std::istream& in);

}  // namespace nb::fem
