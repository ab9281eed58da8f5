#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace plasmon {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Closed, outward-oriented triangulated surface.
///
/// Triangles are listed counter-clockwise as seen from outside. Meshes built
/// by the loaders and generators below have passed validate_mesh(); a
/// SurfaceMesh assembled by hand has not.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

/// Collocation geometry, one entry per triangle in triangle order.
struct PanelSet {
  std::vector<Vec3> centroid;
  std::vector<Vec3> normal;  // outward, unit length
  std::vector<double> area;
  std::vector<std::array<Vec3, 3>> corners;
  std::vector<double> diameter;  // longest edge

  std::size_t size() const { return centroid.size(); }
};

/// Findings of mesh validation that do not reject the mesh.
struct MeshReport {
  long euler_characteristic = 0;
  std::size_t num_edges = 0;
  std::size_t num_components = 0;
  double signed_volume = 0.0;
  double total_area = 0.0;
  bool flipped = false;
  std::vector<std::string> warnings;
};

enum class MeshFormat { Off, Stl };

// Geometry helpers.
double signed_volume(const SurfaceMesh& mesh);
double total_area(const SurfaceMesh& mesh);
double bbox_diagonal(const SurfaceMesh& mesh);

/// Checks every invariant of a closed outward surface and repairs global
/// inward orientation in place. Throws MeshError on rejection.
MeshReport validate_mesh(SurfaceMesh& mesh);

/// Parses and validates mesh text. STL input is welded before validation.
SurfaceMesh load_mesh(std::string_view text, MeshFormat format,
                      MeshReport* report = nullptr);

/// Reads a mesh file, choosing the format from the extension (.off/.stl).
SurfaceMesh load_mesh_file(const std::string& path,
                           MeshReport* report = nullptr);

/// OFF text with 17 significant digits, so load_mesh round-trips exactly.
std::string to_off(const SurfaceMesh& mesh);

void write_off_file(const SurfaceMesh& mesh, const std::string& path);

inline constexpr int kMaxIcosphereLevel = 7;

SurfaceMesh gen_icosphere(int level, double radius);
SurfaceMesh gen_ellipsoid(double a, double b, double c, int level);

PanelSet panelize(const SurfaceMesh& mesh);

}  // namespace plasmon
