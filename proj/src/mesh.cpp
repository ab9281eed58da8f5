#include "plasmon/mesh.hpp"

#include "plasmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace plasmon {

namespace {

// Relative thresholds, scaled by the bounding-box diagonal.
constexpr double kDegenerateAreaRel = 1e-12;
constexpr double kDegenerateVolumeRel = 1e-12;

Vec3 face_cross(const SurfaceMesh& mesh, const Triangle& t) {
  const Vec3& a = mesh.vertices[t[0]];
  const Vec3& b = mesh.vertices[t[1]];
  const Vec3& c = mesh.vertices[t[2]];
  return (b - a).cross(c - a);
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

struct EdgeUse {
  int count = 0;
  int forward = 0;  // traversals from the lower to the higher index
};

std::size_t count_components(std::size_t num_vertices,
                             const std::vector<Triangle>& triangles) {
  std::vector<std::size_t> parent(num_vertices);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::vector<char> used(num_vertices, 0);
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      used[t[k]] = 1;
      const auto a = find(t[k]);
      const auto b = find(t[(k + 1) % 3]);
      if (a != b) parent[a] = b;
    }
  }
  std::size_t roots = 0;
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (used[v] && find(v) == v) ++roots;
  }
  return roots;
}

}  // namespace

double signed_volume(const SurfaceMesh& mesh) {
  double volume = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    volume += a.dot(b.cross(c));
  }
  return volume / 6.0;
}

double total_area(const SurfaceMesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) area += 0.5 * face_cross(mesh, t).norm();
  return area;
}

double bbox_diagonal(const SurfaceMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

MeshReport validate_mesh(SurfaceMesh& mesh) {
  MeshReport report;
  const auto nv = static_cast<int>(mesh.vertices.size());
  if (mesh.triangles.size() < 4) {
    throw MeshError(MeshErrorCode::OpenBoundary,
                    "open boundary: a closed surface needs at least 4 triangles");
  }

  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) {
      throw MeshError(MeshErrorCode::Degenerate, "non-finite vertex coordinate");
    }
  }

  const double diag = bbox_diagonal(mesh);
  const double min_area = kDegenerateAreaRel * diag * diag;
  std::vector<char> referenced(mesh.vertices.size(), 0);

  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(mesh.triangles.size() * 2);
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw MeshError(MeshErrorCode::OutOfRange,
                        "triangle " + std::to_string(f) +
                            " references vertex index out of range");
      }
      referenced[t[k]] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError(MeshErrorCode::Degenerate,
                      "degenerate triangle " + std::to_string(f) +
                          " (repeated vertex)");
    }
    if (0.5 * face_cross(mesh, t).norm() <= min_area) {
      throw MeshError(MeshErrorCode::Degenerate,
                      "degenerate triangle " + std::to_string(f) +
                          " (area below threshold)");
    }
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      auto& use = edges[edge_key(a, b)];
      ++use.count;
      if (a < b) ++use.forward;
    }
  }

  const auto edge_name = [](std::uint64_t key) {
    return "edge (" + std::to_string(key >> 32) + ", " +
           std::to_string(key & 0xffffffffu) + ")";
  };
  // Reported in order of severity, independent of hash-map iteration order.
  for (const auto& [key, use] : edges) {
    if (use.count > 2) {
      throw MeshError(MeshErrorCode::NonManifold,
                      "non-manifold edge: " + edge_name(key) + " is shared by " +
                          std::to_string(use.count) + " triangles");
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.count == 1) {
      throw MeshError(MeshErrorCode::OpenBoundary,
                      "open boundary: " + edge_name(key) + " has only one triangle");
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.forward != 1) {
      throw MeshError(MeshErrorCode::InconsistentOrientation,
                      "inconsistent orientation across " + edge_name(key));
    }
  }

  const auto used_vertices =
      static_cast<long>(std::count(referenced.begin(), referenced.end(), 1));
  if (used_vertices != nv) {
    report.warnings.push_back(std::to_string(nv - used_vertices) +
                              " unreferenced vertices ignored");
  }
  report.num_edges = edges.size();
  report.euler_characteristic = used_vertices -
                                static_cast<long>(edges.size()) +
                                static_cast<long>(mesh.triangles.size());
  const auto components = count_components(mesh.vertices.size(), mesh.triangles);
  report.num_components = components;
  if (components > 1) {
    report.warnings.push_back(std::to_string(components) +
                              " connected components");
  }
  if (report.euler_characteristic != 2 * static_cast<long>(components)) {
    report.warnings.push_back(
        "Euler characteristic " + std::to_string(report.euler_characteristic) +
        " indicates genus > 0");
  }

  double volume = signed_volume(mesh);
  if (std::abs(volume) <= kDegenerateVolumeRel * diag * diag * diag) {
    throw MeshError(MeshErrorCode::Degenerate,
                    "degenerate surface: enclosed volume vanishes");
  }
  if (volume < 0.0) {
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    volume = -volume;
    report.flipped = true;
    report.warnings.push_back("inward orientation: all triangles flipped");
  }
  report.signed_volume = volume;
  report.total_area = total_area(mesh);
  return report;
}

namespace {

void check_level(int level) {
  if (level < 0 || level > kMaxIcosphereLevel) {
    throw MeshError(MeshErrorCode::OutOfRange,
                    "level out of range: " + std::to_string(level) +
                        " (expected 0.." + std::to_string(kMaxIcosphereLevel) +
                        ")");
  }
}

void check_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw MeshError(MeshErrorCode::OutOfRange,
                    std::string(name) + " must be positive and finite");
  }
}

SurfaceMesh unit_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  SurfaceMesh mesh;
  mesh.vertices = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (auto& v : mesh.vertices) v.normalize();
  mesh.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  return mesh;
}

// One 4-way split with new vertices projected onto the unit sphere.
void subdivide_unit(SurfaceMesh& mesh) {
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(mesh.triangles.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const Vec3 m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
    const int index = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(m);
    midpoint.emplace(key, index);
    return index;
  };

  std::vector<Triangle> refined;
  refined.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    refined.push_back({t[0], ab, ca});
    refined.push_back({t[1], bc, ab});
    refined.push_back({t[2], ca, bc});
    refined.push_back({ab, bc, ca});
  }
  mesh.triangles = std::move(refined);
}

}  // namespace

SurfaceMesh gen_icosphere(int level, double radius) {
  check_level(level);
  check_positive(radius, "radius");
  SurfaceMesh mesh = unit_icosahedron();
  for (int l = 0; l < level; ++l) subdivide_unit(mesh);
  for (auto& v : mesh.vertices) v *= radius;
  validate_mesh(mesh);
  return mesh;
}

SurfaceMesh gen_ellipsoid(double a, double b, double c, int level) {
  check_level(level);
  check_positive(a, "semi-axis a");
  check_positive(b, "semi-axis b");
  check_positive(c, "semi-axis c");
  SurfaceMesh mesh = unit_icosahedron();
  for (int l = 0; l < level; ++l) subdivide_unit(mesh);
  const Vec3 scale(a, b, c);
  for (auto& v : mesh.vertices) v = v.cwiseProduct(scale);
  validate_mesh(mesh);
  return mesh;
}

PanelSet panelize(const SurfaceMesh& mesh) {
  const double diag = bbox_diagonal(mesh);
  const double min_area = kDegenerateAreaRel * diag * diag;
  const std::size_t n = mesh.triangles.size();

  PanelSet panels;
  panels.centroid.reserve(n);
  panels.normal.reserve(n);
  panels.area.reserve(n);
  panels.corners.reserve(n);
  panels.diameter.reserve(n);
  for (std::size_t f = 0; f < n; ++f) {
    const auto& t = mesh.triangles[f];
    const Vec3& a = mesh.vertices.at(t[0]);
    const Vec3& b = mesh.vertices.at(t[1]);
    const Vec3& c = mesh.vertices.at(t[2]);
    const Vec3 cross = (b - a).cross(c - a);
    const double twice_area = cross.norm();
    if (!(0.5 * twice_area > min_area)) {
      throw MeshError(MeshErrorCode::Degenerate,
                      "degenerate triangle " + std::to_string(f));
    }
    panels.centroid.push_back((a + b + c) / 3.0);
    panels.normal.push_back(cross / twice_area);
    panels.area.push_back(0.5 * twice_area);
    panels.corners.push_back({a, b, c});
    panels.diameter.push_back(
        std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()}));
  }
  return panels;
}

}  // namespace plasmon
