#pragma once

#include "plasmon/mesh.hpp"
#include "plasmon/np_operator.hpp"
#include "plasmon/spectra.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plasmon {

/// A generated test surface: "icosphere:<level>[:<radius>]" or
/// "ellipsoid:<a>,<b>,<c>:<level>".
struct GeometrySpec {
  enum class Kind { Icosphere, Ellipsoid };
  Kind kind = Kind::Icosphere;
  int level = 0;
  double radius = 1.0;
  double a = 1.0, b = 1.0, c = 1.0;

  static GeometrySpec parse(const std::string& text);
  /// Comma-separated list; a comma followed by a letter starts a new entry.
  static std::vector<GeometrySpec> parse_list(const std::string& text);

  std::string label() const;
  SurfaceMesh build() const;
};

/// Sphere modes of degree k occupy ranks [k^2 - 1, k(k+2)) among the
/// non-monopole modes sorted by descending |lambda|.
struct SphereMatch {
  int k = 0;
  double eps_oracle = 0.0;
  double eps_mean = 0.0;  // mean over the modes of that rank range
  double rel_error = 0.0;
  /// Size of the cluster holding the first mode of the range.
  std::size_t multiplicity = 0;
  /// Both ends of the rank range fall on cluster boundaries.
  bool matched = false;
};

std::vector<SphereMatch> match_sphere_clusters(const ModeSet& modes, int kmax);

struct LevelRecord {
  int level = 0;
  std::size_t n_panels = 0;
  std::vector<ModeCluster> clusters;  // leading clusters only
  std::vector<SphereMatch> matches;   // one per requested k
  double gauss_error = 0.0;           // |gauss_check(origin) - 4pi| / 4pi
  std::size_t discarded_complex = 0;
  double near_minus_one = 0.0;
};

struct TailFit {
  double c = 0.0;
  double rms_residual = 0.0;
  int k_first = 0;
  int k_last = 0;
  std::vector<std::pair<int, double>> points;  // (k, eps_k) used in the fit
};

struct ShapeStats {
  std::string geometry;
  std::size_t n_panels = 0;
  std::size_t retained = 0;  // non-monopole modes
  double near_minus_one = 0.0;
  double median_low_half_eps = 0.0;
};

struct StudyReport {
  std::string kind;  // "sphere", "tail" or "shapes"
  std::string geometry;
  std::vector<int> k_targets;
  std::vector<LevelRecord> levels;
  std::optional<TailFit> tail;
  std::vector<ShapeStats> shapes;
  std::vector<std::string> flags;
};

/// Permittivity band around -1 used for the accumulation statistics.
inline constexpr double kNearMinusOneBand = 0.2;

/// Refinement study of an icosphere of radius R against -(k+1)/k.
StudyReport converge_sphere(const std::vector<int>& levels, double radius,
                            const std::vector<int>& k_targets,
                            const AssemblyOptions& opts = {},
                            const SpectrumTolerances& tol = {});

/// Least-squares c in eps_k ~ -1 - c/k. Needs at least 3 points.
TailFit tail_fit(const std::vector<std::pair<int, double>>& points);

enum class TailIndexing {
  Sphere,    // k from cumulative 2k+1 multiplicities
  Clusters,  // k = cluster rank, starting at 1
};

/// (k, eps_k) pairs for k in [k_first, k_last] drawn from a solved spectrum.
std::vector<std::pair<int, double>> tail_points(const ModeSet& modes,
                                                TailIndexing indexing,
                                                int k_first, int k_last);

TailFit tail_fit(const ModeSet& modes, TailIndexing indexing, int k_first,
                 int k_last);

ShapeStats shape_stats(const ModeSet& modes, std::string geometry,
                       std::size_t n_panels);

std::vector<ShapeStats> shape_independence(
    const std::vector<std::pair<std::string, SurfaceMesh>>& meshes,
    const AssemblyOptions& opts = {}, const SpectrumTolerances& tol = {});

}  // namespace plasmon
