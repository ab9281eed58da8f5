#include "plasmon/study.hpp"

#include "plasmon/analytic.hpp"
#include "plasmon/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace plasmon {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Input, "bad number '" + s + "' in '" + context + "'");
  }
}

int to_int(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Input, "bad integer '" + s + "' in '" + context + "'");
  }
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Positions (among non-monopole modes) of every mode index, and the rank at
// which each cluster starts.
struct RankTable {
  std::vector<std::size_t> mode_of_rank;
  std::vector<std::size_t> cluster_start;  // one extra entry: total count
};

RankTable rank_table(const ModeSet& modes) {
  RankTable table;
  for (std::size_t m = 0; m < modes.modes.size(); ++m) {
    if (!modes.modes[m].monopole) table.mode_of_rank.push_back(m);
  }
  std::size_t start = 0;
  for (const auto& c : modes.clusters) {
    table.cluster_start.push_back(start);
    start += c.multiplicity();
  }
  table.cluster_start.push_back(start);
  return table;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

GeometrySpec GeometrySpec::parse(const std::string& text) {
  const auto fields = split(text, ':');
  GeometrySpec spec;
  if (fields.empty()) throw Error(ErrorKind::Input, "empty geometry spec");
  if (fields[0] == "icosphere") {
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(ErrorKind::Input,
                  "expected icosphere:<level>[:<radius>], got '" + text + "'");
    }
    spec.kind = Kind::Icosphere;
    spec.level = to_int(fields[1], text);
    if (fields.size() == 3) spec.radius = to_double(fields[2], text);
  } else if (fields[0] == "ellipsoid") {
    if (fields.size() != 3) {
      throw Error(ErrorKind::Input,
                  "expected ellipsoid:<a>,<b>,<c>:<level>, got '" + text + "'");
    }
    const auto axes = split(fields[1], ',');
    if (axes.size() != 3) {
      throw Error(ErrorKind::Input, "ellipsoid needs three semi-axes in '" + text + "'");
    }
    spec.kind = Kind::Ellipsoid;
    spec.a = to_double(axes[0], text);
    spec.b = to_double(axes[1], text);
    spec.c = to_double(axes[2], text);
    spec.level = to_int(fields[2], text);
  } else {
    throw Error(ErrorKind::Input, "unknown geometry '" + fields[0] + "'");
  }
  return spec;
}

std::vector<GeometrySpec> GeometrySpec::parse_list(const std::string& text) {
  std::vector<std::string> entries;
  for (const auto& part : split(text, ',')) {
    const bool starts_entry =
        !part.empty() && std::isalpha(static_cast<unsigned char>(part.front()));
    if (starts_entry || entries.empty()) {
      entries.push_back(part);
    } else {
      entries.back() += "," + part;
    }
  }
  std::vector<GeometrySpec> specs;
  for (const auto& e : entries) specs.push_back(parse(e));
  return specs;
}

std::string GeometrySpec::label() const {
  if (kind == Kind::Icosphere) {
    std::string s = "icosphere:" + std::to_string(level);
    if (radius != 1.0) s += ":" + format_number(radius);
    return s;
  }
  return "ellipsoid:" + format_number(a) + "," + format_number(b) + "," +
         format_number(c) + ":" + std::to_string(level);
}

SurfaceMesh GeometrySpec::build() const {
  return kind == Kind::Icosphere ? gen_icosphere(level, radius)
                                 : gen_ellipsoid(a, b, c, level);
}

std::vector<SphereMatch> match_sphere_clusters(const ModeSet& modes, int kmax) {
  if (modes.clusters.empty()) {
    throw Error(ErrorKind::Input, "mode set has not been clustered");
  }
  const RankTable table = rank_table(modes);
  const auto is_boundary = [&](std::size_t rank) {
    return std::binary_search(table.cluster_start.begin(),
                              table.cluster_start.end(), rank);
  };
  const auto cluster_at = [&](std::size_t rank) {
    const auto it = std::upper_bound(table.cluster_start.begin(),
                                     table.cluster_start.end(), rank);
    return static_cast<std::size_t>(it - table.cluster_start.begin()) - 1;
  };

  std::vector<SphereMatch> matches;
  for (int k = 1; k <= kmax; ++k) {
    const auto lo = static_cast<std::size_t>(analytic::cumulative_multiplicity(k - 1));
    const auto hi = static_cast<std::size_t>(analytic::cumulative_multiplicity(k));
    if (hi > table.mode_of_rank.size()) {
      throw Error(ErrorKind::Input, "spectrum has too few modes to resolve k=" +
                                        std::to_string(k));
    }
    SphereMatch match;
    match.k = k;
    match.eps_oracle = analytic::sphere_eps(k);
    double sum = 0.0;
    for (std::size_t r = lo; r < hi; ++r) sum += modes.modes[table.mode_of_rank[r]].eps;
    match.eps_mean = sum / static_cast<double>(hi - lo);
    match.rel_error =
        std::abs(match.eps_mean - match.eps_oracle) / std::abs(match.eps_oracle);
    match.multiplicity = modes.clusters[cluster_at(lo)].multiplicity();
    match.matched = is_boundary(lo) && is_boundary(hi);
    matches.push_back(match);
  }
  return matches;
}

ShapeStats shape_stats(const ModeSet& modes, std::string geometry,
                       std::size_t n_panels) {
  ShapeStats stats;
  stats.geometry = std::move(geometry);
  stats.n_panels = n_panels;
  std::vector<double> eps;  // descending |lambda|
  for (const auto& m : modes.modes) {
    if (!m.monopole) eps.push_back(m.eps);
  }
  stats.retained = eps.size();
  if (eps.empty()) return stats;
  const auto near = std::count_if(eps.begin(), eps.end(), [](double e) {
    return std::abs(e + 1.0) < kNearMinusOneBand;
  });
  stats.near_minus_one = static_cast<double>(near) / static_cast<double>(eps.size());
  const std::size_t half = std::max<std::size_t>(1, eps.size() / 2);
  stats.median_low_half_eps =
      median(std::vector<double>(eps.end() - static_cast<std::ptrdiff_t>(half), eps.end()));
  return stats;
}

StudyReport converge_sphere(const std::vector<int>& levels, double radius,
                            const std::vector<int>& k_targets,
                            const AssemblyOptions& opts,
                            const SpectrumTolerances& tol) {
  if (levels.empty()) throw Error(ErrorKind::Input, "no refinement levels given");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || levels[i] > 5) {
      throw Error(ErrorKind::Input, "study levels must lie in 1..5");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) {
      throw Error(ErrorKind::Input, "study levels must be strictly increasing");
    }
  }
  if (k_targets.empty()) throw Error(ErrorKind::Input, "no multipole degrees given");
  for (const int k : k_targets) {
    if (k < 1 || k > 4) throw Error(ErrorKind::Input, "k targets must lie in 1..4");
  }
  const int kmax = *std::max_element(k_targets.begin(), k_targets.end());

  StudyReport report;
  report.kind = "sphere";
  report.geometry = "icosphere radius " + format_number(radius);
  report.k_targets = k_targets;

  for (const int level : levels) {
    const SurfaceMesh mesh = gen_icosphere(level, radius);
    const PanelSet panels = panelize(mesh);
    const NPOperator op = assemble(panels, opts);
    const ModeSet modes = solve_modes(op, tol);

    LevelRecord record;
    record.level = level;
    record.n_panels = panels.size();
    record.discarded_complex = modes.discarded.size();
    const double four_pi = 4.0 * std::numbers::pi;
    record.gauss_error =
        std::abs(gauss_check(panels, Vec3::Zero()) - four_pi) / four_pi;
    record.near_minus_one = shape_stats(modes, "", panels.size()).near_minus_one;

    const auto all = match_sphere_clusters(modes, kmax);
    for (const int k : k_targets) {
      record.matches.push_back(all[static_cast<std::size_t>(k - 1)]);
      if (!all[static_cast<std::size_t>(k - 1)].matched) {
        report.flags.push_back("level " + std::to_string(level) + " k=" +
                               std::to_string(k) +
                               ": cluster boundaries do not match multiplicity " +
                               std::to_string(2 * k + 1));
      }
    }
    const auto covered = static_cast<std::size_t>(analytic::cumulative_multiplicity(kmax));
    std::size_t count = 0;
    for (const auto& c : modes.clusters) {
      if (count >= covered) break;
      record.clusters.push_back(c);
      count += c.multiplicity();
    }
    report.levels.push_back(std::move(record));
  }

  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    for (std::size_t t = 0; t < k_targets.size(); ++t) {
      const double prev = report.levels[i - 1].matches[t].rel_error;
      const double curr = report.levels[i].matches[t].rel_error;
      if (curr <= prev) continue;
      const std::string where = "k=" + std::to_string(k_targets[t]) + " level " +
                                std::to_string(report.levels[i - 1].level) + "->" +
                                std::to_string(report.levels[i].level);
      report.flags.push_back(curr <= 1.1 * prev
                                 ? "tolerated error increase at " + where
                                 : "error increase at " + where);
    }
  }
  return report;
}

TailFit tail_fit(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 3) {
    throw Error(ErrorKind::Input, "tail fit needs at least 3 points, got " +
                                      std::to_string(points.size()));
  }
  // Minimize sum_k (eps_k + 1 + c/k)^2 over c.
  double num = 0.0;
  double den = 0.0;
  for (const auto& [k, eps] : points) {
    const double inv_k = 1.0 / static_cast<double>(k);
    num += (eps + 1.0) * inv_k;
    den += inv_k * inv_k;
  }
  TailFit fit;
  fit.c = -num / den;
  double sq = 0.0;
  for (const auto& [k, eps] : points) {
    const double r = eps - (-1.0 - fit.c / static_cast<double>(k));
    sq += r * r;
  }
  fit.rms_residual = std::sqrt(sq / static_cast<double>(points.size()));
  fit.k_first = points.front().first;
  fit.k_last = points.back().first;
  fit.points = points;
  return fit;
}

std::vector<std::pair<int, double>> tail_points(const ModeSet& modes,
                                                TailIndexing indexing,
                                                int k_first, int k_last) {
  if (k_first < 1 || k_last < k_first) {
    throw Error(ErrorKind::Input, "invalid k range");
  }
  std::vector<std::pair<int, double>> points;
  if (indexing == TailIndexing::Sphere) {
    for (const auto& m : match_sphere_clusters(modes, k_last)) {
      if (m.k >= k_first) points.emplace_back(m.k, m.eps_mean);
    }
  } else {
    for (int k = k_first; k <= k_last; ++k) {
      if (static_cast<std::size_t>(k) > modes.clusters.size()) break;
      points.emplace_back(k, modes.clusters[static_cast<std::size_t>(k - 1)].mean_eps);
    }
  }
  return points;
}

TailFit tail_fit(const ModeSet& modes, TailIndexing indexing, int k_first,
                 int k_last) {
  return tail_fit(tail_points(modes, indexing, k_first, k_last));
}

std::vector<ShapeStats> shape_independence(
    const std::vector<std::pair<std::string, SurfaceMesh>>& meshes,
    const AssemblyOptions& opts, const SpectrumTolerances& tol) {
  std::vector<ShapeStats> stats;
  for (const auto& [name, mesh] : meshes) {
    const PanelSet panels = panelize(mesh);
    const ModeSet modes = solve_modes(assemble(panels, opts), tol);
    stats.push_back(shape_stats(modes, name, panels.size()));
  }
  return stats;
}

}  // namespace plasmon
