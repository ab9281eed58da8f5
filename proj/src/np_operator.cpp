#include "plasmon/np_operator.hpp"

#include "plasmon/error.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

namespace plasmon {

namespace {

constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;
constexpr int kMaxSubdivDepth = 6;

struct QuadPoint {
  Vec3 point;
  double weight;
};

// Midpoint rule on the 4^depth congruent sub-triangles of (a, b, c).
void midpoint_rule(const Vec3& a, const Vec3& b, const Vec3& c, int depth,
                   double area, std::vector<QuadPoint>& out) {
  if (depth == 0) {
    out.push_back({(a + b + c) / 3.0, area});
    return;
  }
  const Vec3 ab = 0.5 * (a + b);
  const Vec3 bc = 0.5 * (b + c);
  const Vec3 ca = 0.5 * (c + a);
  const double quarter = 0.25 * area;
  midpoint_rule(a, ab, ca, depth - 1, quarter, out);
  midpoint_rule(ab, b, bc, depth - 1, quarter, out);
  midpoint_rule(ca, bc, c, depth - 1, quarter, out);
  midpoint_rule(ab, bc, ca, depth - 1, quarter, out);
}

}  // namespace

double kernel_eval(const Vec3& r, const Vec3& n_r, const Vec3& r_prime) {
  const Vec3 d = r - r_prime;
  const double dist2 = d.squaredNorm();
  if (dist2 == 0.0) {
    throw Error(ErrorKind::Numerical,
                "kernel evaluated at coincident points; self-interaction must "
                "use the diagonal rule");
  }
  return -kInvTwoPi * n_r.dot(d) / (dist2 * std::sqrt(dist2));
}

NPOperator assemble(const PanelSet& panels, const AssemblyOptions& opts) {
  const auto n = static_cast<Eigen::Index>(panels.size());
  if (n < 4) {
    throw Error(ErrorKind::Input, "assembly needs at least 4 panels, got " +
                                      std::to_string(n));
  }
  if (panels.size() > opts.max_panels) {
    throw Error(ErrorKind::Input,
                "mesh has " + std::to_string(n) + " panels, above max_panels=" +
                    std::to_string(opts.max_panels));
  }
  if (!(opts.eta > 0.0) || !std::isfinite(opts.eta)) {
    throw Error(ErrorKind::Input, "eta must be positive");
  }
  if (opts.subdiv_depth < 0 || opts.subdiv_depth > kMaxSubdivDepth) {
    throw Error(ErrorKind::Input, "subdivision depth must be in 0.." +
                                      std::to_string(kMaxSubdivDepth));
  }
  for (std::size_t i = 0; i < panels.size(); ++i) {
    if (!(panels.area[i] > 0.0)) {
      throw Error(ErrorKind::Input, "degenerate panel " + std::to_string(i));
    }
  }

  NPOperator op;
  op.panels = panels;
  op.options = opts;
  op.matrix.resize(n, n);
  Eigen::MatrixXd& K = op.matrix;
  std::atomic<bool> coincident{false};

  // Columns are independent; within a column the order over i is fixed.
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec3& cj = panels.centroid[j];
    const double area_j = panels.area[j];
    const auto& corners = panels.corners[j];
    std::vector<QuadPoint> near_rule;
    near_rule.reserve(std::size_t{1} << (2 * opts.subdiv_depth));
    midpoint_rule(corners[0], corners[1], corners[2], opts.subdiv_depth, area_j,
                  near_rule);

    double off_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const Vec3& ci = panels.centroid[i];
      const Vec3& ni = panels.normal[i];
      const double cutoff = opts.eta * (panels.diameter[i] + panels.diameter[j]);
      double value = 0.0;
      if ((ci - cj).squaredNorm() >= cutoff * cutoff) {
        const Vec3 d = ci - cj;
        const double dist2 = d.squaredNorm();
        value = -kInvTwoPi * ni.dot(d) / (dist2 * std::sqrt(dist2)) * area_j;
      } else {
        for (const auto& q : near_rule) {
          const Vec3 d = ci - q.point;
          const double dist2 = d.squaredNorm();
          if (dist2 == 0.0) {
            coincident = true;
            continue;
          }
          value += -kInvTwoPi * ni.dot(d) / (dist2 * std::sqrt(dist2)) * q.weight;
        }
      }
      K(i, j) = value;
      off_sum += value * panels.area[i] / area_j;
    }
    K(j, j) = -1.0 - off_sum;
  }

  if (coincident) {
    throw Error(ErrorKind::Input,
                "overlapping panels: a collocation point lies on another panel");
  }
  if (!K.allFinite()) {
    throw Error(ErrorKind::Numerical, "assembled operator has non-finite entries");
  }
  return op;
}

double off_diagonal_column_sum(const NPOperator& op, Eigen::Index j) {
  const auto& area = op.panels.area;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    if (i != j) sum += op.matrix(i, j) * area[i] / area[j];
  }
  return sum;
}

double column_identity_error(const NPOperator& op) {
  const auto& area = op.panels.area;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < op.size(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < op.size(); ++i) {
      sum += op.matrix(i, j) * area[i] / area[j];
    }
    worst = std::max(worst, std::abs(sum + 1.0));
  }
  return worst;
}

double gauss_check(const PanelSet& panels, const Vec3& x) {
  double flux = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const Vec3 d = panels.centroid[i] - x;
    const double dist = d.norm();
    flux += panels.normal[i].dot(d) / (dist * dist * dist) * panels.area[i];
  }
  return flux;
}

std::string matrix_dump(const NPOperator& op) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# N=" << op.size() << '\n';
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    for (Eigen::Index j = 0; j < op.size(); ++j) {
      if (j > 0) out << ' ';
      out << op.matrix(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace plasmon
