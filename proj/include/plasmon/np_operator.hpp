#pragma once

#include "plasmon/mesh.hpp"

#include <Eigen/Core>

#include <string>

namespace plasmon {

/// Quadrature settings for the collocation assembly.
struct AssemblyOptions {
  /// Panels i, j are "near" when |c_i - c_j| < eta * (diam_i + diam_j).
  double eta = 2.0;
  /// Near panels are split 4-way this many times (4^depth midpoint points).
  int subdiv_depth = 2;
  /// Refuse to allocate a dense matrix above this many panels.
  std::size_t max_panels = 20000;
};

/// Dense collocation matrix of the surface-charge eigenproblem
///   int_S F(r, r') sigma(r') dS(r') = lambda sigma(r).
///
/// Off-diagonal K(i, j) approximates the integral of F(c_i, n_i, .) over
/// panel j. The diagonal is not integrated: it is fixed so every column
/// obeys sum_i K(i, j) * area_i / area_j = -1, the discrete form of
/// int_S F(r, r') dS(r) = -1 for r' on a closed surface.
struct NPOperator {
  Eigen::MatrixXd matrix;
  PanelSet panels;
  AssemblyOptions options;

  Eigen::Index size() const { return matrix.rows(); }
};

/// F(r, r') = -(1/2pi) n(r).(r - r') / |r - r'|^3. Throws on r == r'.
double kernel_eval(const Vec3& r, const Vec3& n_r, const Vec3& r_prime);

NPOperator assemble(const PanelSet& panels, const AssemblyOptions& opts = {});

/// Largest deviation of sum_i K(i, j) * area_i / area_j from -1 over columns.
double column_identity_error(const NPOperator& op);

/// Off-diagonal part of the area-weighted column sum for column j, before
/// the diagonal is applied. Approaches -1 as the mesh is refined.
double off_diagonal_column_sum(const NPOperator& op, Eigen::Index j);

/// Flux of the unit point-source field at x through the panels. Equals 4pi
/// for x inside and 0 for x outside an exact closed surface.
double gauss_check(const PanelSet& panels, const Vec3& x);

/// Text dump: "# N=<N>" then one row per line, 17 significant digits.
std::string matrix_dump(const NPOperator& op);

}  // namespace plasmon
