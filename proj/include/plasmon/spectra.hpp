#pragma once

#include "plasmon/np_operator.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace plasmon {

/// Permittivity of the resonance carried by eigenvalue lambda:
/// eps = (lambda - 1) / (lambda + 1). Throws at the pole lambda = -1.
double eps_from_lambda(double lambda);

/// Inverse map lambda = (1 + eps) / (1 - eps). Throws at eps = 1.
double lambda_from_eps(double eps);

/// All eigenpairs of a real square matrix.
///
/// `vectors` uses the LAPACK dgeev packing: a real eigenvalue j owns column
/// j; a complex pair (j, j+1) with Im(values[j]) > 0 has eigenvectors
/// col(j) +/- i col(j+1).
struct RawEigenpairs {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXd vectors;

  Eigen::VectorXcd vector(Eigen::Index j) const;
};

/// Dense nonsymmetric eigendecomposition (Hessenberg reduction followed by
/// shifted QR, via LAPACK dgeev). Throws Error(Numerical) if QR fails.
RawEigenpairs eigendecompose(const Eigen::MatrixXd& matrix);
RawEigenpairs eigendecompose(const NPOperator& op);

struct SpectrumTolerances {
  /// Eigenvalues with |Im| above imag_rel * max|lambda| are discarded.
  double imag_rel = 1e-6;
  /// Monopole candidates satisfy |lambda + 1| < monopole.
  double monopole = 0.05;
  /// Relative width of a multiplicity cluster in eps.
  double cluster_rel = 0.02;
  /// Non-real eigenvalues kept by the imaginary cut must still satisfy
  /// |K s - lambda s| <= residual_rel * |K|_F * |s|.
  double residual_rel = 1e-8;
};

struct Mode {
  double lambda = 0.0;
  double eps = 0.0;  // NaN for the monopole
  /// Induced surface-charge density per panel, max|sigma| = 1 with the
  /// largest-magnitude entry positive.
  Eigen::VectorXd sigma;
  bool monopole = false;
  /// |K sigma - lambda sigma|_2 for the normalized sigma.
  double residual = 0.0;
  /// Index into ModeSet::clusters, or -1 when not clustered.
  int cluster = -1;
};

struct ModeCluster {
  double mean_eps = 0.0;
  std::vector<std::size_t> members;  // indices into ModeSet::modes

  std::size_t multiplicity() const { return members.size(); }
};

struct ModeSet {
  /// Sorted by descending |lambda|.
  std::vector<Mode> modes;
  std::vector<ModeCluster> clusters;
  /// Complex eigenvalues dropped by the filter.
  std::vector<std::complex<double>> discarded;
  double operator_norm = 0.0;  // Frobenius norm of K

  std::size_t monopole_count() const;
};

/// |sum_j sigma_j area_j| / sum_j |sigma_j| area_j.
double charge_imbalance(const Eigen::VectorXd& sigma,
                        const std::vector<double>& area);

/// Drops complex eigenvalues (including near-real pairs whose real part
/// fails the residual bound), flags the monopole, maps lambda to eps,
/// normalizes densities and attaches residuals. Does not cluster.
ModeSet filter_modes(const NPOperator& op, const RawEigenpairs& raw,
                     const SpectrumTolerances& tol = {});

/// Greedy grouping of consecutive non-monopole modes whose eps stays within
/// rel_tol * |cluster mean| of the running cluster mean.
std::vector<ModeCluster> cluster_modes(const ModeSet& modes, double rel_tol);

/// eigendecompose + filter_modes + cluster_modes, with each mode's cluster
/// index filled in.
ModeSet solve_modes(const NPOperator& op, const SpectrumTolerances& tol = {});

}  // namespace plasmon
