#include "plasmon/spectra.hpp"

#include "plasmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

extern "C" {
// Fortran LAPACK; the trailing arguments are the hidden string lengths.
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a,
            const int* lda, double* wr, double* wi, double* vl, const int* ldvl,
            double* vr, const int* ldvr, double* work, const int* lwork,
            int* info, std::size_t jobvl_len, std::size_t jobvr_len);
}

namespace plasmon {

double eps_from_lambda(double lambda) {
  if (lambda == -1.0) {
    throw Error(ErrorKind::Numerical,
                "lambda = -1 is the pole of the permittivity map (monopole)");
  }
  // Extended intermediate precision keeps the sphere values -1/(2k+1)
  // mapping onto the correctly rounded -(k+1)/k.
  const long double x = lambda;
  return static_cast<double>((x - 1.0L) / (x + 1.0L));
}

double lambda_from_eps(double eps) {
  if (eps == 1.0) {
    throw Error(ErrorKind::Numerical, "eps = 1 is the pole of the inverse map");
  }
  const long double x = eps;
  return static_cast<double>((1.0L + x) / (1.0L - x));
}

Eigen::VectorXcd RawEigenpairs::vector(Eigen::Index j) const {
  const double im = values.at(static_cast<std::size_t>(j)).imag();
  if (im == 0.0) return vectors.col(j).cast<std::complex<double>>();
  const std::complex<double> i_unit(0.0, 1.0);
  if (im > 0.0) {
    return vectors.col(j).cast<std::complex<double>>() +
           i_unit * vectors.col(j + 1).cast<std::complex<double>>();
  }
  return vectors.col(j - 1).cast<std::complex<double>>() -
         i_unit * vectors.col(j).cast<std::complex<double>>();
}

RawEigenpairs eigendecompose(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw Error(ErrorKind::Input, "eigendecompose needs a non-empty square matrix");
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorKind::Numerical, "matrix has non-finite entries");
  }
  const int n = static_cast<int>(matrix.rows());
  Eigen::MatrixXd a = matrix;  // overwritten by LAPACK
  std::vector<double> wr(n), wi(n);
  RawEigenpairs out;
  out.vectors.resize(n, n);
  const int one = 1;
  int info = 0;
  int lwork = -1;
  double query = 0.0;
  dgeev_("N", "V", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &one,
         out.vectors.data(), &n, &query, &lwork, &info, 1, 1);
  if (info != 0) {
    throw Error(ErrorKind::Numerical,
                "dgeev workspace query failed, info=" + std::to_string(info));
  }
  lwork = static_cast<int>(query);
  std::vector<double> work(static_cast<std::size_t>(std::max(lwork, 1)));
  dgeev_("N", "V", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &one,
         out.vectors.data(), &n, work.data(), &lwork, &info, 1, 1);
  if (info < 0) {
    throw Error(ErrorKind::Numerical,
                "dgeev rejected argument " + std::to_string(-info));
  }
  if (info > 0) {
    throw Error(ErrorKind::Numerical,
                "QR iteration failed to converge at eigenvalue index " +
                    std::to_string(info - 1));
  }
  out.values.resize(n);
  for (int j = 0; j < n; ++j) out.values[j] = {wr[j], wi[j]};
  return out;
}

RawEigenpairs eigendecompose(const NPOperator& op) {
  return eigendecompose(op.matrix);
}

std::size_t ModeSet::monopole_count() const {
  return static_cast<std::size_t>(
      std::count_if(modes.begin(), modes.end(), [](const Mode& m) { return m.monopole; }));
}

double charge_imbalance(const Eigen::VectorXd& sigma,
                        const std::vector<double>& area) {
  double net = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    net += sigma[j] * area[j];
    total += std::abs(sigma[j]) * area[j];
  }
  return total > 0.0 ? std::abs(net) / total : 0.0;
}

namespace {

void normalize_density(Eigen::VectorXd& sigma) {
  Eigen::Index peak = 0;
  for (Eigen::Index j = 1; j < sigma.size(); ++j) {
    if (std::abs(sigma[j]) > std::abs(sigma[peak])) peak = j;
  }
  if (sigma[peak] != 0.0) sigma /= sigma[peak];
}

}  // namespace

ModeSet filter_modes(const NPOperator& op, const RawEigenpairs& raw,
                     const SpectrumTolerances& tol) {
  const auto n = static_cast<Eigen::Index>(raw.values.size());
  if (n != op.size()) {
    throw Error(ErrorKind::Input, "eigenpairs do not match the operator size");
  }
  double max_abs = 0.0;
  for (const auto& v : raw.values) max_abs = std::max(max_abs, std::abs(v));
  const double imag_cut = tol.imag_rel * max_abs;

  ModeSet set;
  set.operator_norm = op.matrix.norm();

  std::vector<std::complex<double>> kept_values;

  // A near-real conjugate pair keeps both columns of its packed vector,
  // i.e. the real and imaginary parts spanning its invariant subspace.
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = raw.values[j];
    if (std::abs(v.imag()) > imag_cut) {
      set.discarded.push_back(v);
      continue;
    }
    Mode mode;
    kept_values.push_back(v);
    mode.lambda = v.real();
    mode.sigma = raw.vectors.col(j);
    mode.monopole =
        std::abs(mode.lambda + 1.0) < tol.monopole &&
        charge_imbalance(mode.sigma, op.panels.area) > 0.5;
    mode.eps = mode.monopole ? std::numeric_limits<double>::quiet_NaN()
                             : eps_from_lambda(mode.lambda);
    normalize_density(mode.sigma);
    set.modes.push_back(std::move(mode));
  }
  if (set.modes.empty()) {
    throw Error(ErrorKind::Numerical, "no real modes survived the filter");
  }

  // Residuals |K s - lambda s| in one matrix product.
  Eigen::MatrixXd sigmas(n, static_cast<Eigen::Index>(set.modes.size()));
  for (std::size_t m = 0; m < set.modes.size(); ++m) {
    sigmas.col(static_cast<Eigen::Index>(m)) = set.modes[m].sigma;
  }
  Eigen::MatrixXd images = op.matrix * sigmas;
  for (std::size_t m = 0; m < set.modes.size(); ++m) {
    const auto col = static_cast<Eigen::Index>(m);
    set.modes[m].residual =
        (images.col(col) - set.modes[m].lambda * sigmas.col(col)).norm();
  }

  // A surviving near-real pair is only an approximate real mode; drop it when
  // its residual breaks the bound that every retained mode must meet.
  std::vector<Mode> accepted;
  accepted.reserve(set.modes.size());
  for (std::size_t m = 0; m < set.modes.size(); ++m) {
    const Mode& mode = set.modes[m];
    if (kept_values[m].imag() != 0.0 &&
        mode.residual > tol.residual_rel * set.operator_norm * mode.sigma.norm()) {
      set.discarded.push_back(kept_values[m]);
    } else {
      accepted.push_back(std::move(set.modes[m]));
    }
  }
  set.modes = std::move(accepted);
  if (set.modes.empty()) {
    throw Error(ErrorKind::Numerical, "no real modes survived the filter");
  }

  std::vector<std::size_t> order(set.modes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(set.modes[a].lambda) > std::abs(set.modes[b].lambda);
  });
  std::vector<Mode> sorted;
  sorted.reserve(order.size());
  for (const auto idx : order) sorted.push_back(std::move(set.modes[idx]));
  set.modes = std::move(sorted);
  return set;
}

std::vector<ModeCluster> cluster_modes(const ModeSet& modes, double rel_tol) {
  std::vector<ModeCluster> clusters;
  double sum = 0.0;
  for (std::size_t m = 0; m < modes.modes.size(); ++m) {
    const Mode& mode = modes.modes[m];
    if (mode.monopole) continue;
    if (!clusters.empty()) {
      auto& current = clusters.back();
      if (std::abs(mode.eps - current.mean_eps) <=
          rel_tol * std::abs(current.mean_eps)) {
        current.members.push_back(m);
        sum += mode.eps;
        current.mean_eps = sum / static_cast<double>(current.members.size());
        continue;
      }
    }
    clusters.push_back({mode.eps, {m}});
    sum = mode.eps;
  }
  return clusters;
}

ModeSet solve_modes(const NPOperator& op, const SpectrumTolerances& tol) {
  ModeSet set = filter_modes(op, eigendecompose(op), tol);
  set.clusters = cluster_modes(set, tol.cluster_rel);
  for (std::size_t c = 0; c < set.clusters.size(); ++c) {
    for (const auto m : set.clusters[c].members) {
      set.modes[m].cluster = static_cast<int>(c);
    }
  }
  return set;
}

}  // namespace plasmon
