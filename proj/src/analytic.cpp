#include "plasmon/analytic.hpp"

#include "plasmon/error.hpp"

#include <cmath>
#include <string>

namespace plasmon::analytic {

namespace {

void require_degree(int k) {
  if (k < 1) {
    throw Error(ErrorKind::Input,
                "multipole degree must be >= 1 (k = 0 is the monopole), got " +
                    std::to_string(k));
  }
}

}  // namespace

double sphere_eps(int k) {
  require_degree(k);
  return -static_cast<double>(k + 1) / static_cast<double>(k);
}

double sphere_lambda(int k) {
  require_degree(k);
  return -1.0 / static_cast<double>(2 * k + 1);
}

int sphere_multiplicity(int k) {
  require_degree(k);
  return 2 * k + 1;
}

int cumulative_multiplicity(int kmax) {
  return kmax < 1 ? 0 : kmax * (kmax + 2);
}

std::vector<SphereEntry> sphere_spectrum(int kmax) {
  require_degree(kmax);
  std::vector<SphereEntry> entries;
  entries.reserve(static_cast<std::size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    entries.push_back({k, sphere_eps(k), sphere_lambda(k), sphere_multiplicity(k)});
  }
  return entries;
}

DtnPair dtn_sphere(int k, double radius) {
  if (k < 0) throw Error(ErrorKind::Input, "degree must be non-negative");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::Input, "radius must be positive");
  }
  return {static_cast<double>(k) / radius, -static_cast<double>(k + 1) / radius};
}

HalfSpaceSymbols halfspace_symbols(double xi_x, double xi_y) {
  const double magnitude = std::hypot(xi_x, xi_y);
  return {xi_x, xi_y, magnitude, -magnitude};
}

double halfspace_eps() {
  // Any xi != 0: the ratio D-/D+ of the symbols is -1, the single eigenvalue
  // of D- D+^-1, and eps is its reciprocal.
  const auto s = halfspace_symbols(1.0, 0.0);
  return 1.0 / (s.d_minus / s.d_plus);
}

std::vector<std::pair<int, double>> asymptote_reference(int kmax) {
  require_degree(kmax);
  std::vector<std::pair<int, double>> tail;
  tail.reserve(static_cast<std::size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    tail.emplace_back(k, -1.0 - 1.0 / static_cast<double>(k));
  }
  return tail;
}

}  // namespace plasmon::analytic
