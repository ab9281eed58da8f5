#pragma once

#include <utility>
#include <vector>

namespace plasmon::analytic {

/// Resonance of the degree-k multipole of a sphere: -(k+1)/k. k >= 1.
double sphere_eps(int k);

/// Matching charge-density eigenvalue -1/(2k+1). k >= 1.
double sphere_lambda(int k);

/// Degeneracy of the degree-k spherical harmonics, 2k+1.
int sphere_multiplicity(int k);

/// Number of modes with degree 1..kmax, kmax (kmax + 2).
int cumulative_multiplicity(int kmax);

struct SphereEntry {
  int k;
  double eps;
  double lambda;
  int multiplicity;
};

/// Entries for k = 1..kmax, ordered by increasing k.
std::vector<SphereEntry> sphere_spectrum(int kmax);

/// Dirichlet-to-Neumann eigenvalues on a sphere of radius R for degree-k
/// boundary data.
///
/// Interior extension r^k Y_k gives d/dr = k/R; the decaying exterior
/// extension r^-(k+1) Y_k gives -(k+1)/R (outward normal in both cases).
/// Resonance: eps * d_minus = d_plus, so eps = d_plus / d_minus.
struct DtnPair {
  double d_minus;
  double d_plus;
};
DtnPair dtn_sphere(int k, double radius);

/// Principal symbols of the half-space DtN maps at wave covector xi:
/// interior |xi|, exterior -|xi|.
struct HalfSpaceSymbols {
  double xi_x;
  double xi_y;
  double d_minus;
  double d_plus;
};
HalfSpaceSymbols halfspace_symbols(double xi_x, double xi_y);

/// Surface-mode resonance of a flat interface. D- = -D+ makes D- D+^-1 the
/// negative identity, whose only eigenvalue -1 inverts to eps = -1.
double halfspace_eps();

/// Sphere tail -1 - 1/k for k = 1..kmax.
std::vector<std::pair<int, double>> asymptote_reference(int kmax);

}  // namespace plasmon::analytic
