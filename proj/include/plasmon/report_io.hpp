#pragma once

#include "plasmon/np_operator.hpp"
#include "plasmon/spectra.hpp"
#include "plasmon/study.hpp"

#include <string>

namespace plasmon {

inline constexpr int kSchemaVersion = 1;

struct SolveSettings {
  AssemblyOptions assembly;
  SpectrumTolerances tolerances;
};

struct GeometryInfo {
  std::string source;
  std::size_t n_panels = 0;
  double signed_volume = 0.0;
};

std::string spectrum_json(const ModeSet& modes, const GeometryInfo& geometry,
                          const SolveSettings& settings);

/// Header: rank,lambda,eps,cluster,multiplicity,monopole,residual
std::string spectrum_csv(const ModeSet& modes);

/// "NPMODE 1", the panel count, then one density value per triangle.
std::string mode_sidecar(const Mode& mode);

std::string study_json(const StudyReport& report, const SolveSettings& settings);

/// Header: level,N,k,eps_mean,eps_oracle,rel_err
std::string study_convergence_csv(const StudyReport& report);

/// Header: k,eps
std::string study_tail_csv(const TailFit& fit);

/// Header: geometry,n_panels,retained,near_minus_one,median_low_half_eps
std::string study_shapes_csv(const StudyReport& report);

/// Writes a whole file; throws Error(Io) on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace plasmon
