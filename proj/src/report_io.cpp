#include "plasmon/report_io.hpp"

#include "plasmon/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace plasmon {

namespace {

using Json = nlohmann::ordered_json;

Json options_json(const SolveSettings& s) {
  return Json{{"eta", s.assembly.eta},
              {"subdiv_depth", s.assembly.subdiv_depth},
              {"max_panels", s.assembly.max_panels},
              {"imag_tol", s.tolerances.imag_rel},
              {"monopole_tol", s.tolerances.monopole},
              {"cluster_tol", s.tolerances.cluster_rel}};
}

std::ostringstream csv_stream() {
  std::ostringstream out;
  out << std::setprecision(17);
  return out;
}

std::size_t multiplicity_of(const ModeSet& modes, const Mode& m) {
  return m.cluster < 0 ? 0 : modes.clusters[static_cast<std::size_t>(m.cluster)].multiplicity();
}

}  // namespace

std::string spectrum_json(const ModeSet& modes, const GeometryInfo& geometry,
                          const SolveSettings& settings) {
  Json spectrum = Json::array();
  for (std::size_t r = 0; r < modes.modes.size(); ++r) {
    const Mode& m = modes.modes[r];
    spectrum.push_back(Json{{"rank", r},
                            {"lambda", m.lambda},
                            {"eps", m.monopole ? Json(nullptr) : Json(m.eps)},
                            {"cluster", m.cluster},
                            {"multiplicity", multiplicity_of(modes, m)},
                            {"monopole", m.monopole},
                            {"residual", m.residual}});
  }
  const Json doc{{"schema_version", kSchemaVersion},
                 {"geometry",
                  {{"source", geometry.source},
                   {"n_panels", geometry.n_panels},
                   {"signed_volume", geometry.signed_volume}}},
                 {"options", options_json(settings)},
                 {"spectrum", std::move(spectrum)},
                 {"discarded_complex", modes.discarded.size()}};
  return doc.dump(2) + "\n";
}

std::string spectrum_csv(const ModeSet& modes) {
  auto out = csv_stream();
  out << "rank,lambda,eps,cluster,multiplicity,monopole,residual\n";
  for (std::size_t r = 0; r < modes.modes.size(); ++r) {
    const Mode& m = modes.modes[r];
    out << r << ',' << m.lambda << ',';
    if (!m.monopole) out << m.eps;
    out << ',' << m.cluster << ',' << multiplicity_of(modes, m) << ','
        << (m.monopole ? 1 : 0) << ',' << m.residual << '\n';
  }
  return out.str();
}

std::string mode_sidecar(const Mode& mode) {
  auto out = csv_stream();
  out << "NPMODE 1\n" << mode.sigma.size() << '\n';
  for (Eigen::Index j = 0; j < mode.sigma.size(); ++j) out << mode.sigma[j] << '\n';
  return out.str();
}

std::string study_json(const StudyReport& report, const SolveSettings& settings) {
  Json levels = Json::array();
  for (const auto& l : report.levels) {
    Json clusters = Json::array();
    for (const auto& c : l.clusters) {
      clusters.push_back(Json{{"mean_eps", c.mean_eps}, {"multiplicity", c.multiplicity()}});
    }
    Json matches = Json::array();
    for (const auto& m : l.matches) {
      matches.push_back(Json{{"k", m.k},
                             {"eps_oracle", m.eps_oracle},
                             {"eps_mean", m.eps_mean},
                             {"rel_error", m.rel_error},
                             {"multiplicity", m.multiplicity},
                             {"matched", m.matched}});
    }
    levels.push_back(Json{{"level", l.level},
                          {"n_panels", l.n_panels},
                          {"gauss_error", l.gauss_error},
                          {"discarded_complex", l.discarded_complex},
                          {"near_minus_one", l.near_minus_one},
                          {"clusters", std::move(clusters)},
                          {"matches", std::move(matches)}});
  }

  Json tail = nullptr;
  if (report.tail) {
    Json points = Json::array();
    for (const auto& [k, eps] : report.tail->points) points.push_back(Json{{"k", k}, {"eps", eps}});
    tail = Json{{"c", report.tail->c},
                {"rms_residual", report.tail->rms_residual},
                {"k_range", {report.tail->k_first, report.tail->k_last}},
                {"points", std::move(points)}};
  }

  Json shapes = Json::array();
  for (const auto& s : report.shapes) {
    shapes.push_back(Json{{"geometry", s.geometry},
                          {"n_panels", s.n_panels},
                          {"retained", s.retained},
                          {"near_minus_one", s.near_minus_one},
                          {"median_low_half_eps", s.median_low_half_eps}});
  }

  const Json doc{{"schema_version", kSchemaVersion},
                 {"kind", report.kind},
                 {"geometry", report.geometry},
                 {"options", options_json(settings)},
                 {"k_targets", report.k_targets},
                 {"levels", std::move(levels)},
                 {"tail", std::move(tail)},
                 {"shapes", std::move(shapes)},
                 {"flags", report.flags}};
  return doc.dump(2) + "\n";
}

std::string study_convergence_csv(const StudyReport& report) {
  auto out = csv_stream();
  out << "level,N,k,eps_mean,eps_oracle,rel_err\n";
  for (const auto& l : report.levels) {
    for (const auto& m : l.matches) {
      out << l.level << ',' << l.n_panels << ',' << m.k << ',' << m.eps_mean << ','
          << m.eps_oracle << ',' << m.rel_error << '\n';
    }
  }
  return out.str();
}

std::string study_tail_csv(const TailFit& fit) {
  auto out = csv_stream();
  out << "k,eps\n";
  for (const auto& [k, eps] : fit.points) out << k << ',' << eps << '\n';
  return out.str();
}

std::string study_shapes_csv(const StudyReport& report) {
  auto out = csv_stream();
  out << "geometry,n_panels,retained,near_minus_one,median_low_half_eps\n";
  for (const auto& s : report.shapes) {
    out << '"' << s.geometry << "\"," << s.n_panels << ',' << s.retained << ','
        << s.near_minus_one << ',' << s.median_low_half_eps << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace plasmon
