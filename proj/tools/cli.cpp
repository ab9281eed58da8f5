#include "cli.hpp"

#include "plasmon/analytic.hpp"
#include "plasmon/error.hpp"
#include "plasmon/mesh.hpp"
#include "plasmon/np_operator.hpp"
#include "plasmon/report_io.hpp"
#include "plasmon/spectra.hpp"
#include "plasmon/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

namespace plasmon::cli {

namespace {

struct RunConfig {
  SolveSettings settings;
  std::optional<int> seed;  // reserved; the pipeline is deterministic
  std::string out;

  // gen
  std::string gen_kind;
  int level = 2;
  double radius = 1.0;
  std::vector<double> abc{1.0, 1.0, 1.0};

  // solve
  std::string mesh_path;
  std::string json_path;
  std::string csv_path;
  std::string matrix_path;
  std::vector<int> export_modes;

  // study
  std::string study_kind;
  std::vector<int> levels{2, 3, 4};
  std::vector<int> ks{1, 2};
  std::string geometry = "icosphere:3";
  std::vector<int> krange{1, 3};
  std::string geometries;

  // oracle
  std::string oracle_kind;
  int kmax = 3;
  int k = 1;
  bool json = false;
};

void validate(const RunConfig& cfg) {
  const auto& s = cfg.settings;
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(s.assembly.eta)) throw Error(ErrorKind::Input, "--eta must be positive");
  if (!positive(s.tolerances.imag_rel)) throw Error(ErrorKind::Input, "--imag-tol must be positive");
  if (!positive(s.tolerances.monopole)) throw Error(ErrorKind::Input, "--monopole-tol must be positive");
  if (!positive(s.tolerances.cluster_rel)) throw Error(ErrorKind::Input, "--cluster-tol must be positive");
  if (s.assembly.max_panels == 0) throw Error(ErrorKind::Input, "--max-panels must be positive");
}

std::string fmt17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string stem_of(const std::string& path) {
  const std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SurfaceMesh mesh;
  if (cfg.gen_kind == "icosphere") {
    mesh = gen_icosphere(cfg.level, cfg.radius);
  } else {
    if (cfg.abc.size() != 3) throw Error(ErrorKind::Input, "--abc needs three values a,b,c");
    mesh = gen_ellipsoid(cfg.abc[0], cfg.abc[1], cfg.abc[2], cfg.level);
  }
  std::ostream& info = cfg.out.empty() ? err : out;
  if (cfg.out.empty()) {
    out << to_off(mesh);
  } else {
    write_off_file(mesh, cfg.out);
  }
  info << "V=" << mesh.num_vertices() << " F=" << mesh.num_triangles()
       << " signed_volume=" << fmt17(signed_volume(mesh)) << '\n';
  return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  MeshReport report;
  const SurfaceMesh mesh = load_mesh_file(cfg.mesh_path, &report);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  const PanelSet panels = panelize(mesh);
  const NPOperator op = assemble(panels, cfg.settings.assembly);
  const ModeSet modes = solve_modes(op, cfg.settings.tolerances);

  std::string json_path = cfg.json_path;
  std::string csv_path = cfg.csv_path;
  if (!cfg.out.empty()) {
    if (json_path.empty()) json_path = cfg.out + ".json";
    if (csv_path.empty()) csv_path = cfg.out + ".csv";
  }
  const GeometryInfo geometry{cfg.mesh_path, panels.size(), report.signed_volume};
  if (!json_path.empty()) write_text_file(json_path, spectrum_json(modes, geometry, cfg.settings));
  if (!csv_path.empty()) write_text_file(csv_path, spectrum_csv(modes));
  if (!cfg.matrix_path.empty()) write_text_file(cfg.matrix_path, matrix_dump(op));

  const std::string prefix = cfg.out.empty() ? stem_of(cfg.mesh_path) : cfg.out;
  for (const int rank : cfg.export_modes) {
    if (rank < 0 || static_cast<std::size_t>(rank) >= modes.modes.size()) {
      throw Error(ErrorKind::Input, "--export-mode " + std::to_string(rank) +
                                        " out of range (0.." +
                                        std::to_string(modes.modes.size() - 1) + ")");
    }
    const std::string path = prefix + ".mode" + std::to_string(rank) + ".npmode";
    write_text_file(path, mode_sidecar(modes.modes[static_cast<std::size_t>(rank)]));
    out << "mode " << rank << " -> " << path << '\n';
  }

  out << "panels=" << panels.size() << " modes=" << modes.modes.size()
      << " monopoles=" << modes.monopole_count()
      << " discarded_complex=" << modes.discarded.size() << '\n';
  const std::size_t shown = std::min<std::size_t>(modes.clusters.size(), 5);
  for (std::size_t c = 0; c < shown; ++c) {
    out << "cluster " << c << ": eps=" << fmt17(modes.clusters[c].mean_eps)
        << " multiplicity=" << modes.clusters[c].multiplicity() << '\n';
  }
  return 0;
}

int cmd_study(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const auto& settings = cfg.settings;
  StudyReport report;
  std::string csv;

  if (cfg.study_kind == "sphere") {
    report = converge_sphere(cfg.levels, cfg.radius, cfg.ks, settings.assembly,
                             settings.tolerances);
    csv = study_convergence_csv(report);
    for (const auto& l : report.levels) {
      for (const auto& m : l.matches) {
        out << "level " << l.level << " N=" << l.n_panels << " k=" << m.k
            << " eps=" << fmt17(m.eps_mean) << " oracle=" << fmt17(m.eps_oracle)
            << " rel_err=" << fmt17(m.rel_error) << '\n';
      }
    }
  } else if (cfg.study_kind == "tail") {
    if (cfg.krange.size() != 2) throw Error(ErrorKind::Input, "--krange needs first,last");
    const GeometrySpec spec = GeometrySpec::parse(cfg.geometry);
    const PanelSet panels = panelize(spec.build());
    const ModeSet modes =
        solve_modes(assemble(panels, settings.assembly), settings.tolerances);
    const auto indexing = spec.kind == GeometrySpec::Kind::Icosphere
                              ? TailIndexing::Sphere
                              : TailIndexing::Clusters;
    report.kind = "tail";
    report.geometry = spec.label();
    report.tail = tail_fit(modes, indexing, cfg.krange[0], cfg.krange[1]);
    csv = study_tail_csv(*report.tail);
    out << "c=" << fmt17(report.tail->c)
        << " rms_residual=" << fmt17(report.tail->rms_residual) << '\n';
  } else {
    if (cfg.geometries.empty()) throw Error(ErrorKind::Input, "--geometries is required");
    std::vector<std::pair<std::string, SurfaceMesh>> meshes;
    for (const auto& spec : GeometrySpec::parse_list(cfg.geometries)) {
      meshes.emplace_back(spec.label(), spec.build());
    }
    report.kind = "shapes";
    report.geometry = cfg.geometries;
    report.shapes = shape_independence(meshes, settings.assembly, settings.tolerances);
    csv = study_shapes_csv(report);
    for (const auto& s : report.shapes) {
      out << s.geometry << " N=" << s.n_panels
          << " median_low_half_eps=" << fmt17(s.median_low_half_eps)
          << " near_minus_one=" << fmt17(s.near_minus_one) << '\n';
    }
  }

  if (!cfg.json_path.empty() || !cfg.out.empty()) {
    write_text_file(cfg.json_path.empty() ? cfg.out + ".json" : cfg.json_path,
                    study_json(report, settings));
  }
  if (!cfg.csv_path.empty() || !cfg.out.empty()) {
    write_text_file(cfg.csv_path.empty() ? cfg.out + ".csv" : cfg.csv_path, csv);
  }
  return 0;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  using Json = nlohmann::ordered_json;
  Json doc{{"schema_version", kSchemaVersion}, {"oracle", cfg.oracle_kind}};
  std::ostringstream text;
  text << std::setprecision(17);

  if (cfg.oracle_kind == "halfspace") {
    const double eps = analytic::halfspace_eps();
    const auto symbols = analytic::halfspace_symbols(1.0, 0.0);
    doc["eps"] = eps;
    doc["symbol_d_minus"] = "|xi|";
    doc["symbol_d_plus"] = "-|xi|";
    doc["symbol_ratio"] = symbols.d_minus / symbols.d_plus;
    text << eps << '\n';
  } else if (cfg.oracle_kind == "sphere") {
    Json rows = Json::array();
    for (const auto& e : analytic::sphere_spectrum(cfg.kmax)) {
      rows.push_back(Json{{"k", e.k}, {"eps", e.eps}, {"lambda", e.lambda},
                          {"multiplicity", e.multiplicity}});
      text << e.k << ' ' << e.eps << ' ' << e.lambda << ' ' << e.multiplicity << '\n';
    }
    doc["entries"] = std::move(rows);
  } else {
    const auto dtn = analytic::dtn_sphere(cfg.k, cfg.radius);
    doc["k"] = cfg.k;
    doc["radius"] = cfg.radius;
    doc["d_minus"] = dtn.d_minus;
    doc["d_plus"] = dtn.d_plus;
    text << dtn.d_minus << ' ' << dtn.d_plus << '\n';
  }

  if (cfg.json) {
    out << doc.dump(2) << '\n';
  } else {
    out << text.str();
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Electrostatic surface-plasmon resonances of closed surfaces"};
  app.require_subcommand(1);
  app.fallthrough();

  auto& a = cfg.settings.assembly;
  auto& t = cfg.settings.tolerances;
  app.add_option("--eta", a.eta, "Near-field distance factor")->capture_default_str();
  app.add_option("--subdiv-depth", a.subdiv_depth, "Near-field subdivision depth")
      ->capture_default_str();
  app.add_option("--max-panels", a.max_panels, "Largest accepted panel count")
      ->capture_default_str();
  app.add_option("--imag-tol", t.imag_rel, "Relative |Im lambda| cut")->capture_default_str();
  app.add_option("--monopole-tol", t.monopole, "Monopole window around lambda=-1")
      ->capture_default_str();
  app.add_option("--cluster-tol", t.cluster_rel, "Relative cluster width in eps")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Reserved (the pipeline is deterministic)");
  app.add_option("-o,--out", cfg.out, "Output file or prefix");

  auto* gen = app.add_subcommand("gen", "Generate a test surface as OFF");
  gen->add_option("kind", cfg.gen_kind, "icosphere | ellipsoid")
      ->required()
      ->check(CLI::IsMember({"icosphere", "ellipsoid"}));
  gen->add_option("--level", cfg.level, "Subdivision level")->capture_default_str();
  gen->add_option("--radius", cfg.radius, "Sphere radius")->capture_default_str();
  gen->add_option("--abc", cfg.abc, "Ellipsoid semi-axes a,b,c")->delimiter(',');

  auto* solve = app.add_subcommand("solve", "Compute resonances of a mesh");
  solve->add_option("mesh", cfg.mesh_path, "OFF or ASCII STL file")->required();
  solve->add_option("--json", cfg.json_path, "Spectrum JSON output");
  solve->add_option("--csv", cfg.csv_path, "Spectrum CSV output");
  solve->add_option("--dump-matrix", cfg.matrix_path, "Write the assembled matrix");
  solve->add_option("--export-mode", cfg.export_modes, "Write density of mode rank(s)")
      ->delimiter(',');

  auto* study = app.add_subcommand("study", "Convergence and asymptotics studies");
  study->add_option("kind", cfg.study_kind, "sphere | tail | shapes")
      ->required()
      ->check(CLI::IsMember({"sphere", "tail", "shapes"}));
  study->add_option("--levels", cfg.levels, "Icosphere levels")->delimiter(',');
  study->add_option("--ks", cfg.ks, "Multipole degrees to track")->delimiter(',');
  study->add_option("--radius", cfg.radius, "Sphere radius")->capture_default_str();
  study->add_option("--geometry", cfg.geometry, "Geometry for the tail fit")
      ->capture_default_str();
  study->add_option("--krange", cfg.krange, "Cluster rank range first,last")->delimiter(',');
  study->add_option("--geometries", cfg.geometries, "Geometries to compare");
  study->add_option("--json", cfg.json_path, "Report JSON output");
  study->add_option("--csv", cfg.csv_path, "Report CSV output");

  auto* oracle = app.add_subcommand("oracle", "Closed-form reference values");
  oracle->add_option("kind", cfg.oracle_kind, "halfspace | sphere | dtn")
      ->required()
      ->check(CLI::IsMember({"halfspace", "sphere", "dtn"}));
  oracle->add_option("--kmax", cfg.kmax, "Largest degree")->capture_default_str();
  oracle->add_option("--k", cfg.k, "Degree")->capture_default_str();
  oracle->add_option("--radius", cfg.radius, "Sphere radius")->capture_default_str();
  oracle->add_flag("--json", cfg.json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    validate(cfg);
    if (gen->parsed()) return cmd_gen(cfg, out, err);
    if (solve->parsed()) return cmd_solve(cfg, out, err);
    if (study->parsed()) return cmd_study(cfg, out, err);
    return cmd_oracle(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 3;
  }
}

}  // namespace plasmon::cli
