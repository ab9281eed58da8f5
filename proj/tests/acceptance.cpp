// Acceptance suite: one PASS/FAIL line per criterion.

#include "cli.hpp"
#include "plasmon/analytic.hpp"
#include "plasmon/mesh.hpp"
#include "plasmon/np_operator.hpp"
#include "plasmon/spectra.hpp"
#include "plasmon/study.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace plasmon;
namespace fs = std::filesystem;

namespace {

constexpr double kFourPi = 12.566370614359172;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail << std::setprecision(6);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " |"
            << o.detail.str() << " (" << std::fixed << std::setprecision(1) << secs << " s)"
            << std::defaultfloat << std::endl;
}

// Every operator assembled by the suite, for the column-identity sweep.
std::vector<double> column_errors;

NPOperator build(const SurfaceMesh& mesh) {
  NPOperator op = assemble(panelize(mesh));
  column_errors.push_back(column_identity_error(op));
  return op;
}

struct Solved {
  NPOperator op;
  ModeSet modes;
};

std::map<std::string, Solved>& cache() {
  static std::map<std::string, Solved> c;
  return c;
}

const Solved& solved(const std::string& spec) {
  auto& c = cache();
  auto it = c.find(spec);
  if (it == c.end()) {
    NPOperator op = build(GeometrySpec::parse(spec).build());
    ModeSet modes = solve_modes(op);
    it = c.emplace(spec, Solved{std::move(op), std::move(modes)}).first;
  }
  return it->second;
}

double rel_err(double value, double target) { return std::abs(value - target) / std::abs(target); }

using Values = std::vector<std::complex<double>>;

double spectrum_distance(const Values& a, const Values& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0, scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, std::abs(v));
  for (const auto& v : a) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(v - b[j]) < best_d) {
        best_d = std::abs(v - b[j]);
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst / scale;
}

Values spectrum_of(const SurfaceMesh& mesh) { return eigendecompose(build(mesh)).values; }

int run_cli(std::vector<std::string> args, std::string& out) {
  args.insert(args.begin(), "plasmon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  std::cout << "plasmon acceptance suite" << std::endl;

  report(1, "half-space oracle is exactly -1", [](Outcome& o) {
    std::string out;
    const int code = run_cli({"oracle", "halfspace"}, out);
    o.detail << " cli='" << out.substr(0, out.find('\n')) << "' value=" << analytic::halfspace_eps();
    o.require(code == 0, "exit code");
    o.require(out == "-1\n", "cli output");
    o.require(analytic::halfspace_eps() == -1.0, "value");
  });

  report(2, "sphere dipole triplet near eps=-2 (level 4 within 3%, level 3 within 5%)",
         [](Outcome& o) {
           for (const auto& [spec, tol] :
                std::vector<std::pair<std::string, double>>{{"icosphere:3", 0.05},
                                                            {"icosphere:4", 0.03}}) {
             const auto& s = solved(spec);
             const auto& lead = s.modes.clusters.at(0);
             const double err = rel_err(lead.mean_eps, -2.0);
             o.detail << ' ' << spec << ": N=" << s.op.size()
                      << " mult=" << lead.multiplicity() << " mean=" << lead.mean_eps
                      << " rel_err=" << err;
             o.require(lead.multiplicity() == 3, spec + " multiplicity");
             o.require(err < tol, spec + " mean");
           }
         });

  report(3, "level 3 multiplets 3,5,7 near -2, -3/2, -4/3 (5%)", [](Outcome& o) {
    const auto& s = solved("icosphere:3");
    for (int k = 1; k <= 3; ++k) {
      const auto& c = s.modes.clusters.at(static_cast<std::size_t>(k - 1));
      const double err = rel_err(c.mean_eps, analytic::sphere_eps(k));
      o.detail << " k=" << k << " mult=" << c.multiplicity() << " mean=" << c.mean_eps
               << " rel_err=" << err;
      o.require(c.multiplicity() == static_cast<std::size_t>(2 * k + 1),
                "multiplicity k=" + std::to_string(k));
      o.require(err < 0.05, "mean k=" + std::to_string(k));
    }
  });

  report(4, "k=1,2 cluster errors strictly decrease over levels 2,3,4", [](Outcome& o) {
    std::vector<std::vector<SphereMatch>> per_level;
    for (const char* spec : {"icosphere:2", "icosphere:3", "icosphere:4"}) {
      per_level.push_back(match_sphere_clusters(solved(spec).modes, 2));
    }
    for (int k = 1; k <= 2; ++k) {
      o.detail << " k=" << k << ":";
      for (std::size_t l = 0; l < per_level.size(); ++l) {
        const auto& m = per_level[l][static_cast<std::size_t>(k - 1)];
        o.detail << ' ' << m.rel_error;
        o.require(m.matched, "cluster match k=" + std::to_string(k));
        if (l > 0) {
          o.require(m.rel_error < per_level[l - 1][static_cast<std::size_t>(k - 1)].rel_error,
                    "decrease k=" + std::to_string(k));
        }
      }
    }
  });

  report(5, "tail fit c over k=1..3 at level 4 within 15% of 1", [](Outcome& o) {
    const auto fit = tail_fit(solved("icosphere:4").modes, TailIndexing::Sphere, 1, 3);
    o.detail << " c=" << fit.c << " rms_residual=" << fit.rms_residual;
    o.require(std::abs(fit.c - 1.0) < 0.15, "c");
  });

  report(6, "ellipsoid 2:1:1 low-half median near -1, near(-1) fraction not decreasing",
         [](Outcome& o) {
           const auto& l2 = solved("ellipsoid:2,1,1:2");
           const auto& l3 = solved("ellipsoid:2,1,1:3");
           const auto s2 = shape_stats(l2.modes, "ellipsoid:2,1,1:2", l2.op.panels.size());
           const auto s3 = shape_stats(l3.modes, "ellipsoid:2,1,1:3", l3.op.panels.size());
           o.detail << " level3 median=" << s3.median_low_half_eps
                    << " near_fraction level2=" << s2.near_minus_one
                    << " level3=" << s3.near_minus_one;
           o.require(std::abs(s3.median_low_half_eps + 1.0) < 0.15, "median");
           o.require(s3.near_minus_one >= s2.near_minus_one, "fraction");
         });

  report(7, "gauss_check within 0.5% of 4pi at level 3, error decreasing over levels 1..4",
         [](Outcome& o) {
           double previous = std::numeric_limits<double>::infinity();
           for (int level = 1; level <= 4; ++level) {
             const double g = gauss_check(panelize(gen_icosphere(level, 1.0)), Vec3::Zero());
             const double err = std::abs(g - kFourPi) / kFourPi;
             o.detail << " L" << level << "=" << err;
             if (level == 3) o.require(err < 0.005, "level 3 bound");
             o.require(err < previous, "monotone at level " + std::to_string(level));
             previous = err;
           }
         });

  // The column-identity sweep covers every operator built up to this point.
  report(8, "column identity on every operator; rotation, permutation, scaling invariance",
         [](Outcome& o) {
           const auto sphere = gen_icosphere(2, 1.0);
           const auto ellipsoid = gen_ellipsoid(1.6, 1.0, 0.8, 2);
           const auto base_s = spectrum_of(sphere);
           const auto base_e = spectrum_of(ellipsoid);

           const Eigen::Matrix3d r90 = testing::rotation_z(std::numbers::pi / 2);
           const Eigen::Matrix3d r_gen =
               Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
           const double rot = std::max(
               spectrum_distance(base_s, spectrum_of(testing::transformed(sphere, r90))),
               spectrum_distance(base_e, spectrum_of(testing::transformed(ellipsoid, r_gen))));

           double perm = 0.0;
           for (unsigned seed = 1; seed <= 3; ++seed) {
             auto shuffled = ellipsoid;
             testing::permute_triangles(shuffled, seed);
             perm = std::max(perm, spectrum_distance(base_e, spectrum_of(shuffled)));
           }

           double scale = 0.0;
           for (const double t : {0.02, 7.3}) {
             scale = std::max(scale, spectrum_distance(
                                         base_s, spectrum_of(testing::transformed(
                                                     sphere, Eigen::Matrix3d::Identity(), t))));
           }

           double col = 0.0;
           for (const double e : column_errors) col = std::max(col, e);
           o.detail << " operators=" << column_errors.size() << " max_column_err=" << col
                    << " rotation=" << rot << " permutation=" << perm << " scaling=" << scale;
           o.require(col <= 1e-12, "column identity");
           o.require(rot <= 1e-8, "rotation");
           o.require(perm <= 1e-10, "permutation");
           o.require(scale <= 1e-10, "scaling");
         });

  report(9, "one monopole near -1, charge neutrality and residual bound on every solve",
         [](Outcome& o) {
           for (const char* spec : {"icosphere:2", "icosphere:3", "icosphere:4",
                                    "ellipsoid:2,1,1:2", "ellipsoid:2,1,1:3"}) {
             const auto& s = solved(spec);
             double worst_charge = 0.0, worst_residual = 0.0, mono_lambda = 0.0;
             for (const auto& m : s.modes.modes) {
               worst_residual = std::max(
                   worst_residual, m.residual / (s.modes.operator_norm * m.sigma.norm()));
               if (m.monopole) {
                 mono_lambda = m.lambda;
               } else {
                 worst_charge =
                     std::max(worst_charge, charge_imbalance(m.sigma, s.op.panels.area));
               }
             }
             o.detail << ' ' << spec << ": monopoles=" << s.modes.monopole_count()
                      << " lambda=" << mono_lambda << " max_charge=" << worst_charge
                      << " max_residual=" << worst_residual;
             o.require(s.modes.monopole_count() == 1, std::string(spec) + " monopole count");
             o.require(std::abs(mono_lambda + 1.0) < 0.05, std::string(spec) + " monopole lambda");
             o.require(worst_charge <= 1e-3, std::string(spec) + " neutrality");
             o.require(worst_residual <= 1e-8, std::string(spec) + " residual");
           }
         });

  report(10, "map round trip to 1e-14 and exact sphere identity for k=1..100", [](Outcome& o) {
    // Stated domain [-10,-1.01] U [-0.99,10]; eps = 1 is the pole of the
    // inverse map and is excluded.
    std::vector<double> samples;
    for (int i = 0; i <= 100000; ++i) {
      const double t = -10.0 + 20.0 * i / 100000.0;
      if ((t >= -10.0 && t <= -1.01) || (t >= -0.99 && t <= 10.0)) samples.push_back(t);
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> left(-10.0, -1.01), right(-0.99, 10.0);
    for (int i = 0; i < 100000; ++i) samples.push_back(i % 2 ? left(rng) : right(rng));

    double worst = 0.0, worst_at = 0.0;
    std::size_t tested = 0;
    for (const double eps : samples) {
      if (eps == 1.0) continue;
      ++tested;
      const double back = eps_from_lambda(lambda_from_eps(eps));
      const double rel = eps == 0.0 ? std::abs(back) : std::abs(back - eps) / std::abs(eps);
      if (rel > worst) {
        worst = rel;
        worst_at = eps;
      }
    }
    int exact = 0;
    for (int k = 1; k <= 100; ++k) {
      if (eps_from_lambda(-1.0 / (2.0 * k + 1.0)) == -(k + 1.0) / k) ++exact;
    }
    o.detail << " samples=" << tested << " worst_rel=" << worst << " at eps=" << worst_at
             << " exact_k=" << exact << "/100";
    o.require(worst <= 1e-14, "round trip");
    o.require(exact == 100, "sphere identity");
  });

  report(11, "repeated solve gives byte-identical JSON and CSV", [](Outcome& o) {
    const fs::path dir = fs::temp_directory_path() / "plasmon_acceptance";
    fs::create_directories(dir);
    const std::string mesh = (dir / "s3.off").string();
    std::string out;
    o.require(run_cli({"gen", "icosphere", "--level", "3", "-o", mesh}, out) == 0, "gen");
    for (const char* tag : {"a", "b"}) {
      const std::string p = (dir / tag).string();
      o.require(run_cli({"solve", mesh, "--json", p + ".json", "--csv", p + ".csv"}, out) == 0,
                "solve");
    }
    const auto ja = slurp((dir / "a.json").string()), jb = slurp((dir / "b.json").string());
    const auto ca = slurp((dir / "a.csv").string()), cb = slurp((dir / "b.csv").string());
    o.detail << " json_bytes=" << ja.size() << " csv_bytes=" << ca.size();
    o.require(!ja.empty() && ja == jb, "json");
    o.require(!ca.empty() && ca == cb, "csv");
    fs::remove_all(dir);
  });

  std::cout << "acceptance run complete: " << (11 - failures) << "/11 criteria passed"
            << std::endl;
  return failures;
}
