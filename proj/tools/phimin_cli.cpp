// phimin: command-line front end. Every run writes its artifacts and a
// manifest.json (enough to replay it) into the output directory.

#include "phimin/acceptance.hpp"
#include "phimin/asymptotics.hpp"
#include "phimin/geometry.hpp"
#include "phimin/io.hpp"
#include "phimin/numerics/quadrature.hpp"
#include "phimin/reaper.hpp"
#include "phimin/rotational.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace phimin;

namespace {

enum Exit { kPass = 0, kVerdict = 1, kUsage = 2, kNumeric = 3 };

struct Globals {
  std::string out;
  int jobs = 1;
  bool timing = false;
};

struct Run {
  std::string command;
  fs::path out;
  bool timing = false;
  Json manifest;
  Json outputs = Json::array();
  Json verdicts = Json::object();

  fs::path path(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

struct ReaperArgs {
  std::string profile = "soliton";
  double u0 = 0, xmax = 3, tol = 1e-10, zspan = 2;
  std::optional<double> tilt;
  std::string method = "ivp";
};

struct BowlArgs {
  std::string profile = "soliton";
  double z0 = 0, rmax = 30, tol = 1e-10, slope_cap = 1e8;
  std::string check = "none";
};

struct CatenoidArgs {
  std::string profile = "soliton";
  double x0 = 1, z0 = 0, rmax = 10, tol = 1e-10;
  std::string mesh;
  int ntheta = 48;
};

struct CompareArgs {
  std::string profile1, profile2;
  double z0 = 0, rmax = 5, tol = 1e-10;
};

struct AsymArgs {
  std::string profile = "soliton", law = "soliton";
  double z0 = 0, tol = 1e-10, rlo = 15, rhi = 30;
  std::optional<double> rmax;
};

struct MeshArgs {
  std::string kind = "bowl", profile = "soliton";
  double z0 = 0, u0 = 0, x0 = 1, rmax = 5, tol = 1e-10, ylo = -1, yhi = 1, xext = 0;
  int ntheta = 48, nx = 41, ny = 41;
  std::optional<double> tilt;
};

void set_common(Run& r, const std::string& sub, const std::string& profile, double tol) {
  r.manifest["subcommand"] = sub;
  r.manifest["profile"] = profile;
  r.manifest["tolerances"] = Json{{"tol", json_number(tol)}};
}

int cmd_reaper(Run& run, const ReaperArgs& a) {
  set_common(run, "reaper", a.profile, a.tol);
  run.manifest["inputs"] = Json{{"u0", a.u0}, {"xmax", a.xmax}, {"method", a.method}, {"zspan", a.zspan},
                                {"tilt", a.tilt ? json_number(*a.tilt) : Json(nullptr)}};
  const auto p = parse_profile(a.profile);
  ReaperCurve c;
  if (a.method == "quadrature") {
    std::vector<double> z;
    const double z_lo = p.phi(a.u0);
    for (int k = 1; k <= 400; ++k) z.push_back(z_lo + a.zspan * k / 400.0);
    c = reaper_quadrature(p, a.u0, z, a.tol);
  } else {
    c = solve_reaper_ivp(p, a.u0, a.xmax, a.tol);
  }
  const double drift = phase_invariant_drift(c, p);
  Json rep = reaper_report(c, drift);
  rep["endpoint_report"] = to_json(endpoint_behavior(p, a.u0, a.tol));
  write_csv(c, run.path("reaper.csv"));
  if (a.tilt) {
    ExtrudeOptions eo;
    eo.theta = *a.tilt;
    const auto m = extrude(c, p, -1.0, 1.0, eo);
    write_obj(m, run.path("tilted_reaper.obj"));
    double sup = 0;
    for (double v : m.residuals.at("pde_residual")) sup = std::max(sup, std::abs(v));
    rep["tilted_pde_residual_sup"] = json_number(sup);
  }
  write_json(rep, run.path("reaper.json"));
  std::cout << "lambda_est " << format_double(c.lambda_est) << "  endpoint " << endpoint_name(c.endpoint)
            << "  drift " << format_double(drift) << '\n';
  return kPass;
}

AsymptoticReport run_check(const std::string& law, const PhiProfile& p, const RotationalCurve& c,
                           const CheckOptions& o) {
  if (law == "soliton") return check_soliton_expansion(c, o);
  if (law == "alpha_positive") return check_alpha_positive(p, c, o);
  if (law == "alpha_zero") return check_alpha_zero(p, c, o);
  throw CLI::ValidationError("--check/--law", "unknown law " + law);
}

int cmd_bowl(Run& run, const BowlArgs& a) {
  set_common(run, "bowl", a.profile, a.tol);
  run.manifest["inputs"] = Json{{"z0", a.z0}, {"rmax", a.rmax}, {"slope_cap", json_number(a.slope_cap)}, {"check", a.check}};
  const auto p = parse_profile(a.profile);
  RotationalOptions ro;
  ro.tol = a.tol;
  ro.r_max = a.rmax;
  ro.slope_cap = a.slope_cap;
  const auto c = solve_bowl(p, a.z0, ro);
  write_csv(c, run.path("bowl.csv"));
  Json mk = markers_report(c);
  const auto om = classify_omega(p, c);
  mk["omega_class"] = omega_name(om.kind);
  mk["omega_radius"] = json_number(om.radius);
  mk["r_max"] = json_number(c.r_max());
  write_json(mk, run.path("bowl_markers.json"));
  std::cout << "r_max " << format_double(c.r_max()) << "  omega " << omega_name(om.kind) << ' '
            << format_double(om.radius) << '\n';
  if (a.check == "none") return kPass;
  const auto rep = run_check(a.check, p, c, {});
  write_json(to_json(rep), run.path("asymptotics.json"));
  run.verdicts[a.check] = rep.verdict ? "pass" : "fail";
  std::cout << a.check << ' ' << (rep.verdict ? "pass" : "fail") << '\n';
  return rep.verdict ? kPass : kVerdict;
}

int cmd_catenoid(Run& run, const CatenoidArgs& a) {
  set_common(run, "catenoid", a.profile, a.tol);
  run.manifest["inputs"] = Json{{"x0", a.x0}, {"z0", a.z0}, {"rmax", a.rmax}, {"mesh", a.mesh}, {"ntheta", a.ntheta}};
  const auto p = parse_profile(a.profile);
  RotationalOptions ro;
  ro.tol = a.tol;
  ro.r_max = a.rmax;
  const auto cat = solve_catenoid(p, a.x0, a.z0, ro);
  write_csv(cat.left, run.path("catenoid_left.csv"));
  write_csv(cat.right, run.path("catenoid_right.csv"));
  Json mk;
  mk["left"] = markers_report(cat.left);
  mk["right"] = markers_report(cat.right);
  mk["neck_min_x"] = json_number(cat.neck_min_x);
  mk["x0"] = json_number(cat.x0);
  if (!a.mesh.empty()) {
    const auto m = revolve(cat, p, a.ntheta);
    write_obj(m, run.path(a.mesh));
    mk["euler_characteristic"] = euler_characteristic(m);
    mk["orientation_consistent"] = orientation_consistent(m);
  }
  write_json(mk, run.path("catenoid_markers.json"));
  std::cout << "s_half " << (cat.left.markers.s_half ? format_double(*cat.left.markers.s_half) : "none") << "  s_min "
            << (cat.left.markers.s_min ? format_double(*cat.left.markers.s_min) : "none") << "  neck_min_x "
            << format_double(cat.neck_min_x) << '\n';
  return kPass;
}

int cmd_compare(Run& run, const CompareArgs& a) {
  set_common(run, "compare", a.profile1 + " vs " + a.profile2, a.tol);
  run.manifest["inputs"] = Json{{"profile1", a.profile1}, {"profile2", a.profile2}, {"z0", a.z0}, {"rmax", a.rmax}};
  const auto res = compare_profiles(parse_profile(a.profile1), parse_profile(a.profile2), a.z0, a.rmax, a.tol);
  Json j{{"dominates", res.dominates}, {"min_margin", json_number(res.min_margin)}, {"r0", json_number(res.r0)},
         {"points", res.points}};
  write_json(j, run.path("compare.json"));
  run.verdicts["dominates"] = res.dominates;
  std::cout << "dominates " << (res.dominates ? "true" : "false") << "  min_margin " << format_double(res.min_margin)
            << '\n';
  return res.dominates ? kPass : kVerdict;
}

int cmd_asymptotics(Run& run, const AsymArgs& a) {
  const double rmax = a.rmax.value_or(a.law == "alpha_positive" ? 12.0 : a.rhi);
  set_common(run, "asymptotics", a.profile, a.tol);
  run.manifest["inputs"] = Json{{"z0", a.z0}, {"law", a.law}, {"rmax", rmax}, {"rlo", a.rlo}, {"rhi", a.rhi}};
  const auto p = parse_profile(a.profile);
  RotationalOptions ro;
  ro.tol = a.tol;
  ro.r_max = rmax;
  if (a.law == "alpha_positive") ro.slope_cap = kInf;
  const auto c = solve_bowl(p, a.z0, ro);
  CheckOptions co;
  co.r_lo = a.rlo;
  co.r_hi = a.rhi;
  const auto rep = run_check(a.law, p, c, co);
  write_json(to_json(rep), run.path("asymptotics.json"));
  run.verdicts[a.law] = rep.verdict ? "pass" : "fail";
  for (const auto& s : rep.subchecks)
    std::cout << (s.pass ? "[ok]   " : "[fail] ") << s.name << ' ' << format_double(s.value) << '\n';
  std::cout << a.law << ' ' << (rep.verdict ? "pass" : "fail") << '\n';
  return rep.verdict ? kPass : kVerdict;
}

int cmd_mesh(Run& run, const MeshArgs& a) {
  set_common(run, "mesh", a.profile, a.tol);
  run.manifest["inputs"] = Json{{"kind", a.kind}, {"z0", a.z0}, {"u0", a.u0}, {"x0", a.x0}, {"rmax", a.rmax},
                                {"ntheta", a.ntheta}, {"ylo", a.ylo}, {"yhi", a.yhi}, {"nx", a.nx}, {"ny", a.ny},
                                {"xext", a.xext}, {"tilt", a.tilt ? json_number(*a.tilt) : Json(nullptr)}};
  const auto p = parse_profile(a.profile);
  RotationalOptions ro;
  ro.tol = a.tol;
  ro.r_max = a.rmax;
  SurfaceMesh m;
  if (a.kind == "bowl") {
    m = revolve(solve_bowl(p, a.z0, ro), p, a.ntheta);
  } else if (a.kind == "catenoid") {
    m = revolve(solve_catenoid(p, a.x0, a.z0, ro), p, a.ntheta);
  } else if (a.kind == "reaper") {
    const auto c = solve_reaper_ivp(p, a.u0, a.rmax, a.tol);
    ExtrudeOptions eo;
    eo.theta = a.tilt;
    eo.x_extent = a.xext;
    eo.nx = a.nx;
    eo.ny = a.ny;
    m = extrude(c, p, a.ylo, a.yhi, eo);
  } else {
    throw CLI::ValidationError("--kind", "expected bowl, catenoid or reaper");
  }
  write_obj(m, run.path("mesh.obj"));
  Json j{{"vertices", m.vertices.size()}, {"faces", m.faces.size()}, {"euler_characteristic", euler_characteristic(m)},
         {"orientation_consistent", orientation_consistent(m)}};
  Json res = Json::object();
  for (const auto& [name, v] : m.residuals) {
    double sup = 0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    res[name] = json_number(sup);
  }
  j["residual_sup"] = res;
  write_json(j, run.path("mesh.json"));
  std::cout << "vertices " << m.vertices.size() << "  faces " << m.faces.size() << "  chi " << euler_characteristic(m)
            << '\n';
  return kPass;
}

int cmd_verify(Run& run, const std::string& suite, const Globals& g) {
  run.manifest["subcommand"] = "verify";
  run.manifest["inputs"] = Json{{"suite", suite}};
  AcceptanceOptions o;
  o.out_dir = run.out / "verify";
  o.jobs = g.jobs;
  o.timing = g.timing;
  const auto res = run_suite(suite_ids(suite), o);
  bool all = true;
  for (const auto& r : res) {
    std::cout << result_line(r) << '\n';
    run.verdicts[std::to_string(r.id)] = r.pass ? "pass" : "fail";
    all = all && r.pass;
  }
  write_json(summary_json(res, g.timing), run.path("verify/summary.json"));
  std::cout << (all ? "all criteria pass" : "some criteria fail") << '\n';
  return all ? kPass : kVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and checker for rotational and translating [phi,e3]-minimal surfaces", "phimin"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the flags (flags take precedence)");

  Globals g;
  const char* env = std::getenv("PHIMIN_OUT");
  g.out = env && *env ? env : "phimin_out";
  app.add_option("--out", g.out, "output directory (default $PHIMIN_OUT or ./phimin_out)");
  app.add_option("--jobs", g.jobs, "parallel verification cases")->check(CLI::PositiveNumber);
  app.add_flag("--timing", g.timing, "record wall times in outputs (breaks byte-identity)");

  ReaperArgs ra;
  auto* reaper = app.add_subcommand("reaper", "grim reaper profile u'' = dphi(u)(1+u'^2)");
  reaper->add_option("--profile", ra.profile, "profile spec kind[:p1,p2,...]");
  reaper->add_option("--u0", ra.u0, "height at x = 0")->required();
  reaper->add_option("--xmax", ra.xmax, "integrate to this x");
  reaper->add_option("--tol", ra.tol)->check(CLI::PositiveNumber);
  reaper->add_option("--method", ra.method)->check(CLI::IsMember({"ivp", "quadrature"}));
  reaper->add_option("--zspan", ra.zspan, "height span of the quadrature grid");
  reaper->add_option("--tilt", ra.tilt, "also write the tilted surface, angle in ]0, pi/2[");

  BowlArgs ba;
  auto* bowl = app.add_subcommand("bowl", "rotational graph meeting the axis orthogonally");
  bowl->add_option("--profile", ba.profile);
  bowl->add_option("--z0", ba.z0, "height on the axis")->required();
  bowl->add_option("--rmax", ba.rmax);
  bowl->add_option("--tol", ba.tol)->check(CLI::PositiveNumber);
  bowl->add_option("--slope-cap", ba.slope_cap, "|u'| above this counts as blow-up");
  bowl->add_option("--check", ba.check)->check(CLI::IsMember({"none", "soliton", "alpha_positive", "alpha_zero"}));

  CatenoidArgs ca;
  auto* catenoid = app.add_subcommand("catenoid", "winglike catenoid from a vertical tangent at (x0, z0)");
  catenoid->add_option("--profile", ca.profile);
  catenoid->add_option("--x0", ca.x0)->required()->check(CLI::PositiveNumber);
  catenoid->add_option("--z0", ca.z0)->required();
  catenoid->add_option("--rmax", ca.rmax);
  catenoid->add_option("--tol", ca.tol)->check(CLI::PositiveNumber);
  catenoid->add_option("--mesh", ca.mesh, "write the revolved annulus to this OBJ (inside --out)");
  catenoid->add_option("--ntheta", ca.ntheta)->check(CLI::Range(3, 100000));

  CompareArgs pa;
  auto* compare = app.add_subcommand("compare", "comparison of two bowls from the same height");
  compare->add_option("--profile1", pa.profile1)->required();
  compare->add_option("--profile2", pa.profile2)->required();
  compare->add_option("--z0", pa.z0);
  compare->add_option("--rmax", pa.rmax);
  compare->add_option("--tol", pa.tol)->check(CLI::PositiveNumber);

  AsymArgs aa;
  auto* asym = app.add_subcommand("asymptotics", "asymptotic law checks on a solved bowl");
  asym->add_option("--profile", aa.profile);
  asym->add_option("--z0", aa.z0);
  asym->add_option("--law", aa.law)->check(CLI::IsMember({"soliton", "alpha_positive", "alpha_zero"}));
  asym->add_option("--rmax", aa.rmax);
  asym->add_option("--rlo", aa.rlo);
  asym->add_option("--rhi", aa.rhi);
  asym->add_option("--tol", aa.tol)->check(CLI::PositiveNumber);

  MeshArgs ma;
  auto* mesh = app.add_subcommand("mesh", "OBJ mesh of a bowl, catenoid or (tilted) reaper");
  mesh->add_option("--kind", ma.kind)->check(CLI::IsMember({"bowl", "catenoid", "reaper"}));
  mesh->add_option("--profile", ma.profile);
  mesh->add_option("--z0", ma.z0);
  mesh->add_option("--u0", ma.u0);
  mesh->add_option("--x0", ma.x0);
  mesh->add_option("--rmax", ma.rmax, "radius (bowl, catenoid) or x range (reaper)");
  mesh->add_option("--tol", ma.tol)->check(CLI::PositiveNumber);
  mesh->add_option("--ntheta", ma.ntheta)->check(CLI::Range(3, 100000));
  mesh->add_option("--tilt", ma.tilt);
  mesh->add_option("--ylo", ma.ylo);
  mesh->add_option("--yhi", ma.yhi);
  mesh->add_option("--xext", ma.xext, "half-width in x of the reaper mesh (0: automatic)");
  mesh->add_option("--nx", ma.nx)->check(CLI::Range(2, 100000));
  mesh->add_option("--ny", ma.ny)->check(CLI::Range(2, 100000));

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "acceptance suite, one line per criterion");
  verify->add_option("--suite", suite, "all, reaper, rotational, asymptotics, geometry, determinism or a list 1,2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  Run run;
  run.out = g.out;
  run.timing = g.timing;
  for (int k = 1; k < argc; ++k) run.command += (k > 1 ? " " : "") + std::string(argv[k]);
  const auto t0 = std::chrono::steady_clock::now();
  int code = kPass;
  try {
    if (*reaper) code = cmd_reaper(run, ra);
    else if (*bowl) code = cmd_bowl(run, ba);
    else if (*catenoid) code = cmd_catenoid(run, ca);
    else if (*compare) code = cmd_compare(run, pa);
    else if (*asym) code = cmd_asymptotics(run, aa);
    else if (*mesh) code = cmd_mesh(run, ma);
    else if (*verify) code = cmd_verify(run, suite, g);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    // bad profile specs, domain violations and unmet preconditions
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }

  Json m;
  m["command"] = run.command;
  for (const auto& [k, v] : run.manifest.items()) m[k] = v;
  m["output_dir"] = run.out.string();
  m["outputs"] = run.outputs;
  m["verdicts"] = run.verdicts;
  m["exit_code"] = code;
  if (run.timing)
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_json(m, run.out / "manifest.json");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return code;
}
