#include "phimin/acceptance.hpp"

#include "phimin/asymptotics.hpp"
#include "phimin/geometry.hpp"
#include "phimin/reaper.hpp"
#include "phimin/rotational.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <thread>

namespace phimin {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double sup_abs(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

const SubCheck* find_sub(const AsymptoticReport& r, const std::string& name) {
  for (const auto& s : r.subchecks)
    if (s.name == name) return &s;
  return nullptr;
}

struct Ctx {
  const AcceptanceOptions& o;
  void write(const std::string& name, const ReaperCurve& c) const {
    if (!o.out_dir.empty()) write_csv(c, o.out_dir / name);
  }
  void write(const std::string& name, const RotationalCurve& c) const {
    if (!o.out_dir.empty()) write_csv(c, o.out_dir / name);
  }
  void write(const std::string& name, const SurfaceMesh& m) const {
    if (!o.out_dir.empty()) write_obj(m, o.out_dir / name);
  }
  void write(const std::string& name, const Json& j) const {
    if (!o.out_dir.empty()) write_json(j, o.out_dir / name);
  }
};

using Body = CriterionResult (*)(const Ctx&);

// 1. Translating-soliton reaper against -log cos x.
CriterionResult c1(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 1.4, 1e-10);
  double err = 0;
  const int n = 2800;
  for (int i = 0; i <= n; ++i) {
    const double x = 1.4 * (2.0 * i / n - 1);
    err = std::max(err, std::abs(c.u_at(x) + std::log(std::cos(x))));
  }
  const double lam = lambda_estimate(p, 0.0, 1e-10);
  r.pass = err <= 1e-8 && std::abs(lam - M_PI / 2) <= 1e-6;
  r.detail = fmt("sup|u+log cos x|=%.3g lambda-pi/2=%.3g", err, lam - M_PI / 2);
  ctx.write("reaper_soliton.csv", c);
  ctx.write("reaper_soliton.json", reaper_report(c, phase_invariant_drift(c, p)));
  return r;
}

// 2. Singular minimal reaper against cosh x.
CriterionResult c2(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::singular_log, {1.0});
  const auto c = solve_reaper_ivp(p, 1.0, 2.0, 1e-10);
  double err = 0;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double x = 2.0 * (2.0 * i / n - 1);
    err = std::max(err, std::abs(c.u_at(x) - std::cosh(x)));
  }
  const bool fin = lambda_finite(p, 1.0);
  r.pass = err <= 1e-8 && !fin;
  r.detail = fmt("sup|u-cosh x|=%.3g lambda_finite=%s", err, fin ? "true" : "false");
  ctx.write("reaper_cosh.csv", c);
  return r;
}

// 3. Conservation of e^phi cos(arctan u') along reapers.
CriterionResult c3(const Ctx&) {
  CriterionResult r;
  struct Case {
    const char* spec;
    double u0, x_max;
  };
  const Case cases[] = {{"soliton", 0.0, 1.5},      {"singular_log:1", 1.0, 3.0}, {"singular_log:2", 1.0, 1.5},
                        {"quadratic:1,1", 0.0, 1.2}, {"singular_log:-1", 2.0, 1.99}, {"arctan", 0.0, 3.0},
                        {"power:2", 1.0, 1.0}};
  double worst = 0;
  std::string who;
  for (const auto& k : cases) {
    const auto p = parse_profile(k.spec);
    const auto c = solve_reaper_ivp(p, k.u0, k.x_max, 1e-10);
    const double d = phase_invariant_drift(c, p);
    if (!(d <= worst)) {
      worst = d;
      who = k.spec;
    }
  }
  r.pass = worst <= 1e-8;
  r.detail = fmt("max relative drift %.3g (%s) over %d reapers", worst, who.c_str(), int(std::size(cases)));
  return r;
}

// 4. Finiteness of the half-width.
CriterionResult c4(const Ctx&) {
  CriterionResult r;
  const bool a = lambda_finite(make_preset(PresetKind::soliton), 0.0);
  const bool b = lambda_finite(make_preset(PresetKind::singular_log, {1.0}), 1.0);
  const bool c = lambda_finite(make_preset(PresetKind::singular_log, {2.0}), 1.0);
  r.pass = a && !b && c;
  r.detail = fmt("phi=u:%s phi=log u:%s phi=2log u:%s", a ? "finite" : "infinite", b ? "finite" : "infinite",
                 c ? "finite" : "infinite");
  return r;
}

// 5. u''(0) = dphi(z0)/2 from Richardson-extrapolated difference quotients.
CriterionResult c5(const Ctx&) {
  CriterionResult r;
  struct Case {
    const char* spec;
    double z0;
  };
  const Case cases[] = {{"soliton", 0.0}, {"quadratic:0,2", 0.0}, {"quadratic:1,1", 1.0}, {"power:2", 1.0}, {"ulogu", 2.0}};
  double worst = 0;
  std::ostringstream os;
  for (const auto& k : cases) {
    const auto p = parse_profile(k.spec);
    RotationalOptions ro;
    ro.tol = 1e-12;
    ro.r_max = 0.5;
    const auto c = solve_bowl(p, k.z0, ro);
    auto D = [&](double h) { return 2 * (c.u_at(h) - k.z0) / (h * h); };
    const double h = 0.2;
    const double d1 = D(h), d2 = D(h / 2), d3 = D(h / 4);
    const double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
    const double est = (16 * r2 - r1) / 15;
    const double err = std::abs(est - p.dphi(k.z0) / 2);
    worst = std::max(worst, err);
    os << (os.tellp() > 0 ? "; " : "") << k.spec << ' ' << fmt("%.3g", err);
  }
  r.pass = worst <= 1e-6;
  r.detail = "|u''(0)-dphi/2|: " + os.str();
  return r;
}

RotationalCurve soliton_bowl(double r_max) {
  RotationalOptions ro;
  ro.r_max = r_max;
  return solve_bowl(make_preset(PresetKind::soliton), 0.0, ro);
}

// 6. u = r^2/2 - log r + d_bar + O(r^-2) on [15, 30].
CriterionResult c6(const Ctx& ctx) {
  CriterionResult r;
  const auto c = soliton_bowl(30);
  const auto rep = check_soliton_expansion(c);
  const SubCheck* fit = find_sub(rep, "additive_constant_fit");
  const SubCheck* trend = find_sub(rep, "rescaled_residual_trend");
  r.pass = rep.verdict;
  std::ostringstream tr;
  if (trend)
    for (double v : trend->trend) tr << fmt(" %.5g", v);
  r.detail = fmt("d_bar=%.6g sup|d-d_bar|=%.3g r^2-rescaled sup per subwindow:", rep.fitted.at("d_bar"),
                 fit ? fit->value : NAN) + tr.str();
  ctx.write("bowl_soliton.csv", c);
  ctx.write("bowl_soliton_asymptotics.json", to_json(rep));
  return r;
}

// 7. dphi = u: lambda(r) -> -1 and log dphi(u) / (r^2/2) -> 1.
CriterionResult c7(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::quadratic, {1.0, 0.0});
  RotationalOptions ro;
  ro.r_max = 12;
  ro.slope_cap = kInf;
  const auto c = solve_bowl(p, 1.0, ro);
  const auto rep = check_alpha_positive(p, c);
  const SubCheck* lam = find_sub(rep, "lambda_limit");
  const SubCheck* ratio = find_sub(rep, "log_dphi_ratio");
  r.pass = lam && ratio && lam->pass && ratio->pass;
  r.detail = fmt("lambda(r_end)=%.6g log-ratio=%.6g at r=%.4g", lam ? lam->value : NAN, ratio ? ratio->value : NAN,
                 c.r_max());
  ctx.write("bowl_alpha_positive_asymptotics.json", to_json(rep));
  return r;
}

// 8. Soliton bowl: r (u'/dphi - r) -> -1 on [15, 30].
CriterionResult c8(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::soliton);
  const auto c = soliton_bowl(30);
  const auto rep = check_alpha_zero(p, c);
  const SubCheck* lim = find_sub(rep, "rV_limit");
  r.pass = lim && lim->pass;
  r.detail = fmt("r*V(30)=%.6g, sup relative error on [15,30] = %.3g", lim ? lim->value : NAN, rep.residual_sup);
  ctx.write("bowl_soliton_alpha_zero.json", to_json(rep));
  return r;
}

// 9. Comparison principle, fixed pair plus seeded random affine pairs.
CriterionResult c9(const Ctx&) {
  CriterionResult r;
  const auto base = compare_profiles(make_preset(PresetKind::quadratic, {0.0, 2.0}), make_preset(PresetKind::quadratic, {0.0, 1.0}),
                                     0.0, 5.0);
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> ua(0.0, 1.0), ub(0.2, 1.5), dd(0.05, 1.0);
  int ok = 0;
  double worst = kInf;
  for (int k = 0; k < 20; ++k) {
    const double a2 = ua(rng), b2 = ub(rng);
    const double a1 = a2 + dd(rng) * ua(rng), b1 = b2 + dd(rng);
    const auto p1 = make_preset(PresetKind::quadratic, {a1, b1});
    const auto p2 = make_preset(PresetKind::quadratic, {a2, b2});
    const auto res = compare_profiles(p1, p2, 0.0, 3.0);
    ok += res.dominates ? 1 : 0;
    worst = std::min(worst, res.min_margin);
  }
  r.pass = base.dominates && ok == 20;
  r.detail = fmt("const 2 vs 1: min margin %.3g over r0=%.3g; random pairs %d/20 (min margin %.3g)", base.min_margin,
                 base.r0, ok, worst);
  return r;
}

// 10. u'(r) >= 0.99 r - 1/(0.99 r) on [3, 30].
CriterionResult c10(const Ctx&) {
  CriterionResult r;
  const auto c = soliton_bowl(30);
  double margin = kInf, holds_from = 3.0;
  const int n = 2700;
  for (int i = 0; i <= n; ++i) {
    const double x = 3.0 + 27.0 * i / n;
    const double m = c.slope_at(x) - (0.99 * x - 1 / (0.99 * x));
    margin = std::min(margin, m);
    if (!(m > 0)) holds_from = 3.0 + 27.0 * (i + 1) / n;
  }
  r.pass = margin > 0;
  r.detail = fmt("min of u' - (0.99r - 1/(0.99r)) on [3,30] = %.4g; bound holds on [%.4g, 30]", margin, holds_from);
  return r;
}

// 11. Winglike catenoid: turning point, interior minimum of theta, annulus.
CriterionResult c11(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::soliton);
  RotationalOptions ro;
  ro.r_max = 10;
  const auto cat = solve_catenoid(p, 1.0, 0.0, ro);
  const auto& mk = cat.left.markers;
  bool after_positive = false;
  if (mk.s_half && mk.s_min && *mk.s_half < *mk.s_min) {
    after_positive = true;
    int seen = 0;
    for (const auto& s : cat.left.samples)
      if (s.s > *mk.s_min + 1e-3) {
        after_positive = after_positive && s.kappa > 0;
        ++seen;
      }
    after_positive = after_positive && seen > 0;
  }
  const auto m = revolve(cat, p, 48);
  const int chi = euler_characteristic(m);
  r.pass = after_positive && chi == 0 && orientation_consistent(m);
  r.detail = fmt("s_half=%.6g s_min=%.6g theta'>0 after: %s; neck min x=%.4g; chi=%d", mk.s_half.value_or(NAN),
                 mk.s_min.value_or(NAN), after_positive ? "yes" : "no", cat.neck_min_x, chi);
  ctx.write("catenoid_left.csv", cat.left);
  ctx.write("catenoid_right.csv", cat.right);
  ctx.write("catenoid_left_markers.json", markers_report(cat.left));
  ctx.write("catenoid.obj", m);
  return r;
}

// 12. dphi = u^2 blows up at a tolerance-stable radius; the soliton bowl is entire.
CriterionResult c12(const Ctx&) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::power, {2.0});
  double om[2];
  bool finite = true;
  const double tols[2] = {1e-8, 1e-10};
  for (int k = 0; k < 2; ++k) {
    RotationalOptions ro;
    ro.tol = tols[k];
    ro.r_max = 10;
    const auto c = solve_bowl(p, 1.0, ro);
    const auto w = classify_omega(p, c);
    finite = finite && w.kind == OmegaClass::finite;
    om[k] = w.radius;
  }
  const double var = std::abs(om[0] - om[1]) / om[1];
  const auto s = soliton_bowl(1000);
  const bool entire = !s.blown_up && s.r_max() >= 1000 * (1 - 1e-12);
  r.pass = finite && var <= 0.01 && entire;
  r.detail = fmt("omega(1e-8)=%.9g omega(1e-10)=%.9g variation %.2g; soliton bowl reached r=%.6g", om[0], om[1], var,
                 s.r_max());
  return r;
}

// 13. Graph equation residuals: tilted reaper and two negative controls.
CriterionResult c13(const Ctx& ctx) {
  CriterionResult r;
  const auto p = make_preset(PresetKind::soliton);
  const auto base = solve_reaper_ivp(p, 0.0, 1.5, 1e-10);
  const TiltedReaper t(base, p, M_PI / 4);
  // 54 x 54 nodes leave a 50 x 50 interior once the two-cell band is removed.
  const GraphFn tilted = [&](double x, double y) { return t.jet(x, y); };
  const auto g = sample_grid(tilted, -1.0, 1.0, -1.0, 1.0, 54, 54);
  const double fd = grid_residual_sup(g, p);
  std::vector<std::array<double, 2>> pts;
  for (int j = 2; j < 52; ++j)
    for (int i = 2; i < 52; ++i) pts.push_back({g.x0 + i * g.hx, g.y0 + j * g.hy});
  const double jet = sup_abs(pde_residual(tilted, p, pts));
  const GraphFn cyl = [](double x, double) { GraphJet j; j.u = std::sqrt(4 - x * x); return j; };
  const GraphFn cap = [](double x, double y) { GraphJet j; j.u = std::sqrt(4 - x * x - y * y); return j; };
  const double rc = grid_residual_sup(sample_grid(cyl, -1, 1, -1, 1, 54, 54), p);
  const double rs = grid_residual_sup(sample_grid(cap, -1, 1, -1, 1, 54, 54), p);
  r.pass = fd <= 1e-6 && jet <= 1e-6 && rc >= 0.1 && rs >= 0.1;
  r.detail = fmt("tilted: grid %.3g jet %.3g; cylinder %.3g; sphere cap %.3g", fd, jet, rc, rs);
  ExtrudeOptions eo;
  eo.theta = M_PI / 4;
  eo.x_extent = 1.0;
  ctx.write("tilted_reaper.obj", extrude(base, p, -1.0, 1.0, eo));
  return r;
}

// 14. Pointwise identities on solved curves; circle arc as negative control.
CriterionResult c14(const Ctx& ctx) {
  CriterionResult r;
  double e2 = 0, e5 = 0;
  struct Case {
    const char* spec;
    double z0;
  };
  const Case bowls[] = {{"soliton", 0.0}, {"quadratic:0,2", 0.0}, {"quadratic:1,1", 1.0}};
  for (const auto& k : bowls) {
    const auto p = parse_profile(k.spec);
    RotationalOptions ro;
    ro.r_max = 5;
    ro.max_step = 0.01;
    const auto c = solve_bowl(p, k.z0, ro);
    const auto id = identity_checks(c, p, {0.5, 5.0});
    e2 = std::max(e2, id.e2_gap);
    e5 = std::max(e5, id.e5_gap);
    if (std::string(k.spec) == "soliton") ctx.write("bowl_soliton_identities.json", to_json(id));
  }
  const auto sol = make_preset(PresetKind::soliton);
  const auto cat = solve_catenoid(sol, 1.0, 0.0);
  for (const auto* b : {&cat.left, &cat.right}) e2 = std::max(e2, identity_checks(*b, sol).e2_gap);
  e2 = std::max(e2, identity_checks(solve_reaper_ivp(sol, 0.0, 1.5), sol).e2_gap);
  RotationalCurve arc;
  arc.kind = RotKind::catenoid_right;
  for (int k = 0; k < 60; ++k) {
    const double s = 0.5 + 0.02 * k;
    RotSample q;
    q.s = s;
    q.theta = s;
    q.x = 1 + std::sin(s);
    q.z = 1 - std::cos(s);
    q.kappa = 1;
    arc.samples.push_back(q);
  }
  const double ctrl = identity_checks(arc, sol).e5_gap;
  r.pass = e2 <= 1e-12 && e5 <= 1e-6 && ctrl >= 0.1;
  r.detail = fmt("e2 gap %.3g; e5 gap on bowls (r in [0.5,5]) %.3g; circle arc e5 %.3g", e2, e5, ctrl);
  return r;
}

CriterionResult c15(const Ctx& ctx);

const Body kBodies[kCriteria] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15};

const char* const kTitles[kCriteria] = {
    "grim reaper oracle (soliton)",
    "singular minimal reaper oracle (cosh)",
    "phase invariant conservation",
    "half-width finiteness table",
    "bowl singular start u''(0)",
    "soliton bowl expansion",
    "alpha>0 asymptotic regime",
    "alpha=0 asymptotic regime",
    "comparison principle",
    "soliton slope lower bound",
    "winglike catenoid structure",
    "blow-up radius and entire bowl",
    "graph equation residuals",
    "pointwise identity suite",
    "determinism and suite runtime",
};

// Runtime limits in seconds; 0 means none.
const double kLimits[kCriteria] = {1, 1, 0, 1, 0, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CriterionResult c15(const Ctx& ctx) {
  CriterionResult r;
  namespace fs = std::filesystem;
  const fs::path root = ctx.o.out_dir.empty() ? fs::temp_directory_path() / "phimin_determinism" : ctx.o.out_dir / "determinism";
  std::vector<int> ids;
  for (int k = 1; k < kCriteria; ++k) ids.push_back(k);
  std::vector<CriterionResult> first;
  double t_first = 0;
  for (const char* run : {"a", "b"}) {
    AcceptanceOptions o = ctx.o;
    o.out_dir = root / run;
    o.timing = false;
    std::error_code ec;
    fs::remove_all(o.out_dir, ec);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_suite(ids, o);
    write_json(summary_json(res, false), o.out_dir / "summary.json");
    if (first.empty()) {
      first = res;
      t_first = elapsed(t0);
    }
  }
  std::string why;
  const bool same = directories_identical(root / "a", root / "b", &why);
  if (ctx.o.out_dir.empty()) {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  r.pass = same && t_first < 60;
  r.detail = same ? "two runs byte-identical" : "outputs differ: " + why;
  if (ctx.o.timing) r.detail += fmt("; criteria 1-14 took %.2f s", t_first);
  else if (!(t_first < 60)) r.detail += "; criteria 1-14 exceeded 60 s";
  return r;
}

}  // namespace

std::vector<int> suite_ids(const std::string& suite) {
  auto range = [](int a, int b) {
    std::vector<int> v;
    for (int k = a; k <= b; ++k) v.push_back(k);
    return v;
  };
  if (suite == "all") return range(1, kCriteria);
  if (suite == "reaper") return range(1, 4);
  if (suite == "rotational") return {5, 9, 10, 11, 12};
  if (suite == "asymptotics") return range(6, 8);
  if (suite == "geometry") return {13, 14};
  if (suite == "determinism") return {15};
  std::vector<int> ids;
  std::stringstream ss(suite);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || k < 1 || k > kCriteria) throw std::invalid_argument("unknown suite or criterion: " + tok);
    ids.push_back(k);
  }
  if (ids.empty()) throw std::invalid_argument("empty suite");
  return ids;
}

std::string criterion_title(int id) {
  if (id < 1 || id > kCriteria) throw std::out_of_range("criterion id");
  return kTitles[id - 1];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& o) {
  if (id < 1 || id > kCriteria) throw std::out_of_range("criterion id");
  const Ctx ctx{o};
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kBodies[id - 1](ctx);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.title = kTitles[id - 1];
  r.seconds = elapsed(t0);
  const double lim = kLimits[id - 1];
  if (lim > 0 && !(r.seconds < lim)) {
    r.pass = false;
    r.detail += fmt("; runtime limit %.0f s exceeded", lim);
  }
  return r;
}

std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const AcceptanceOptions& o) {
  std::vector<CriterionResult> out(ids.size());
  const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(ids.size())));
  if (jobs == 1) {
    for (std::size_t k = 0; k < ids.size(); ++k) out[k] = run_criterion(ids[k], o);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < ids.size();) out[k] = run_criterion(ids[k], o);
    });
  for (auto& th : pool) th.join();
  return out;
}

Json summary_json(const std::vector<CriterionResult>& results, bool timing) {
  Json j;
  Json list = Json::array();
  bool all = true;
  for (const auto& r : results) {
    Json e;
    e["id"] = r.id;
    e["title"] = r.title;
    e["pass"] = r.pass;
    e["detail"] = r.detail;
    if (timing) e["seconds"] = r.seconds;
    list.push_back(e);
    all = all && r.pass;
  }
  j["criteria"] = list;
  j["verdict"] = all ? "pass" : "fail";
  return j;
}

std::string result_line(const CriterionResult& r) {
  return fmt("[%s] %2d %s: ", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str()) + r.detail;
}

bool directories_identical(const std::filesystem::path& a, const std::filesystem::path& b, std::string* why) {
  namespace fs = std::filesystem;
  auto listing = [](const fs::path& root) {
    std::vector<fs::path> v;
    if (fs::exists(root))
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) v.push_back(fs::relative(e.path(), root));
    std::sort(v.begin(), v.end());
    return v;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const auto la = listing(a), lb = listing(b);
  if (la != lb) {
    if (why) *why = "file lists differ";
    return false;
  }
  for (const auto& rel : la)
    if (slurp(a / rel) != slurp(b / rel)) {
      if (why) *why = rel.string();
      return false;
    }
  return true;
}

}  // namespace phimin
