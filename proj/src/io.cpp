#include "phimin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phimin {

Json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("not a number: " + s);
  }
  return j.get<double>();
}

Json to_json(const SubCheck& s) {
  Json j;
  j["name"] = s.name;
  j["value"] = json_number(s.value);
  j["target"] = json_number(s.target);
  j["tolerance"] = json_number(s.tolerance);
  j["pass"] = s.pass;
  if (!s.trend.empty()) {
    Json t = Json::array();
    for (double v : s.trend) t.push_back(json_number(v));
    j["trend"] = t;
  }
  return j;
}

Json to_json(const AsymptoticReport& r) {
  Json j;
  j["law"] = law_name(r.law);
  j["window"] = Json::array({json_number(r.window.first), json_number(r.window.second)});
  Json f = Json::object();
  for (const auto& [k, v] : r.fitted) f[k] = json_number(v);
  j["fitted"] = f;
  j["residual_sup"] = json_number(r.residual_sup);
  j["tolerance"] = json_number(r.tolerance);
  j["verdict"] = r.verdict ? "pass" : "fail";
  Json subs = Json::array();
  for (const auto& s : r.subchecks) subs.push_back(to_json(s));
  j["subchecks"] = subs;
  return j;
}

Json to_json(const IdentityReport& r) {
  Json j;
  j["e2_gap"] = json_number(r.e2_gap);
  j["eta_gap"] = json_number(r.eta_gap);
  j["e5_gap"] = json_number(r.e5_gap);
  j["e5_points"] = r.e5_points;
  return j;
}

Json to_json(const EndpointReport& r) {
  Json j;
  j["kind"] = endpoint_name(r.kind);
  j["lambda"] = json_number(r.lambda);
  j["limit_slope"] = json_number(r.limit_slope);
  j["range_end"] = json_number(r.range_end);
  j["theorem_case"] = r.theorem_case;
  return j;
}

Json reaper_report(const ReaperCurve& c, double drift) {
  Json j;
  j["u0"] = json_number(c.u0);
  j["lambda_est"] = json_number(c.lambda_est);
  j["endpoint"] = endpoint_name(c.endpoint);
  j["drift"] = json_number(drift);
  return j;
}

Json markers_report(const RotationalCurve& c) {
  Json j;
  j["s_half"] = c.markers.s_half ? json_number(*c.markers.s_half) : Json(nullptr);
  j["s_min"] = c.markers.s_min ? json_number(*c.markers.s_min) : Json(nullptr);
  j["omega_est"] = json_number(c.omega_est);
  j["kind"] = rot_kind_name(c.kind);
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}

void close_checked(std::ofstream& f, const std::filesystem::path& path) {
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_csv(const ReaperCurve& c, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "x,u,du\n";
  for (const auto& s : c.samples) f << format_double(s.x) << ',' << format_double(s.u) << ',' << format_double(s.du) << '\n';
  close_checked(f, path);
}

void write_csv(const RotationalCurve& c, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "s,x,z,theta\n";
  for (const auto& s : c.samples)
    f << format_double(s.s) << ',' << format_double(s.x) << ',' << format_double(s.z) << ',' << format_double(s.theta)
      << '\n';
  close_checked(f, path);
}

void write_obj(const SurfaceMesh& m, const std::filesystem::path& path) {
  auto f = open_out(path);
  for (const auto& v : m.vertices) f << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  for (const auto& n : m.normals) f << "vn " << format_double(n[0]) << ' ' << format_double(n[1]) << ' ' << format_double(n[2]) << '\n';
  const bool with_normals = m.normals.size() == m.vertices.size();
  for (const auto& t : m.faces) {
    f << 'f';
    for (int k : t) {
      f << ' ' << k + 1;
      if (with_normals) f << "//" << k + 1;
    }
    f << '\n';
  }
  close_checked(f, path);
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

void write_text(const std::string& text, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << text;
  close_checked(f, path);
}

std::size_t obj_vertex_count(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(f, line))
    if (line.size() > 2 && line[0] == 'v' && line[1] == ' ') ++n;
  return n;
}

}  // namespace phimin
