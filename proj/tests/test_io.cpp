#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace phimin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / "phimin_test_io";
  fs::create_directories(d);
  return d / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("json numbers round-trip, including non-finite values") {
  for (double v : {0.0, -1.5, 1e-300, 0.1, M_PI}) CHECK(number_from_json(json_number(v)) == v);
  CHECK(json_number(kInf) == "inf");
  CHECK(json_number(-kInf) == "-inf");
  CHECK(json_number(std::nan("")).is_null());
  CHECK(std::isinf(number_from_json(Json("inf"))));
  CHECK(number_from_json(Json("-inf")) < 0);
  CHECK(std::isnan(number_from_json(Json())));
  CHECK_THROWS(number_from_json(Json("abc")));

  // through text as well
  Json j;
  j["a"] = json_number(kInf);
  j["b"] = json_number(0.1);
  const auto back = Json::parse(j.dump());
  CHECK(std::isinf(number_from_json(back["a"])));
  CHECK(number_from_json(back["b"]) == 0.1);
}

TEST_CASE("format_double is shortest-exact enough to round-trip") {
  for (double v : {0.1, 1.0 / 3, -2.5e-17, 123456789.123}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("csv headers and row counts") {
  const auto p = make_preset(PresetKind::soliton);
  const auto r = solve_reaper_ivp(p, 0.0, 1.0);
  const auto f = scratch("reaper.csv");
  write_csv(r, f);
  std::ifstream in(f);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,u,du");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.samples.size());

  const auto b = solve_bowl(p, 0.0, 2.0);
  const auto g = scratch("bowl.csv");
  write_csv(b, g);
  CHECK(slurp(g).rfind("s,x,z,theta\n", 0) == 0);
}

TEST_CASE("obj export: vertex count, normals and deterministic bytes") {
  const auto p = make_preset(PresetKind::soliton);
  const auto m = revolve(solve_bowl(p, 0.0, 2.0), p, 16);
  const auto f = scratch("bowl.obj"), g = scratch("bowl2.obj");
  write_obj(m, f);
  write_obj(m, g);
  CHECK(obj_vertex_count(f) == m.vertices.size());
  const auto text = slurp(f);
  CHECK(text.find("\nvn ") != std::string::npos);
  std::size_t faces = 0;
  for (std::size_t at = text.find("\nf "); at != std::string::npos; at = text.find("\nf ", at + 1)) ++faces;
  CHECK(faces == m.faces.size());
  CHECK(text == slurp(g));
}

TEST_CASE("reports carry the expected keys") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 3.0);
  const auto j = reaper_report(c, 1e-12);
  for (const char* k : {"u0", "lambda_est", "endpoint", "drift"}) CHECK(j.contains(k));
  const auto e = to_json(endpoint_behavior(p, 0.0));
  CHECK(e.is_object());

  RotationalOptions o;
  o.r_max = 3;
  const auto cat = solve_catenoid(p, 1.0, 0.0, o);
  const auto mk = markers_report(cat.left);
  for (const char* k : {"s_half", "s_min", "omega_est", "kind"}) CHECK(mk.contains(k));
}

TEST_CASE("write errors are reported") {
  const auto f = scratch("blocker");
  write_text("x", f);
  // a regular file in the way of a directory
  CHECK_THROWS(write_text("y", f / "sub" / "out.txt"));
  CHECK_THROWS(write_json(Json::object(), f / "out.json"));
}

TEST_CASE("write_text creates parent directories") {
  const auto f = scratch("nested") / "a" / "b.txt";
  fs::remove_all(scratch("nested"));
  write_text("hello\n", f);
  CHECK(slurp(f) == "hello\n");
}
