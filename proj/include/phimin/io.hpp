#pragma once

// Deterministic exports: OBJ meshes, plot-ready CSV curves and JSON reports.
// Non-finite numbers are written to JSON as "inf" / "-inf" strings, NaN as null.

#include "phimin/asymptotics.hpp"
#include "phimin/geometry.hpp"
#include "phimin/reaper.hpp"
#include "phimin/rotational.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace phimin {

using Json = nlohmann::ordered_json;

Json json_number(double v);
/// Inverse of json_number: accepts numbers, "inf", "-inf" and null (NaN).
double number_from_json(const Json& j);

Json to_json(const SubCheck& s);
Json to_json(const AsymptoticReport& r);
Json to_json(const IdentityReport& r);
Json to_json(const EndpointReport& r);
Json reaper_report(const ReaperCurve& c, double drift);
Json markers_report(const RotationalCurve& c);

std::string format_double(double v);  // %.17g

void write_csv(const ReaperCurve& c, const std::filesystem::path& path);     // x,u,du
void write_csv(const RotationalCurve& c, const std::filesystem::path& path); // s,x,z,theta
void write_obj(const SurfaceMesh& m, const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

/// Counts the `v` records of an OBJ file.
std::size_t obj_vertex_count(const std::filesystem::path& path);

}  // namespace phimin
