#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kmc/engine.hpp"
#include "kmc/geometry.hpp"

namespace kmc::io {

struct Geometry {
    enum class Type { Planar, Mesh } type = Type::Planar;
    PlanarScene scene;
    ConvexMesh mesh;
};

// Geometry JSON:
//   {"type": "planar", "pores": [{"center": [x, y], "radius": a, "label": "p"}]}
//   {"type": "mesh", "vertices": [[x, y, z], ...],
//    "faces": [{"verts": [i, j, k], "absorbing": true, "label": "top"}]}
Geometry parse_geometry(const std::string& text, double reinsertion_ratio = 3.0);
Geometry load_geometry(const std::string& path, double reinsertion_ratio = 3.0);
std::string to_json(const ConvexMesh& mesh);
std::string to_json(const PlanarScene& scene);

struct HistogramSpec {
    double t_min = 1e-4;
    double t_max = 1e6;
    int bins = 100;
};

struct RunConfig {
    // Exactly one of geometry_inline / geometry_file is set.
    std::string geometry_inline;
    std::string geometry_file;
    std::optional<Vec3> source_point;
    std::optional<double> source_sphere_radius;
    double D = 1.0;
    std::uint64_t particles = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    double reinsertion_ratio = 3.0;
    int table_mu = 400;
    int table_nu = 400;
    bool table_interpolate = false;
    std::string table_file;
    std::uint64_t max_steps = 1'000'000;
    HistogramSpec histogram;
    std::string out_dir = "out";
};

// Unknown keys and wrong types raise ConfigError. Relative file paths are
// resolved against base_dir.
RunConfig parse_run_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

// Canonical JSON with every default filled in.
std::string effective_config_json(const RunConfig& cfg);
std::string config_digest(const RunConfig& cfg);

Geometry resolve_geometry(const RunConfig& cfg);
EngineOptions engine_options(const RunConfig& cfg);

std::string result_json(const SimulationResult& r, const RunConfig& cfg, const std::string& code_version);
std::string captures_csv(const SimulationResult& r);
std::string histogram_csv(const SimulationResult& r, const HistogramSpec& spec);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

const char* version();

std::string hex64(std::uint64_t v);
std::uint64_t fnv1a(const std::string& s);

}  // namespace kmc::io
