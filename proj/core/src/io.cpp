#include "kmc/io.hpp"

#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kmc/errors.hpp"
#include "kmc/stats.hpp"

namespace kmc::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("failed writing " + path);
}

namespace {

json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
        throw ConfigError(where + " must be an integer");
    const double v = j.get<double>();
    if (v < 0) throw ConfigError(where + " must be non-negative");
    return static_cast<std::uint64_t>(v);
}

template <std::size_t N>
std::array<double, N> vecn(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != N) throw ConfigError(where + " must be an array of " + std::to_string(N) + " numbers");
    std::array<double, N> a;
    for (std::size_t i = 0; i < N; ++i) a[i] = num(j[i], where);
    return a;
}

Geometry geometry_from_json(const json& j, double ratio) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError("geometry needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    Geometry g;
    if (type == "planar") {
        allow_keys(j, {"type", "pores"}, "planar geometry");
        std::vector<PlanarPore> pores;
        if (j.contains("pores")) {
            if (!j["pores"].is_array()) throw ConfigError("'pores' must be an array");
            for (const auto& p : j["pores"]) {
                allow_keys(p, {"center", "radius", "label"}, "pore");
                if (!p.contains("center") || !p.contains("radius")) throw ConfigError("pore needs center and radius");
                const auto c = vecn<2>(p["center"], "pore center");
                PlanarPore pp;
                pp.center = {c[0], c[1]};
                pp.radius = num(p["radius"], "pore radius");
                if (p.contains("label")) pp.label = p["label"].get<std::string>();
                pores.push_back(pp);
            }
        }
        g.type = Geometry::Type::Planar;
        g.scene = make_planar_scene(std::move(pores), ratio);
    } else if (type == "mesh") {
        allow_keys(j, {"type", "vertices", "faces"}, "mesh geometry");
        if (!j.contains("vertices") || !j.contains("faces")) throw ConfigError("mesh needs vertices and faces");
        std::vector<Vec3> verts;
        for (const auto& v : j["vertices"]) {
            const auto a = vecn<3>(v, "vertex");
            verts.push_back({a[0], a[1], a[2]});
        }
        std::vector<FaceSpec> faces;
        for (const auto& f : j["faces"]) {
            allow_keys(f, {"verts", "absorbing", "label"}, "face");
            if (!f.contains("verts") || !f["verts"].is_array()) throw ConfigError("face needs 'verts'");
            FaceSpec fs;
            for (const auto& v : f["verts"]) {
                if (!v.is_number_integer()) throw ConfigError("face vertex index must be an integer");
                fs.verts.push_back(v.get<int>());
            }
            if (f.contains("absorbing")) {
                if (!f["absorbing"].is_boolean()) throw ConfigError("'absorbing' must be boolean");
                fs.absorbing = f["absorbing"].get<bool>();
            }
            if (f.contains("label")) fs.label = f["label"].get<std::string>();
            faces.push_back(std::move(fs));
        }
        g.type = Geometry::Type::Mesh;
        g.mesh = make_mesh(std::move(verts), faces, ratio);
    } else {
        throw ConfigError("geometry type must be 'planar' or 'mesh'");
    }
    return g;
}

}  // namespace

Geometry parse_geometry(const std::string& text, double ratio) {
    try {
        return geometry_from_json(parse_text(text, "geometry"), ratio);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }
}

Geometry load_geometry(const std::string& path, double ratio) { return parse_geometry(read_file(path), ratio); }

std::string to_json(const ConvexMesh& mesh) {
    json j;
    j["type"] = "mesh";
    j["vertices"] = json::array();
    for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x, v.y, v.z});
    j["faces"] = json::array();
    for (const auto& f : mesh.faces) {
        json jf;
        jf["verts"] = f.verts;
        jf["absorbing"] = f.absorbing;
        if (!f.label.empty()) jf["label"] = f.label;
        j["faces"].push_back(jf);
    }
    return j.dump() + "\n";
}

std::string to_json(const PlanarScene& scene) {
    json j;
    j["type"] = "planar";
    j["pores"] = json::array();
    for (const auto& p : scene.pores)
        j["pores"].push_back({{"center", {p.center.x, p.center.y}}, {"radius", p.radius}, {"label", p.label}});
    return j.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
    const json j = parse_text(text, "config");
    RunConfig c;
    try {
        allow_keys(j, {"geometry", "geometry_file", "source", "D", "particles", "seed", "workers",
                       "reinsertion_ratio", "table", "max_steps", "histogram", "out_dir"},
                   "config");
        if (j.contains("geometry") == j.contains("geometry_file"))
            throw ConfigError("config needs exactly one of 'geometry' and 'geometry_file'");
        if (j.contains("geometry")) c.geometry_inline = j["geometry"].dump();
        if (j.contains("geometry_file")) {
            fs::path p = j["geometry_file"].get<std::string>();
            if (p.is_relative()) p = fs::path(base_dir) / p;
            c.geometry_file = p.lexically_normal().string();
        }
        if (!j.contains("source")) throw ConfigError("config needs a 'source'");
        const json& s = j["source"];
        allow_keys(s, {"point", "sphere_radius"}, "source");
        if (s.contains("point") == s.contains("sphere_radius"))
            throw ConfigError("source needs exactly one of 'point' and 'sphere_radius'");
        if (s.contains("point")) {
            const auto a = vecn<3>(s["point"], "source point");
            c.source_point = Vec3{a[0], a[1], a[2]};
        } else {
            c.source_sphere_radius = num(s["sphere_radius"], "sphere_radius");
            if (!(*c.source_sphere_radius > 0.0)) throw ConfigError("sphere_radius must be positive");
        }
        if (j.contains("D")) c.D = num(j["D"], "D");
        if (!(c.D > 0.0)) throw ConfigError("D must be positive");
        if (j.contains("particles")) c.particles = count(j["particles"], "particles");
        if (c.particles == 0) throw ConfigError("particles must be at least 1");
        if (j.contains("seed")) c.seed = count(j["seed"], "seed");
        if (j.contains("workers")) c.workers = static_cast<int>(count(j["workers"], "workers"));
        if (c.workers < 1) throw ConfigError("workers must be at least 1");
        if (j.contains("reinsertion_ratio")) c.reinsertion_ratio = num(j["reinsertion_ratio"], "reinsertion_ratio");
        if (!(c.reinsertion_ratio > 1.0)) throw ConfigError("reinsertion_ratio must exceed 1");
        if (j.contains("table")) {
            const json& t = j["table"];
            allow_keys(t, {"mu", "nu", "interpolate", "file"}, "table");
            if (t.contains("mu")) c.table_mu = static_cast<int>(count(t["mu"], "table.mu"));
            if (t.contains("nu")) c.table_nu = static_cast<int>(count(t["nu"], "table.nu"));
            if (t.contains("interpolate")) c.table_interpolate = t["interpolate"].get<bool>();
            if (t.contains("file")) {
                fs::path p = t["file"].get<std::string>();
                if (p.is_relative()) p = fs::path(base_dir) / p;
                c.table_file = p.lexically_normal().string();
            }
            if (c.table_mu < 16 || c.table_nu < 16) throw ConfigError("table grid must be at least 16 x 16");
        }
        if (j.contains("max_steps")) c.max_steps = count(j["max_steps"], "max_steps");
        if (c.max_steps == 0) throw ConfigError("max_steps must be positive");
        if (j.contains("histogram")) {
            const json& h = j["histogram"];
            allow_keys(h, {"t_min", "t_max", "bins"}, "histogram");
            if (h.contains("t_min")) c.histogram.t_min = num(h["t_min"], "histogram.t_min");
            if (h.contains("t_max")) c.histogram.t_max = num(h["t_max"], "histogram.t_max");
            if (h.contains("bins")) c.histogram.bins = static_cast<int>(count(h["bins"], "histogram.bins"));
            if (!(c.histogram.t_min > 0.0) || !(c.histogram.t_max > c.histogram.t_min) || c.histogram.bins < 1)
                throw ConfigError("histogram needs 0 < t_min < t_max and bins >= 1");
        }
        if (j.contains("out_dir")) {
            fs::path p = j["out_dir"].get<std::string>();
            if (p.is_relative()) p = fs::path(base_dir) / p;
            c.out_dir = p.lexically_normal().string();
        } else {
            c.out_dir = (fs::path(base_dir) / "out").lexically_normal().string();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    const fs::path p(path);
    return parse_run_config(read_file(path), p.has_parent_path() ? p.parent_path().string() : ".");
}

namespace {
json effective(const RunConfig& c) {
    json j;
    if (!c.geometry_inline.empty()) j["geometry"] = json::parse(c.geometry_inline);
    else j["geometry_file"] = c.geometry_file;
    if (c.source_point) j["source"]["point"] = {c.source_point->x, c.source_point->y, c.source_point->z};
    else j["source"]["sphere_radius"] = *c.source_sphere_radius;
    j["D"] = c.D;
    j["particles"] = c.particles;
    j["seed"] = c.seed;
    j["reinsertion_ratio"] = c.reinsertion_ratio;
    j["table"] = {{"mu", c.table_mu}, {"nu", c.table_nu}, {"interpolate", c.table_interpolate}};
    if (!c.table_file.empty()) j["table"]["file"] = c.table_file;
    j["max_steps"] = c.max_steps;
    j["histogram"] = {{"t_min", c.histogram.t_min}, {"t_max", c.histogram.t_max}, {"bins", c.histogram.bins}};
    return j;
}
}  // namespace

std::string effective_config_json(const RunConfig& c) {
    json j = effective(c);
    j["workers"] = c.workers;
    j["out_dir"] = c.out_dir;
    return j.dump(2);
}

std::string config_digest(const RunConfig& c) {
    return hex64(fnv1a(effective(c).dump()));
}

Geometry resolve_geometry(const RunConfig& c) {
    if (!c.geometry_inline.empty()) return parse_geometry(c.geometry_inline, c.reinsertion_ratio);
    return load_geometry(c.geometry_file, c.reinsertion_ratio);
}

EngineOptions engine_options(const RunConfig& c) {
    EngineOptions o;
    o.D = c.D;
    o.particles = c.particles;
    o.seed = c.seed;
    o.workers = c.workers;
    o.table_mu = c.table_mu;
    o.table_nu = c.table_nu;
    o.interpolate_reinsertion = c.table_interpolate;
    o.max_steps = c.max_steps;
    o.config_digest = config_digest(c);
    if (!c.table_file.empty()) {
        auto t = std::make_shared<const ReinsertionTable>(ReinsertionTable::load(c.table_file));
        if (t->ratio() != c.reinsertion_ratio) throw ConfigError("table file ratio differs from reinsertion_ratio");
        o.table = t;
    }
    return o;
}

std::string result_json(const SimulationResult& r, const RunConfig& cfg, const std::string& code_version) {
    json j;
    j["provenance"] = {{"config_digest", r.config_digest},
                       {"seed", r.seed},
                       {"code_version", code_version},
                       {"config", json::parse(effective_config_json(cfg))}};
    j["particles"] = r.particles;
    j["escapes"] = r.escapes;
    j["capped"] = r.capped;
    j["iterations"] = r.iterations;
    j["capture_iterations"] = r.capture_iterations;
    const double M = static_cast<double>(r.particles);
    j["targets"] = json::array();
    for (std::size_t k = 0; k < r.labels.size(); ++k) {
        const auto n = r.capture_times[k].size();
        const auto b = stats::bootstrap_binary(n, r.particles, 100, r.seed ^ 0x5bd1e995ull);
        j["targets"].push_back({{"label", r.labels[k]},
                                {"captures", n},
                                {"fraction", n / M},
                                {"bootstrap_stderr", b.stderr_}});
    }
    const double p = r.captured() / M;
    j["capture_fraction"] = p;
    j["escape_fraction"] = r.escapes / M;
    if (cfg.source_sphere_radius) {
        const auto c = capacitance_from(r, *cfg.source_sphere_radius);
        j["capacitance"] = c.capacitance;
        j["cv"] = p > 0.0 ? json(c.cv) : json(nullptr);
    } else {
        j["cv"] = p > 0.0 ? json(stats::coefficient_of_variation(p, r.particles)) : json(nullptr);
    }
    j["result_digest"] = hex64(r.digest());
    return j.dump(2) + "\n";
}

const char* version() { return KMC_VERSION; }

std::string captures_csv(const SimulationResult& r) {
    std::string out = "label,time\n";
    char buf[64];
    for (std::size_t k = 0; k < r.labels.size(); ++k)
        for (double t : r.capture_times[k]) {
            std::snprintf(buf, sizeof buf, ",%.17g\n", t);
            out += r.labels[k];
            out += buf;
        }
    return out;
}

std::string histogram_csv(const SimulationResult& r, const HistogramSpec& spec) {
    std::vector<stats::LogHistogram> h;
    for (const auto& times : r.capture_times) h.push_back(stats::log_histogram(times, spec.t_min, spec.t_max, spec.bins));
    std::string out = "bin_left,bin_right";
    for (const auto& l : r.labels) out += ",count_" + l;
    out += "\n";
    char buf[64];
    for (int i = 0; i < spec.bins; ++i) {
        const auto& e = h.empty() ? stats::make_log_histogram(spec.t_min, spec.t_max, spec.bins).edges : h[0].edges;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", e[i], e[i + 1]);
        out += buf;
        for (const auto& hk : h) out += "," + std::to_string(hk.counts[i]);
        out += "\n";
    }
    return out;
}

}  // namespace kmc::io
