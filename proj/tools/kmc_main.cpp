#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kmc/analytic.hpp"
#include "kmc/engine.hpp"
#include "kmc/errors.hpp"
#include "kmc/geometry.hpp"
#include "kmc/io.hpp"
#include "kmc/mesh_gen.hpp"
#include "kmc/propagators.hpp"

namespace {

using json = nlohmann::json;
using namespace kmc;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int report(const char* kind, const std::string& message, int code) {
    json j = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << j.dump() << "\n";
    return code;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        io::write_file(path, text);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("grid needs 0 < min < max and at least 2 points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw ConfigError("grid needs min < max and at least 2 points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

Vec3 vec3(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw ConfigError(std::string(what) + " needs three components");
    return {v[0], v[1], v[2]};
}

// --------------------------------------------------------------- run

struct RunArgs {
    std::string config;
    std::uint64_t particles = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_dir;
    bool has_particles = false, has_seed = false, has_workers = false;
};

int cmd_run(const RunArgs& a) {
    io::RunConfig cfg = io::load_run_config(a.config);
    if (a.has_particles) cfg.particles = a.particles;
    if (a.has_seed) cfg.seed = a.seed;
    if (a.has_workers) cfg.workers = a.workers;
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    if (cfg.particles == 0) throw ConfigError("particles must be positive");
    if (cfg.workers < 1) throw ConfigError("workers must be positive");

    const io::Geometry g = io::resolve_geometry(cfg);
    const EngineOptions opts = io::engine_options(cfg);
    const Release rel = cfg.source_point ? Release::at(*cfg.source_point) : Release::sphere(*cfg.source_sphere_radius);
    const SimulationResult r = g.type == io::Geometry::Type::Planar ? run_plane(g.scene, rel, opts)
                                                                    : run_polyhedron(g.mesh, rel, opts);

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    const std::string result = io::result_json(r, cfg, io::version());
    io::write_file((dir / "result.json").string(), result);
    io::write_file((dir / "captures.csv").string(), io::captures_csv(r));
    io::write_file((dir / "histogram.csv").string(), io::histogram_csv(r, cfg.histogram));

    const json j = json::parse(result);
    std::printf("particles %llu  captured %.6f  escaped %.6f  capped %llu\n",
                static_cast<unsigned long long>(r.particles), j["capture_fraction"].get<double>(),
                j["escape_fraction"].get<double>(), static_cast<unsigned long long>(r.capped));
    for (const auto& t : j["targets"])
        std::printf("  %-16s %.6f +- %.2e\n", t["label"].get<std::string>().c_str(), t["fraction"].get<double>(),
                    t["bootstrap_stderr"].get<double>());
    if (j.contains("capacitance")) std::printf("capacitance %.6f  cv %.3e\n", j["capacitance"].get<double>(), j["cv"].get<double>());
    std::printf("digest %s  output %s\n", j["result_digest"].get<std::string>().c_str(), cfg.out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------- analytic

struct AnalyticArgs {
    std::string formula;
    double t_min = 1e-3, t_max = 1e3;
    int n = 200;
    double d_min = 2.5, d_max = 50.0;
    double R = 2.5, D = 1.0, kappa = 0.0;
    double sigma = 0.1, pore_radius = 0.0;
    int pores = 51;
    std::vector<double> x0{0.0, 0.0, 1.0};
    std::string geometry;
    std::string out;
};

std::vector<analytic::PoreSpec> planar_pores(const std::string& geometry) {
    if (geometry.empty()) throw ConfigError("--geometry is required for planar formulas");
    const io::Geometry g = io::load_geometry(geometry);
    if (g.type != io::Geometry::Type::Planar) throw ConfigError("planar formulas need a planar geometry");
    std::vector<analytic::PoreSpec> p;
    for (const auto& q : g.scene.pores) p.push_back(analytic::circular_pore(q.center.x, q.center.y, q.radius));
    return p;
}

std::vector<std::string> planar_labels(const std::string& geometry) {
    std::vector<std::string> l;
    for (const auto& q : io::load_geometry(geometry).scene.pores) l.push_back(q.label);
    return l;
}

int cmd_analytic(const AnalyticArgs& a) {
    std::ostringstream out;
    const std::string& f = a.formula;
    if (f == "homog-sphere" || f == "sphere-arrival" || f == "cube-equiv") {
        double kappa = a.kappa;
        if (f == "homog-sphere" && !(kappa > 0.0)) {
            const double rad = a.pore_radius > 0.0 ? a.pore_radius : fibonacci_pore_radius(a.pores, a.sigma);
            kappa = analytic::robin_kappa(a.sigma, rad, a.D);
        }
        out << "t,pdf,cdf\n";
        for (double t : log_grid(a.t_min, a.t_max, a.n)) {
            const analytic::PdfCdf v = f == "homog-sphere"     ? analytic::homog_sphere(t, a.R, kappa, a.D)
                                       : f == "sphere-arrival" ? analytic::sphere_arrival(t, a.R, a.D)
                                                               : analytic::PdfCdf{NAN, analytic::cube_equiv_cdf(t, a.R, a.D)};
            out << fmt(t) << ',' << fmt(v.pdf) << ',' << fmt(v.cdf) << '\n';
        }
    } else if (f == "strieder") {
        out << "d,capacitance\n";
        for (double d : lin_grid(a.d_min, a.d_max, a.n)) out << fmt(d) << ',' << fmt(analytic::strieder_capacitance(d)) << '\n';
    } else if (f == "robin-kappa") {
        const double rad = a.pore_radius > 0.0 ? a.pore_radius : fibonacci_pore_radius(a.pores, a.sigma);
        out << "sigma,pore_radius,kappa\n"
            << fmt(a.sigma) << ',' << fmt(rad) << ',' << fmt(analytic::robin_kappa(a.sigma, rad, a.D)) << '\n';
    } else if (f == "planar-flux" || f == "planar-cdf") {
        const auto pores = planar_pores(a.geometry);
        const Vec3 x0 = vec3(a.x0, "--x0");
        out << "t,total";
        for (const auto& l : planar_labels(a.geometry)) out << ',' << l;
        out << '\n';
        for (double t : log_grid(a.t_min, a.t_max, a.n)) {
            const auto v = f == "planar-flux" ? analytic::planar_flux(t, pores, x0, a.D)
                                              : analytic::planar_cdf(t, pores, x0, a.D);
            out << fmt(t) << ',' << fmt(v.total);
            for (double q : v.per_pore) out << ',' << fmt(q);
            out << '\n';
        }
    } else if (f == "splitting-planar") {
        const auto pores = planar_pores(a.geometry);
        const auto labels = planar_labels(a.geometry);
        const auto q = analytic::splitting_planar(pores, vec3(a.x0, "--x0"));
        out << "label,splitting\n";
        for (std::size_t k = 0; k < q.size(); ++k) out << labels[k] << ',' << fmt(q[k]) << '\n';
    } else if (f == "splitting-sphere") {
        const double rad = a.pore_radius > 0.0 ? a.pore_radius : fibonacci_pore_radius(a.pores, a.sigma);
        const auto q = analytic::splitting_sphere(fibonacci_sphere_points(a.pores), rad, vec3(a.x0, "--x0"));
        out << "label,splitting\n";
        for (std::size_t k = 0; k < q.size(); ++k) out << "pore_" << k + 1 << ',' << fmt(q[k]) << '\n';
    } else {
        throw ConfigError("unknown formula '" + f + "'");
    }
    emit(a.out, out.str());
    return 0;
}

// -------------------------------------------------------------- mesh

struct MeshArgs {
    std::string generator;
    double side = 1.0;
    int pores = 51;
    double sigma = 0.1;
    int refinement = 0;
    double r_eq = 1.0;
    std::string out;
};

int cmd_mesh(const MeshArgs& a) {
    ConvexMesh m;
    if (a.generator == "cube")
        m = make_cube(a.side);
    else if (a.generator == "fibonacci-sphere")
        m = make_fibonacci_sphere(a.pores, a.sigma, a.refinement > 0 ? a.refinement : 200);
    else if (a.generator == "ellipsoid-skirt")
        m = make_ellipsoid_skirt(a.r_eq, a.refinement > 0 ? a.refinement : 48);
    else
        throw ConfigError("unknown generator '" + a.generator + "'");
    emit(a.out, io::to_json(m));
    std::fprintf(a.out.empty() || a.out == "-" ? stderr : stdout, "faces %zu  absorbing fraction %.6f\n",
                 m.faces.size(), absorbing_area_fraction(m));
    return 0;
}

// ------------------------------------------------------- capacitance

struct CapArgs {
    std::string geometry;
    double radius = 0.0;
    std::uint64_t particles = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    double ratio = 3.0;
};

int cmd_capacitance(const CapArgs& a) {
    const io::Geometry g = io::load_geometry(a.geometry, a.ratio);
    EngineOptions o;
    o.particles = a.particles;
    o.seed = a.seed;
    o.workers = a.workers;
    double radius = a.radius;
    CapacitanceEstimate c;
    if (g.type == io::Geometry::Type::Planar) {
        if (!(radius > 0.0)) radius = 1.5 * g.scene.disc_radius;
        c = estimate_capacitance(g.scene, radius, o);
    } else {
        if (!(radius > 0.0)) radius = 1.5 * g.mesh.bounding_radius;
        c = estimate_capacitance(g.mesh, radius, o);
    }
    const json j = {{"capacitance", c.capacitance}, {"cv", c.cv},           {"capture_probability", c.p},
                    {"captures", c.captures},       {"particles", c.particles}, {"release_radius", radius},
                    {"seed", a.seed}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------- table-build

struct TableArgs {
    double ratio = 3.0;
    int n_mu = 400, n_nu = 400;
    std::string out;
};

int cmd_table(const TableArgs& a) {
    if (a.out.empty()) throw ConfigError("--out is required");
    const ReinsertionTable t = ReinsertionTable::build(a.ratio, a.n_mu, a.n_nu);
    t.save(a.out);
    std::printf("ratio %g  grid %d x %d  unconverged rows %d  written %s\n", t.ratio(), t.n_mu(), t.n_nu(),
                t.unconverged_rows(), a.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic Monte Carlo first-passage simulation to pores on a plane and faces of convex polyhedra"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::version()));

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate a configured scene and write result files");
    run_cmd->add_option("--config", run.config, "Run configuration JSON")->required();
    auto* op = run_cmd->add_option("--particles", run.particles, "Override particle count");
    auto* os = run_cmd->add_option("--seed", run.seed, "Override seed");
    auto* ow = run_cmd->add_option("--workers", run.workers, "Override worker threads");
    run_cmd->add_option("--out-dir", run.out_dir, "Override output directory");

    AnalyticArgs an;
    auto* an_cmd = app.add_subcommand("analytic", "Evaluate a closed-form result on a grid and print CSV");
    an_cmd->add_option("formula", an.formula,
                       "homog-sphere | sphere-arrival | cube-equiv | strieder | robin-kappa | planar-flux | "
                       "planar-cdf | splitting-planar | splitting-sphere")
        ->required();
    an_cmd->add_option("--t-min", an.t_min);
    an_cmd->add_option("--t-max", an.t_max);
    an_cmd->add_option("--n", an.n, "Grid points");
    an_cmd->add_option("--d-min", an.d_min);
    an_cmd->add_option("--d-max", an.d_max);
    an_cmd->add_option("--R", an.R, "Release distance (sphere and cube formulas)");
    an_cmd->add_option("--D", an.D, "Diffusivity");
    an_cmd->add_option("--kappa", an.kappa, "Robin rate; derived from --sigma and --pores when absent");
    an_cmd->add_option("--sigma", an.sigma, "Absorbing fraction");
    an_cmd->add_option("--pores", an.pores, "Fibonacci pore count");
    an_cmd->add_option("--pore-radius", an.pore_radius);
    an_cmd->add_option("--x0", an.x0, "Release point")->expected(3);
    an_cmd->add_option("--geometry", an.geometry, "Planar geometry JSON");
    an_cmd->add_option("--out", an.out, "CSV path (stdout when absent)");

    MeshArgs me;
    auto* me_cmd = app.add_subcommand("mesh", "Generate a mesh geometry JSON");
    me_cmd->add_option("generator", me.generator, "cube | fibonacci-sphere | ellipsoid-skirt")->required();
    me_cmd->add_option("--side", me.side);
    me_cmd->add_option("--pores", me.pores);
    me_cmd->add_option("--sigma", me.sigma);
    me_cmd->add_option("--refinement", me.refinement);
    me_cmd->add_option("--r-eq", me.r_eq);
    me_cmd->add_option("--out", me.out, "Mesh JSON path (stdout when absent)");

    CapArgs ca;
    auto* ca_cmd = app.add_subcommand("capacitance", "Estimate capacitance from a uniform spherical release");
    ca_cmd->add_option("--config", ca.geometry, "Geometry JSON")->required();
    ca_cmd->add_option("--radius", ca.radius, "Release radius (default 1.5 x enclosing radius)");
    ca_cmd->add_option("--particles", ca.particles);
    ca_cmd->add_option("--seed", ca.seed);
    ca_cmd->add_option("--workers", ca.workers);
    ca_cmd->add_option("--reinsertion-ratio", ca.ratio);

    TableArgs ta;
    auto* ta_cmd = app.add_subcommand("table-build", "Tabulate reinsertion times and angles");
    ta_cmd->add_option("--ratio", ta.ratio);
    ta_cmd->add_option("--n-mu", ta.n_mu);
    ta_cmd->add_option("--n-nu", ta.n_nu);
    ta_cmd->add_option("--out", ta.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("usage", e.what(), kExitConfig);
    }

    try {
        run.has_particles = op->count() > 0;
        run.has_seed = os->count() > 0;
        run.has_workers = ow->count() > 0;
        if (*run_cmd) return cmd_run(run);
        if (*an_cmd) return cmd_analytic(an);
        if (*me_cmd) return cmd_mesh(me);
        if (*ca_cmd) return cmd_capacitance(ca);
        if (*ta_cmd) return cmd_table(ta);
    } catch (const ConfigError& e) {
        return report("config", e.what(), kExitConfig);
    } catch (const DomainError& e) {
        return report("config", e.what(), kExitConfig);
    } catch (const NumericalError& e) {
        return report("numerical", e.what(), kExitNumerical);
    } catch (const std::exception& e) {
        return report("numerical", e.what(), kExitNumerical);
    }
    return kExitConfig;
}
