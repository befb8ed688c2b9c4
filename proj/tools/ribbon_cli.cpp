// Batch front-end: synthetic pair generation, constrained registration,
// thickness reports, baseline comparison, and normal-coordinate export.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ribbon/mesh_io.hpp"
#include "ribbon/solver.hpp"
#include "ribbon/synthetic.hpp"
#include "ribbon/thickness.hpp"
#include "ribbon/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ribbon;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string inner_path;
    std::string outer_path;
    std::string kind;  // plate | cap | fold; empty means explicit input paths
    double plate_side = 10.0;
    double plate_h = 2.0;
    double cap_r_in = 10.0;
    double cap_r_out = 12.0;
    double cap_angle = std::numbers::pi / 3;
    double fold_amplitude = 2.0;
    double fold_wavelength = 8.0;
    double fold_thickness = 1.0;
    int grid_n = 10;

    SolverParams solver;
    int rings = 1;
    int bins = 50;
    std::string out = "out";
    std::string trajectory_dir;  // defaults to <out>/trajectory
    bool deterministic = false;
    int threads = 1;
    unsigned seed = 0;
};

json config_json(const RunConfig& c) {
    json j;
    j["inner"] = c.inner_path;
    j["outer"] = c.outer_path;
    j["kind"] = c.kind;
    j["plate_side"] = c.plate_side;
    j["plate_h"] = c.plate_h;
    j["cap_r_in"] = c.cap_r_in;
    j["cap_r_out"] = c.cap_r_out;
    j["cap_angle"] = c.cap_angle;
    j["fold_amplitude"] = c.fold_amplitude;
    j["fold_wavelength"] = c.fold_wavelength;
    j["fold_thickness"] = c.fold_thickness;
    j["n"] = c.grid_n;
    j["timesteps"] = c.solver.timesteps;
    j["attachment_weight"] = c.solver.attachment_weight;
    j["sigma_v"] = c.solver.sigma_v;
    j["lambda"] = c.solver.lambda;
    j["sigma_w"] = c.solver.sigma_w;
    j["inner_max_iterations"] = c.solver.inner_max_iterations;
    j["inner_gradient_tolerance"] = c.solver.inner_gradient_tolerance;
    j["rho0"] = c.solver.al_rho0;
    j["al_growth"] = c.solver.al_growth;
    j["al_shrink"] = c.solver.al_shrink;
    j["constraint_tolerance"] = c.solver.constraint_tolerance;
    j["max_outer_iterations"] = c.solver.max_outer_iterations;
    j["rings"] = c.rings;
    j["bins"] = c.bins;
    j["out"] = c.out;
    j["trajectory"] = c.trajectory_dir;
    j["deterministic"] = c.deterministic;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    return j;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

class Manifest {
 public:
    Manifest(std::string command, const RunConfig& config) : start_(clock::now()) {
        j_["command"] = std::move(command);
        j_["version"] = kVersion;
        j_["config"] = config_json(config);
        j_["config_hash"] = fnv1a(j_["config"].dump());
        j_["deterministic"] = config.deterministic;
        j_["threads"] = config.threads;
        j_["stages"] = json::object();
    }

    void stage_done(const std::string& name) {
        const auto now = clock::now();
        j_["stages"][name] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }

    void write(const fs::path& dir) {
        j_["wall_time_seconds"] =
            std::chrono::duration<double>(clock::now() - start_).count();
        j_["timestamp"] = static_cast<int64_t>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        atomic_write_text(dir / "manifest.json", j_.dump(2) + "\n");
    }

 private:
    using clock = std::chrono::steady_clock;
    json j_;
    clock::time_point start_;
    clock::time_point last_ = start_;
};

SyntheticPair generate(const RunConfig& c) {
    if (c.kind == "plate") return make_plate_pair(c.grid_n, c.plate_side, c.plate_h);
    if (c.kind == "cap") return make_cap_pair(c.cap_r_in, c.cap_r_out, c.cap_angle, c.grid_n);
    if (c.kind == "fold")
        return make_fold_pair(c.fold_amplitude, c.fold_wavelength, c.fold_thickness, c.grid_n);
    throw ConfigError("unknown generator kind '" + c.kind + "' (plate|cap|fold)");
}

SurfacePair load_pair(const RunConfig& c) {
    if (!c.kind.empty()) return generate(c).pair;
    if (c.inner_path.empty() || c.outer_path.empty())
        throw ConfigError("provide either --kind or both --inner and --outer");
    SurfacePair pair{load_mesh(c.inner_path), load_mesh(c.outer_path)};
    validate_pair(pair);
    return pair;
}

fs::path trajectory_dir(const RunConfig& c) {
    return c.trajectory_dir.empty() ? fs::path(c.out) / "trajectory"
                                    : fs::path(c.trajectory_dir);
}

TriMesh load_outer_for(const RunConfig& c) {
    if (!c.kind.empty()) return generate(c).pair.outer;
    if (c.outer_path.empty()) throw ConfigError("--outer (or --kind) is required");
    return load_mesh(c.outer_path);
}

int cmd_synth(const RunConfig& c) {
    Manifest manifest("synth", c);
    const SyntheticPair syn = generate(c);
    fs::create_directories(c.out);
    save_mesh(syn.pair.inner, fs::path(c.out) / "inner.off");
    save_mesh(syn.pair.outer, fs::path(c.out) / "outer.off");
    json truth;
    truth["kind"] = syn.kind;
    truth["thickness"] = syn.thickness;
    for (const auto& [k, v] : syn.params) truth["params"][k] = v;
    atomic_write_text(fs::path(c.out) / "truth.json", truth.dump(2) + "\n");
    manifest.stage_done("synth");
    manifest.write(c.out);
    std::cout << "wrote " << c.out << "/inner.off, outer.off, truth.json\n";
    return 0;
}

int cmd_register(RunConfig c) {
    Manifest manifest("register", c);
    const SurfacePair pair = load_pair(c);
    manifest.stage_done("load");

    validate_params(c.solver);
    resolve_defaults(c.solver, pair);
    const SolveResult res = solve(pair, c.solver);
    manifest.stage_done("solve");

    fs::create_directories(c.out);
    save_trajectory(res.trajectory, trajectory_dir(c));
    save_convergence_report(res.report, fs::path(c.out) / "convergence.tsv");
    manifest.stage_done("export");
    manifest.write(c.out);

    const OuterRecord& last = res.report.records.back();
    std::cout << "register: " << res.report.status << "; outer iterations "
              << res.report.records.size() << ", objective " << last.objective
              << ", max violation " << last.max_violation << "\n";
    if (!res.report.converged) {
        std::cerr << "solver did not converge; partial outputs kept in " << c.out << "\n";
        return kExitNonConvergence;
    }
    return 0;
}

struct ThicknessArtifacts {
    Eigen::VectorXd column;
    CorrectedLengths corrected;
    Eigen::VectorXd baseline;
    std::vector<char> included;
    ThicknessReport column_report;
    ThicknessReport baseline_report;
};

ThicknessArtifacts compute_thickness(const RunConfig& c, const Trajectory& traj,
                                     const TriMesh& outer) {
    ThicknessArtifacts art;
    art.column = column_lengths(traj);
    art.corrected = endpoint_correction(traj, outer);
    art.baseline = freesurfer_distance(traj.mesh_at(0), outer);
    art.included = boundary_filter(traj.mesh_at(0), c.rings);
    art.column_report = thickness_stats(art.corrected.lengths, art.included, c.bins, 0.0,
                                        "corrected column");
    art.baseline_report = thickness_stats(art.baseline, art.included, c.bins, 0.0, "baseline");
    return art;
}

json summary_json(const ThicknessReport& rep) {
    json j;
    j["label"] = rep.label;
    j["count"] = rep.summary.count;
    j["mean"] = rep.summary.mean;
    j["median"] = rep.summary.median;
    j["stddev"] = rep.summary.stddev;
    j["min"] = rep.summary.min;
    j["max"] = rep.summary.max;
    return j;
}

int cmd_thickness(const RunConfig& c) {
    Manifest manifest("thickness", c);
    const Trajectory traj = load_trajectory(trajectory_dir(c));
    const TriMesh outer = load_outer_for(c);
    manifest.stage_done("load");

    const ThicknessArtifacts art = compute_thickness(c, traj, outer);
    manifest.stage_done("thickness");

    fs::create_directories(c.out);
    save_thickness_table(art.column, art.corrected.lengths, art.baseline, art.included,
                         art.corrected.corrected, fs::path(c.out) / "thickness.tsv");
    save_histogram(art.column_report.histogram, fs::path(c.out) / "column_hist.tsv");
    json summary;
    summary["column"] = summary_json(art.column_report);
    summary["rings"] = c.rings;
    atomic_write_text(fs::path(c.out) / "thickness_summary.json", summary.dump(2) + "\n");
    manifest.stage_done("export");
    manifest.write(c.out);
    std::cout << "thickness: mean corrected " << art.column_report.summary.mean << " mm over "
              << art.column_report.summary.count << " vertices\n";
    return 0;
}

int cmd_compare(const RunConfig& c) {
    Manifest manifest("compare", c);
    const Trajectory traj = load_trajectory(trajectory_dir(c));
    const TriMesh outer = load_outer_for(c);
    manifest.stage_done("load");

    const ThicknessArtifacts art = compute_thickness(c, traj, outer);
    manifest.stage_done("compare");

    fs::create_directories(c.out);
    save_thickness_table(art.column, art.corrected.lengths, art.baseline, art.included,
                         art.corrected.corrected, fs::path(c.out) / "compare.tsv");
    save_histogram(art.column_report.histogram, fs::path(c.out) / "column_hist.tsv");
    save_histogram(art.baseline_report.histogram, fs::path(c.out) / "baseline_hist.tsv");
    json summary;
    summary["column"] = summary_json(art.column_report);
    summary["baseline"] = summary_json(art.baseline_report);
    summary["baseline_below_column_mean"] =
        art.baseline_report.summary.mean < art.column_report.summary.mean;
    atomic_write_text(fs::path(c.out) / "compare_summary.json", summary.dump(2) + "\n");
    manifest.stage_done("export");
    manifest.write(c.out);
    std::cout << "compare: mean baseline " << art.baseline_report.summary.mean
              << " mm vs mean corrected column " << art.column_report.summary.mean << " mm\n";
    return 0;
}

int cmd_export_grid(const RunConfig& c) {
    Manifest manifest("export-grid", c);
    const Trajectory traj = load_trajectory(trajectory_dir(c));
    manifest.stage_done("load");
    const fs::path dir = fs::path(c.out) / "grid";
    save_trajectory(traj, dir);
    manifest.stage_done("export");
    manifest.write(c.out);
    std::cout << "wrote " << traj.states.size() << " sheets and columns to " << dir << "\n";
    return 0;
}

void apply_config_file(const std::string& path, CLI::App& app, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    auto unset = [&](const char* flag) {
        const CLI::Option* opt = app.get_option_no_throw(flag);
        return opt == nullptr || opt->count() == 0;
    };
    try {
        if (j.contains("inner") && unset("--inner")) c.inner_path = j["inner"];
        if (j.contains("outer") && unset("--outer")) c.outer_path = j["outer"];
        if (j.contains("kind") && unset("--kind")) c.kind = j["kind"];
        if (j.contains("plate_side") && unset("--side")) c.plate_side = j["plate_side"];
        if (j.contains("plate_h") && unset("--height")) c.plate_h = j["plate_h"];
        if (j.contains("cap_r_in") && unset("--r-in")) c.cap_r_in = j["cap_r_in"];
        if (j.contains("cap_r_out") && unset("--r-out")) c.cap_r_out = j["cap_r_out"];
        if (j.contains("cap_angle") && unset("--angle")) c.cap_angle = j["cap_angle"];
        if (j.contains("fold_amplitude") && unset("--amplitude"))
            c.fold_amplitude = j["fold_amplitude"];
        if (j.contains("fold_wavelength") && unset("--wavelength"))
            c.fold_wavelength = j["fold_wavelength"];
        if (j.contains("fold_thickness") && unset("--thickness"))
            c.fold_thickness = j["fold_thickness"];
        if (j.contains("n") && unset("--n")) c.grid_n = j["n"];
        if (j.contains("timesteps") && unset("--timesteps")) c.solver.timesteps = j["timesteps"];
        if (j.contains("attachment_weight") && unset("--attachment-weight"))
            c.solver.attachment_weight = j["attachment_weight"];
        if (j.contains("sigma_v") && unset("--sigma-v")) c.solver.sigma_v = j["sigma_v"];
        if (j.contains("lambda") && unset("--lambda")) c.solver.lambda = j["lambda"];
        if (j.contains("sigma_w") && unset("--sigma-w")) c.solver.sigma_w = j["sigma_w"];
        if (j.contains("inner_max_iterations") && unset("--inner-max-iterations"))
            c.solver.inner_max_iterations = j["inner_max_iterations"];
        if (j.contains("inner_gradient_tolerance") && unset("--inner-gradient-tolerance"))
            c.solver.inner_gradient_tolerance = j["inner_gradient_tolerance"];
        if (j.contains("rho0") && unset("--rho0")) c.solver.al_rho0 = j["rho0"];
        if (j.contains("al_growth") && unset("--al-growth")) c.solver.al_growth = j["al_growth"];
        if (j.contains("al_shrink") && unset("--al-shrink")) c.solver.al_shrink = j["al_shrink"];
        if (j.contains("constraint_tolerance") && unset("--constraint-tolerance"))
            c.solver.constraint_tolerance = j["constraint_tolerance"];
        if (j.contains("max_outer_iterations") && unset("--max-outer-iterations"))
            c.solver.max_outer_iterations = j["max_outer_iterations"];
        if (j.contains("rings") && unset("--rings")) c.rings = j["rings"];
        if (j.contains("bins") && unset("--bins")) c.bins = j["bins"];
        if (j.contains("out") && unset("--out")) c.out = j["out"];
        if (j.contains("trajectory") && unset("--trajectory")) c.trajectory_dir = j["trajectory"];
        if (j.contains("deterministic") && unset("--deterministic"))
            c.deterministic = j["deterministic"];
        if (j.contains("threads") && unset("--threads")) c.threads = j["threads"];
        if (j.contains("seed") && unset("--seed")) c.seed = j["seed"];
    } catch (const json::exception& e) {
        throw ConfigError("config type error in " + path + ": " + e.what());
    }
}

void add_common_options(CLI::App& app, RunConfig& c, std::string& config_path) {
    app.add_option("--config", config_path, "JSON config file; explicit flags override it");
    app.add_option("--out", c.out, "output directory")->capture_default_str();
    app.add_option("--threads", c.threads,
                   "worker threads; 1 plus --deterministic guarantees reproducibility")
        ->capture_default_str();
    app.add_flag("--deterministic", c.deterministic,
                 "byte-identical numeric outputs across reruns");
    app.add_option("--seed", c.seed, "random seed (recorded; commands are deterministic)")
        ->capture_default_str();
}

void add_generator_options(CLI::App& app, RunConfig& c) {
    app.add_option("--kind", c.kind, "synthetic generator: plate | cap | fold");
    app.add_option("--n", c.grid_n, "grid resolution per side")->capture_default_str();
    app.add_option("--side", c.plate_side, "plate side length, mm")->capture_default_str();
    app.add_option("--height", c.plate_h, "plate separation, mm")->capture_default_str();
    app.add_option("--r-in", c.cap_r_in, "cap inner radius, mm")->capture_default_str();
    app.add_option("--r-out", c.cap_r_out, "cap outer radius, mm")->capture_default_str();
    app.add_option("--angle", c.cap_angle, "cap full opening angle, radians")
        ->capture_default_str();
    app.add_option("--amplitude", c.fold_amplitude, "fold crest-to-trough amplitude, mm")
        ->capture_default_str();
    app.add_option("--wavelength", c.fold_wavelength, "fold wavelength, mm")
        ->capture_default_str();
    app.add_option("--thickness", c.fold_thickness, "fold normal offset, mm")
        ->capture_default_str();
}

void add_input_options(CLI::App& app, RunConfig& c) {
    app.add_option("--inner", c.inner_path, "inner surface mesh (.off or .ply)");
    app.add_option("--outer", c.outer_path, "outer surface mesh (.off or .ply)");
}

void add_solver_options(CLI::App& app, RunConfig& c) {
    app.add_option("-T,--timesteps", c.solver.timesteps, "flow time steps (paper symbol T)")
        ->capture_default_str();
    app.add_option("--sigma-v", c.solver.sigma_v,
                   "velocity kernel width sigma_V, mm (paper symbol σ_V for the V kernel); "
                   "0 resolves to 0.4 x inner bounding-box diagonal")
        ->capture_default_str();
    app.add_option("--lambda", c.solver.lambda,
                   "hybrid-norm surface weight (paper symbol λ)")
        ->capture_default_str();
    app.add_option("--sigma-w", c.solver.sigma_w,
                   "varifold kernel width, mm (paper symbol σ_W, the χ width); "
                   "0 resolves to 2 x outer median edge length")
        ->capture_default_str();
    app.add_option("--attachment-weight", c.solver.attachment_weight,
                   "data-attachment weight (paper symbol w_D)")
        ->capture_default_str();
    app.add_option("--inner-max-iterations", c.solver.inner_max_iterations,
                   "quasi-Newton iteration cap per outer pass")
        ->capture_default_str();
    app.add_option("--inner-gradient-tolerance", c.solver.inner_gradient_tolerance,
                   "relative gradient-norm stop for the inner solve")
        ->capture_default_str();
    app.add_option("--rho0", c.solver.al_rho0, "initial augmented-Lagrangian penalty rho")
        ->capture_default_str();
    app.add_option("--al-growth", c.solver.al_growth, "penalty growth factor gamma")
        ->capture_default_str();
    app.add_option("--al-shrink", c.solver.al_shrink,
                   "required violation shrink theta before rho grows")
        ->capture_default_str();
    app.add_option("--constraint-tolerance", c.solver.constraint_tolerance,
                   "stop when max|C| / mean|v| falls below this")
        ->capture_default_str();
    app.add_option("--max-outer-iterations", c.solver.max_outer_iterations,
                   "augmented-Lagrangian outer iteration cap")
        ->capture_default_str();
}

void add_report_options(CLI::App& app, RunConfig& c) {
    app.add_option("--trajectory", c.trajectory_dir,
                   "saved trajectory directory (default <out>/trajectory)");
    app.add_option("--rings", c.rings, "boundary exclusion rings for statistics")
        ->capture_default_str();
    app.add_option("--bins", c.bins, "histogram bins")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"normal-coordinate cortical ribbon toolkit"};
    app.require_subcommand(1);

    RunConfig c;
    std::string config_path;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic inner/outer pair");
    CLI::App* reg = app.add_subcommand(
        "register", "flow the inner surface onto the outer under the normality constraint");
    CLI::App* thick = app.add_subcommand("thickness", "column-length thickness from a trajectory");
    CLI::App* cmp = app.add_subcommand(
        "compare", "side-by-side baseline-vs-column thickness tables and histograms");
    CLI::App* grid = app.add_subcommand(
        "export-grid", "export per-timestep sheets and column polylines (the coordinate grid)");

    for (CLI::App* sub : {synth, reg, thick, cmp, grid}) add_common_options(*sub, c, config_path);
    add_generator_options(*synth, c);
    for (CLI::App* sub : {reg, thick, cmp}) {
        add_generator_options(*sub, c);
        add_input_options(*sub, c);
    }
    add_solver_options(*reg, c);
    for (CLI::App* sub : {thick, cmp, grid}) add_report_options(*sub, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(config_path, *sub, c);
        if (c.threads < 1) throw ConfigError("--threads must be >= 1");
        if (c.deterministic && c.threads != 1)
            throw ConfigError("--deterministic requires --threads 1");

        if (sub == synth) return cmd_synth(c);
        if (sub == reg) return cmd_register(c);
        if (sub == thick) return cmd_thickness(c);
        if (sub == cmp) return cmd_compare(c);
        return cmd_export_grid(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MeshError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
