#include "ribbon/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ribbon/mesh_io.hpp"

namespace ribbon {

namespace {

std::string sheet_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sheet_%03d.off", t);
    return buf;
}

void append_number(std::ostream& out, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const int t_steps = traj.steps();
    nlohmann::json meta = {{"timesteps", t_steps},
                           {"dt", traj.dt},
                           {"vertices", traj.states.front().rows()},
                           {"faces", traj.faces.rows()}};
    atomic_write_text(dir / "meta.json", meta.dump(2) + "\n");

    for (int t = 0; t <= t_steps; ++t)
        save_mesh(TriMesh{traj.states[t], traj.faces}, dir / sheet_name(t));

    std::ostringstream cols;
    const Eigen::Index nv = traj.states.front().rows();
    for (Eigen::Index u = 0; u < nv; ++u) {
        cols << u;
        for (int t = 0; t <= t_steps; ++t) {
            for (int d = 0; d < 3; ++d) {
                cols << '\t';
                append_number(cols, traj.states[t](u, d));
            }
        }
        cols << '\n';
    }
    atomic_write_text(dir / "columns.tsv", cols.str());

    std::ostringstream ctl;
    for (int t = 0; t < t_steps; ++t) {
        for (Eigen::Index u = 0; u < nv; ++u) {
            ctl << t << '\t' << u;
            for (int d = 0; d < 3; ++d) {
                ctl << '\t';
                append_number(ctl, traj.controls[t](u, d));
            }
            ctl << '\n';
        }
    }
    atomic_write_text(dir / "controls.tsv", ctl.str());
}

Trajectory load_trajectory(const std::filesystem::path& dir) {
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) throw IoError("cannot open " + (dir / "meta.json").string());
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    const int t_steps = meta.at("timesteps").get<int>();

    Trajectory traj;
    traj.dt = meta.at("dt").get<double>();
    for (int t = 0; t <= t_steps; ++t) {
        TriMesh sheet = load_mesh(dir / sheet_name(t));
        if (t == 0) traj.faces = sheet.faces;
        traj.states.push_back(std::move(sheet.vertices));
    }

    const Eigen::Index nv = traj.states.front().rows();
    traj.controls.assign(t_steps, Points::Zero(nv, 3));
    std::ifstream ctl(dir / "controls.tsv");
    if (!ctl) throw IoError("cannot open " + (dir / "controls.tsv").string());
    int t;
    Eigen::Index u;
    while (ctl >> t >> u) {
        if (t < 0 || t >= t_steps || u < 0 || u >= nv)
            throw IoError("controls.tsv: row out of range");
        for (int d = 0; d < 3; ++d)
            if (!(ctl >> traj.controls[t](u, d))) throw IoError("controls.tsv: malformed row");
    }
    return traj;
}

void save_convergence_report(const SolveReport& report, const std::filesystem::path& file) {
    std::ostringstream out;
    out << "# outer\tobjective\tattachment\tmax_violation\tmean_speed\trho\t"
           "inner_iterations\tinner_evaluations\n";
    for (const auto& r : report.records) {
        out << r.outer << '\t';
        append_number(out, r.objective);
        out << '\t';
        append_number(out, r.attachment);
        out << '\t';
        append_number(out, r.max_violation);
        out << '\t';
        append_number(out, r.mean_speed);
        out << '\t';
        append_number(out, r.rho);
        out << '\t' << r.inner_iterations << '\t' << r.inner_evaluations << '\n';
    }
    out << "# converged\t" << (report.converged ? "true" : "false") << '\n';
    out << "# fold_over_free\t" << (report.fold_over_free ? "true" : "false") << '\n';
    out << "# status\t" << report.status << '\n';
    atomic_write_text(file, out.str());
}

void save_thickness_table(const Eigen::VectorXd& column, const Eigen::VectorXd& corrected,
                          const Eigen::VectorXd& baseline, const std::vector<char>& included,
                          const std::vector<char>& correction_hit,
                          const std::filesystem::path& file) {
    std::ostringstream out;
    out << "# index\tcolumn_length\tcorrected_length\tbaseline\tboundary_excluded\t"
           "correction_fallback\n";
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        out << i << '\t';
        append_number(out, column[i]);
        out << '\t';
        append_number(out, corrected[i]);
        out << '\t';
        append_number(out, baseline[i]);
        out << '\t' << (included[i] ? 0 : 1) << '\t' << (correction_hit[i] ? 0 : 1) << '\n';
    }
    atomic_write_text(file, out.str());
}

void save_histogram(const Histogram& hist, const std::filesystem::path& file) {
    std::ostringstream out;
    out << "# edge_lo\tedge_hi\tcount\n";
    for (Eigen::Index b = 0; b < hist.counts.size(); ++b) {
        append_number(out, hist.edges[b]);
        out << '\t';
        append_number(out, hist.edges[b + 1]);
        out << '\t' << hist.counts[b] << '\n';
    }
    atomic_write_text(file, out.str());
}

}  // namespace ribbon
