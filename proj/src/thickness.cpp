#include "ribbon/thickness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "ribbon/spatial_grid.hpp"

namespace ribbon {

Eigen::VectorXd column_lengths(const Trajectory& traj) {
    const Eigen::Index nv = traj.states.front().rows();
    Eigen::VectorXd len = Eigen::VectorXd::Zero(nv);
    for (int t = 0; t < traj.steps(); ++t)
        len += (traj.states[t + 1] - traj.states[t]).rowwise().norm();
    return len;
}

Eigen::VectorXd freesurfer_distance(const TriMesh& inner, const TriMesh& outer) {
    if (inner.vertex_count() == 0 || outer.vertex_count() == 0)
        throw MeshError("freesurfer_distance: empty mesh");
    const VertexGrid outer_grid(outer.vertices);
    const VertexGrid inner_grid(inner.vertices);
    Eigen::VectorXd d(inner.vertex_count());
    for (Eigen::Index i = 0; i < inner.vertex_count(); ++i) {
        const Vec3 r = inner.vertices.row(i);
        const Eigen::Index f = outer_grid.nearest(r);
        const Vec3 fr = outer.vertices.row(f);
        const Eigen::Index g = inner_grid.nearest(fr);
        const Vec3 gf = inner.vertices.row(g);
        d[i] = 0.5 * ((r - fr).norm() + (fr - gf).norm());
    }
    return d;
}

namespace {

// Signed line-triangle intersection parameter along unit direction d from
// origin o (Moller-Trumbore); returns false when parallel or outside.
bool line_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                   double& tau) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = d.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const Vec3 tvec = o - a;
    const double u = tvec.dot(pvec) * inv;
    if (u < -1e-10 || u > 1.0 + 1e-10) return false;
    const Vec3 qvec = tvec.cross(e1);
    const double v = d.dot(qvec) * inv;
    if (v < -1e-10 || u + v > 1.0 + 1e-10) return false;
    tau = e2.dot(qvec) * inv;
    return true;
}

}  // namespace

CorrectedLengths endpoint_correction(const Trajectory& traj, const TriMesh& outer) {
    const Eigen::VectorXd base = column_lengths(traj);
    const Eigen::Index nv = base.size();
    const int t_end = traj.steps();
    CorrectedLengths out;
    out.lengths = base;
    out.corrected.assign(nv, 0);

    for (Eigen::Index u = 0; u < nv; ++u) {
        const Vec3 tip = traj.states[t_end].row(u);
        const Vec3 prev = traj.states[t_end - 1].row(u);
        const Vec3 seg = tip - prev;
        const double seg_len = seg.norm();
        if (seg_len < 1e-14) continue;  // stationary column, nothing to adjust
        const Vec3 dir = seg / seg_len;
        const double cap = 3.0 * seg_len;

        double best_tau = std::numeric_limits<double>::infinity();
        bool found = false;
        for (Eigen::Index f = 0; f < outer.face_count(); ++f) {
            double tau;
            if (!line_triangle(tip, dir, outer.vertices.row(outer.faces(f, 0)),
                               outer.vertices.row(outer.faces(f, 1)),
                               outer.vertices.row(outer.faces(f, 2)), tau))
                continue;
            if (std::abs(tau) > cap || tau < -seg_len) continue;
            if (!found || std::abs(tau) < std::abs(best_tau)) {
                best_tau = tau;
                found = true;
            }
        }
        if (found) {
            out.lengths[u] = base[u] + best_tau;
            out.corrected[u] = 1;
        }
    }
    return out;
}

std::vector<char> boundary_filter(const TriMesh& inner, int rings) {
    if (rings < 0) throw std::invalid_argument("boundary_filter: rings must be >= 0");
    std::vector<char> included(inner.vertex_count(), 1);
    if (rings == 0) return included;

    const std::vector<char> boundary = boundary_vertices(inner);
    const auto adj = vertex_adjacency(inner);
    std::vector<int> depth(inner.vertex_count(), -1);
    std::deque<int> queue;
    for (Eigen::Index i = 0; i < inner.vertex_count(); ++i) {
        if (boundary[i]) {
            depth[i] = 0;
            queue.push_back(static_cast<int>(i));
        }
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        if (depth[v] + 1 >= rings) continue;
        for (const int w : adj[v]) {
            if (depth[w] < 0) {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    for (Eigen::Index i = 0; i < inner.vertex_count(); ++i)
        if (depth[i] >= 0 && depth[i] < rings) included[i] = 0;
    return included;
}

ThicknessReport thickness_stats(const Eigen::VectorXd& values, const std::vector<char>& included,
                                int bins, double hi, const std::string& label) {
    if (bins < 1) throw std::invalid_argument("thickness_stats: bins must be >= 1");
    if (static_cast<Eigen::Index>(included.size()) != values.size())
        throw std::invalid_argument("thickness_stats: mask size mismatch");

    std::vector<double> vals;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (included[i]) vals.push_back(values[i]);
    if (vals.empty()) throw std::invalid_argument("thickness_stats: empty mask");

    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    if (hi <= 0.0) {
        const double q = 0.995 * (sorted.size() - 1);
        const size_t lo_idx = static_cast<size_t>(q);
        const double frac = q - lo_idx;
        hi = sorted[lo_idx];
        if (lo_idx + 1 < sorted.size()) hi += frac * (sorted[lo_idx + 1] - sorted[lo_idx]);
        if (hi <= 0.0) hi = std::max(sorted.back(), 1e-12);
    }

    ThicknessReport report;
    report.values = values;
    report.included = included;
    report.label = label;
    report.histogram.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) report.histogram.edges[b] = hi * b / bins;
    report.histogram.counts = Eigen::VectorXi::Zero(bins);
    for (const double v : vals) {
        int b = static_cast<int>(std::floor(v / hi * bins));
        b = std::clamp(b, 0, bins - 1);
        report.histogram.counts[b] += 1;
    }

    SummaryStats& s = report.summary;
    s.count = static_cast<Eigen::Index>(vals.size());
    s.min = sorted.front();
    s.max = sorted.back();
    double sum = 0.0;
    for (const double v : vals) sum += v;
    s.mean = sum / vals.size();
    double var = 0.0;
    for (const double v : vals) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / vals.size());
    s.median = (sorted.size() % 2 == 1)
                   ? sorted[sorted.size() / 2]
                   : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    return report;
}

ThicknessReport pool_reports(const std::vector<ThicknessReport>& reports, int bins) {
    if (reports.empty()) throw std::invalid_argument("pool_reports: no reports");
    std::vector<double> pooled;
    for (const auto& r : reports)
        for (Eigen::Index i = 0; i < r.values.size(); ++i)
            if (r.included[i]) pooled.push_back(r.values[i]);
    Eigen::VectorXd values = Eigen::Map<Eigen::VectorXd>(pooled.data(), pooled.size());
    return thickness_stats(values, std::vector<char>(pooled.size(), 1), bins, 0.0, "pooled");
}

}  // namespace ribbon
