#pragma once

#include <string>
#include <vector>

#include "ribbon/mesh.hpp"
#include "ribbon/solver.hpp"

namespace ribbon {

// Arc length of each columnar line t -> q[t][u].
Eigen::VectorXd column_lengths(const Trajectory& traj);

// Symmetric nearest-vertex average baseline: for each inner vertex r_i,
// ( |r_i - f(r_i)| + |f(r_i) - g(f(r_i))| ) / 2 with f the nearest outer
// vertex and g the nearest inner vertex. Vertex-to-vertex by definition.
Eigen::VectorXd freesurfer_distance(const TriMesh& inner, const TriMesh& outer);

struct CorrectedLengths {
    Eigen::VectorXd lengths;
    std::vector<char> corrected;  // false where no crossing was found (fallback)
};

// Extends or trims the final segment of each column along its direction to
// the nearest crossing with the outer mesh, capped at 3x the segment length.
CorrectedLengths endpoint_correction(const Trajectory& traj, const TriMesh& outer);

// Inclusion mask; rings = 0 excludes nothing, rings = 1 excludes exactly the
// boundary vertices, each further ring one more edge-hop inward.
std::vector<char> boundary_filter(const TriMesh& inner, int rings);

struct Histogram {
    Eigen::VectorXd edges;   // bins + 1 entries
    Eigen::VectorXi counts;  // sums to the included count; outliers clamp into the last bin
};

struct SummaryStats {
    double mean = 0.0, median = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
    Eigen::Index count = 0;
};

struct ThicknessReport {
    Eigen::VectorXd values;       // per-vertex (or pooled) lengths, mm
    std::vector<char> included;
    Histogram histogram;
    SummaryStats summary;
    std::string label;
};

// Histogram over [0, hi] (hi = 0 picks the 99.5th percentile) plus summary
// moments of the included values. Throws on an empty mask.
ThicknessReport thickness_stats(const Eigen::VectorXd& values, const std::vector<char>& included,
                                int bins = 50, double hi = 0.0,
                                const std::string& label = "");

// Concatenates included values across reports before binning.
ThicknessReport pool_reports(const std::vector<ThicknessReport>& reports, int bins = 50);

}  // namespace ribbon
