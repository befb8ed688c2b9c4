#pragma once

#include <filesystem>

#include "ribbon/solver.hpp"
#include "ribbon/thickness.hpp"

namespace ribbon {

// Trajectory directory layout:
//   meta.json                 timesteps, dt, counts
//   sheet_000.off ...         one mesh per timestep (t = 0 is the inner mesh)
//   columns.tsv               per vertex: index then T+1 points, tab-delimited
//   controls.tsv              per row: t, vertex, 3 coefficients
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
Trajectory load_trajectory(const std::filesystem::path& dir);

// One record per outer iteration plus status lines.
void save_convergence_report(const SolveReport& report, const std::filesystem::path& file);

// thickness.tsv: index, column length, corrected length, baseline,
// boundary-excluded flag, correction-fallback flag
void save_thickness_table(const Eigen::VectorXd& column, const Eigen::VectorXd& corrected,
                          const Eigen::VectorXd& baseline, const std::vector<char>& included,
                          const std::vector<char>& correction_hit,
                          const std::filesystem::path& file);

void save_histogram(const Histogram& hist, const std::filesystem::path& file);

}  // namespace ribbon
