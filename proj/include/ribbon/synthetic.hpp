#pragma once

#include <map>
#include <string>

#include "ribbon/mesh.hpp"

namespace ribbon {

// Generator output with its analytic ground truth, written as a sidecar by
// the CLI so downstream stages can check against it.
struct SyntheticPair {
    SurfacePair pair;
    std::string kind;                         // plate | cap | fold
    double thickness = 0.0;                   // exact column length, mm
    std::map<std::string, double> params;
};

// Flat inner plate at z=0 over [0,side]^2 on an n x n grid, outer at z=h.
SyntheticPair make_plate_pair(int n, double side, double h);

// Concentric spherical patches (gnomonic square patch of full opening angle
// cap_angle) at radii R_in and R_out; thickness R_out - R_in everywhere.
SyntheticPair make_cap_pair(double r_in, double r_out, double cap_angle, int n);

// Sinusoidal fold z = (amplitude/2) sin(2 pi x / wavelength) over one
// wavelength square; outer = inner offset by `thickness` along the inner
// vertex normals. Throws if the offset flips any face.
SyntheticPair make_fold_pair(double amplitude, double wavelength, double thickness, int n);

}  // namespace ribbon
