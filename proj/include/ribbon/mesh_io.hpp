#pragma once

#include <filesystem>
#include <string>

#include "ribbon/mesh.hpp"

namespace ribbon {

enum class MeshFormat { Off, PlyAscii };

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

MeshFormat format_from_extension(const std::filesystem::path& path);

// Readers validate the mesh before returning. Positions and faces only;
// unknown PLY properties are skipped.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);  // format by extension

// Coordinates are written with 17 significant digits so that
// load(save(m)) is bit-exact. Writes go through a temp file + rename.
void save_mesh(const TriMesh& m, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriMesh& m, const std::filesystem::path& path);

// temp + rename so partially written files never appear under `path`
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace ribbon
