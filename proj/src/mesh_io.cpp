#include "ribbon/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace ribbon {

namespace {

std::string next_content_line(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t\r\n");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        return line;
    }
    throw IoError(std::string("unexpected end of file while reading ") + what);
}

void format_coord(std::ostream& out, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
}

TriMesh read_off(std::istream& in) {
    std::string header = next_content_line(in, "OFF header");
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "OFF") throw IoError("not an OFF file (header '" + magic + "')");
    long nv = -1, nf = -1, ne = 0;
    // counts may share the header line or follow it
    if (!(hs >> nv >> nf >> ne)) {
        std::istringstream cs(next_content_line(in, "OFF counts"));
        if (!(cs >> nv >> nf >> ne)) throw IoError("malformed OFF count line");
    }
    if (nv < 0 || nf < 0) throw IoError("negative OFF counts");

    TriMesh m;
    m.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in, "OFF vertex"));
        if (!(ls >> m.vertices(i, 0) >> m.vertices(i, 1) >> m.vertices(i, 2)))
            throw IoError("malformed OFF vertex line " + std::to_string(i));
    }
    m.faces.resize(nf, 3);
    for (long f = 0; f < nf; ++f) {
        std::istringstream ls(next_content_line(in, "OFF face"));
        int k;
        if (!(ls >> k)) throw IoError("malformed OFF face line " + std::to_string(f));
        if (k != 3) throw IoError("OFF face " + std::to_string(f) + " has " +
                                  std::to_string(k) + " vertices; only triangles are supported");
        if (!(ls >> m.faces(f, 0) >> m.faces(f, 1) >> m.faces(f, 2)))
            throw IoError("malformed OFF face line " + std::to_string(f));
    }
    return m;
}

struct PlyProperty {
    std::string type;
    std::string name;
    bool is_list = false;
};

TriMesh read_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty PLY file");
    if (line.rfind("ply", 0) != 0) throw IoError("not a PLY file");

    long nv = -1, nf = -1;
    std::vector<PlyProperty> vertex_props, face_props;
    std::vector<PlyProperty>* current = nullptr;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "comment" || tok.empty()) {
            continue;
        } else if (tok == "element") {
            std::string name;
            long count;
            if (!(ls >> name >> count)) throw IoError("malformed PLY element line");
            if (name == "vertex") {
                nv = count;
                current = &vertex_props;
            } else if (name == "face") {
                nf = count;
                current = &face_props;
            } else {
                current = nullptr;  // unknown element, properties skipped
            }
        } else if (tok == "property") {
            PlyProperty p;
            ls >> p.type;
            if (p.type == "list") {
                std::string count_type, elem_type;
                ls >> count_type >> elem_type >> p.name;
                p.is_list = true;
            } else {
                ls >> p.name;
            }
            if (current) current->push_back(p);
        } else if (tok == "end_header") {
            break;
        } else {
            throw IoError("unrecognized PLY header line: " + line);
        }
    }
    if (!ascii) throw IoError("only ascii PLY is supported");
    if (nv < 0 || nf < 0) throw IoError("PLY header missing vertex or face element");

    int ix = -1, iy = -1, iz = -1;
    for (size_t p = 0; p < vertex_props.size(); ++p) {
        if (vertex_props[p].name == "x") ix = static_cast<int>(p);
        if (vertex_props[p].name == "y") iy = static_cast<int>(p);
        if (vertex_props[p].name == "z") iz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw IoError("PLY vertex element lacks x/y/z properties");

    TriMesh m;
    m.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in, "PLY vertex"));
        std::vector<double> vals(vertex_props.size());
        for (size_t p = 0; p < vertex_props.size(); ++p)
            if (!(ls >> vals[p])) throw IoError("malformed PLY vertex line " + std::to_string(i));
        m.vertices(i, 0) = vals[ix];
        m.vertices(i, 1) = vals[iy];
        m.vertices(i, 2) = vals[iz];
    }
    m.faces.resize(nf, 3);
    for (long f = 0; f < nf; ++f) {
        std::istringstream ls(next_content_line(in, "PLY face"));
        int k;
        if (!(ls >> k)) throw IoError("malformed PLY face line " + std::to_string(f));
        if (k != 3) throw IoError("PLY face " + std::to_string(f) + " is not a triangle");
        if (!(ls >> m.faces(f, 0) >> m.faces(f, 1) >> m.faces(f, 2)))
            throw IoError("malformed PLY face line " + std::to_string(f));
    }
    return m;
}

}  // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".off" || ext == ".OFF") return MeshFormat::Off;
    if (ext == ".ply" || ext == ".PLY") return MeshFormat::PlyAscii;
    throw IoError("cannot infer mesh format from extension '" + ext + "'");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    TriMesh m = (format == MeshFormat::Off) ? read_off(in) : read_ply(in);
    validate_mesh(m);
    return m;
}

TriMesh load_mesh(const std::filesystem::path& path) {
    return load_mesh(path, format_from_extension(path));
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void save_mesh(const TriMesh& m, const std::filesystem::path& path, MeshFormat format) {
    std::ostringstream out;
    if (format == MeshFormat::Off) {
        out << "OFF\n" << m.vertex_count() << " " << m.face_count() << " 0\n";
        for (Eigen::Index i = 0; i < m.vertex_count(); ++i) {
            format_coord(out, m.vertices(i, 0));
            out << ' ';
            format_coord(out, m.vertices(i, 1));
            out << ' ';
            format_coord(out, m.vertices(i, 2));
            out << '\n';
        }
        for (Eigen::Index f = 0; f < m.face_count(); ++f)
            out << "3 " << m.faces(f, 0) << ' ' << m.faces(f, 1) << ' ' << m.faces(f, 2) << '\n';
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << m.vertex_count() << "\n";
        out << "property double x\nproperty double y\nproperty double z\n";
        out << "element face " << m.face_count() << "\n";
        out << "property list uchar int vertex_indices\nend_header\n";
        for (Eigen::Index i = 0; i < m.vertex_count(); ++i) {
            format_coord(out, m.vertices(i, 0));
            out << ' ';
            format_coord(out, m.vertices(i, 1));
            out << ' ';
            format_coord(out, m.vertices(i, 2));
            out << '\n';
        }
        for (Eigen::Index f = 0; f < m.face_count(); ++f)
            out << "3 " << m.faces(f, 0) << ' ' << m.faces(f, 1) << ' ' << m.faces(f, 2) << '\n';
    }
    atomic_write_text(path, out.str());
}

void save_mesh(const TriMesh& m, const std::filesystem::path& path) {
    save_mesh(m, path, format_from_extension(path));
}

}  // namespace ribbon
