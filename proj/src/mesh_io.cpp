#include "scherk/mesh_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scherk/errors.hpp"

namespace scherk::io {

namespace fs = std::filesystem;

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string obj_string(const FundamentalMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 120 + mesh.faces.size() * 40);
    char buf[200];
    out += "# scherk tower mesh\n";
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out += buf;
    }
    for (const auto& n : mesh.gauss) {
        std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
        out += buf;
    }
    const bool normals = mesh.gauss.size() == mesh.vertices.size();
    for (const auto& f : mesh.faces) {
        if (normals)
            std::snprintf(buf, sizeof buf, "f %d//%d %d//%d %d//%d\n", f[0] + 1, f[0] + 1, f[1] + 1, f[1] + 1,
                          f[2] + 1, f[2] + 1);
        else
            std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += buf;
    }
    return out;
}

void write_obj(const std::string& path, const FundamentalMesh& mesh) { write_text_atomic(path, obj_string(mesh)); }

FundamentalMesh read_obj(const std::string& path) {
    std::istringstream in(read_text(path));
    FundamentalMesh m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v" || tag == "vn") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) throw IoError(path + ":" + std::to_string(lineno) + ": bad vertex record");
            (tag == "v" ? m.vertices : m.gauss).push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            for (int i = 0; i < 3; ++i) {
                std::string tok;
                if (!(ls >> tok)) throw IoError(path + ":" + std::to_string(lineno) + ": face needs 3 vertices");
                try {
                    f[i] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
                } catch (const std::exception&) {
                    throw IoError(path + ":" + std::to_string(lineno) + ": bad face index '" + tok + "'");
                }
                if (f[i] < 0 || f[i] >= int(m.vertices.size()))
                    throw IoError(path + ":" + std::to_string(lineno) + ": face index out of range");
            }
            m.faces.push_back(f);
        }
    }
    m.tags.assign(m.vertices.size(), BoundaryTag::Interior);
    return m;
}

namespace {

template <class T>
void put_le(std::string& out, T v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    out.append(b, sizeof(T));
}

}  // namespace

std::string ply_bytes(const FundamentalMesh& mesh) {
    std::ostringstream h;
    h << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double nx\nproperty double ny\nproperty double nz\n"
      << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
    std::string out = h.str();
    out.reserve(out.size() + mesh.vertices.size() * 48 + mesh.faces.size() * 13);
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        const Vec3 n = i < mesh.gauss.size() ? mesh.gauss[i] : Vec3{};
        for (double d : {v.x, v.y, v.z, n.x, n.y, n.z}) put_le(out, d);
    }
    for (const auto& f : mesh.faces) {
        put_le(out, std::uint8_t(3));
        for (int i : f) put_le(out, std::int32_t(i));
    }
    return out;
}

void write_ply(const std::string& path, const FundamentalMesh& mesh) { write_text_atomic(path, ply_bytes(mesh)); }

}  // namespace scherk::io
