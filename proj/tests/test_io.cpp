#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "scherk/config.hpp"
#include "scherk/errors.hpp"
#include "scherk/geom.hpp"
#include "scherk/mesh_io.hpp"

using namespace scherk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "scherk_unit";
    fs::create_directories(d);
    return d / name;
}

FundamentalMesh tetra() {
    FundamentalMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1.0 / 3.0}};
    m.gauss = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {1, 0, 0}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    m.tags.assign(4, BoundaryTag::Interior);
    return m;
}

}  // namespace

TEST_CASE("triangle intersection") {
    using T = std::array<Vec3, 3>;
    const T a{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}};
    CHECK(geom::triangles_intersect(a, T{{{0.2, 0.2, -1}, {0.2, 0.2, 1}, {0.3, 0.25, 1}}}));
    CHECK(!geom::triangles_intersect(a, T{{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}}}));
    CHECK(!geom::triangles_intersect(a, T{{{2, 2, -1}, {2, 2, 1}, {3, 2, 0}}}));
    // coplanar overlap and coplanar separation
    CHECK(geom::triangles_intersect(a, T{{{0.1, 0.1, 0}, {2, 0.1, 0}, {0.1, 2, 0}}}));
    CHECK(!geom::triangles_intersect(a, T{{{2, 2, 0}, {3, 2, 0}, {2, 3, 0}}}));
    // touching counts as intersecting
    CHECK(geom::triangles_intersect(a, T{{{1, 0, 0}, {2, 0, 1}, {2, 1, 0}}}));
}

TEST_CASE("self-intersection search") {
    const FundamentalMesh m = tetra();
    CHECK(geom::find_self_intersections(m.vertices, m.faces).hits == 0);
    // a sheet stabbed by a disjoint triangle
    std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.2, 0.2, -1}, {0.2, 0.2, 1}, {0.3, 0.25, 1}};
    std::vector<std::array<int, 3>> f{{0, 1, 2}, {3, 4, 5}};
    const geom::SelfIntersection s = geom::find_self_intersections(v, f);
    CHECK(s.hits == 1);
    CHECK(s.pairs_tested == 1);
}

TEST_CASE("nearest-point index matches brute force") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<Vec3> pts(500);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    const geom::PointIndex idx(pts, 0.25);
    CHECK(idx.size() == 500);
    for (int i = 0; i < 100; ++i) {
        const Vec3 q{u(rng) * 1.5, u(rng), u(rng)};
        double best = HUGE_VAL;
        for (const auto& p : pts) best = std::min(best, norm(p - q));
        CHECK(idx.nearest(q) == best);
    }
}

TEST_CASE("OBJ round trip is exact") {
    const FundamentalMesh m = tetra();
    const fs::path p = scratch("tetra.obj");
    io::write_obj(p.string(), m);
    const FundamentalMesh r = io::read_obj(p.string());
    REQUIRE(r.vertices.size() == 4);
    for (size_t i = 0; i < 4; ++i) CHECK(norm(r.vertices[i] - m.vertices[i]) == 0.0);
    CHECK(r.faces == m.faces);
    CHECK(io::obj_string(m) == io::read_text(p.string()));
    CHECK_THROWS_AS(io::read_obj(scratch("missing.obj").string()), IoError);
}

TEST_CASE("binary PLY layout") {
    const FundamentalMesh m = tetra();
    const std::string b = io::ply_bytes(m);
    const auto end = b.find("end_header\n");
    REQUIRE(end != std::string::npos);
    const std::string header = b.substr(0, end);
    CHECK(header.find("format binary_little_endian 1.0") != std::string::npos);
    CHECK(header.find("element vertex 4") != std::string::npos);
    CHECK(header.find("element face 4") != std::string::npos);
    const size_t body = b.size() - end - std::strlen("end_header\n");
    // 4 vertices of position + normal doubles, 4 faces of (uchar count, 3 ints)
    CHECK(body == 4 * 6 * sizeof(double) + 4 * (1 + 3 * sizeof(int)));
    double x1 = 0;
    std::memcpy(&x1, b.data() + end + 11 + 6 * sizeof(double), sizeof(double));
    CHECK(x1 == 1.0);
}

TEST_CASE("atomic text writes") {
    const fs::path p = scratch("nested/dir/out.txt");
    fs::remove_all(scratch("nested"));
    io::write_text_atomic(p.string(), "abc\n");
    CHECK(io::read_text(p.string()) == "abc\n");
    CHECK(!fs::exists(p.string() + ".tmp"));
    io::write_text_atomic(p.string(), "xyz\n");
    CHECK(io::read_text(p.string()) == "xyz\n");
    CHECK_THROWS_AS(io::write_text_atomic("/proc/definitely/not/here.txt", "x"), IoError);
}

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(
        "# comment\n"
        "k = 4\n"
        "y = 0.2   # trailing\n"
        "resolution = 32\n"
        "tol.quad = 1e-9\n"
        "x_window = -0.9:-0.1\n"
        "y_grid = 0.1, 0.2\n"
        "output_dir = runs/a\n");
    CHECK(c.k == 4);
    CHECK(c.y.value() == 0.2);
    CHECK(!c.x);
    CHECK(c.resolution == 32);
    CHECK(c.tolerance("quad") == 1e-9);
    CHECK(c.tolerance("weld") == 1e-6);
    CHECK(c.x_window == std::make_pair(-0.9, -0.1));
    CHECK(c.y_grid == std::vector<double>{0.1, 0.2});
    CHECK(c.output_dir == "runs/a");

    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("k = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("k = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("tol.quad = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_window("-0.5"), ConfigError);
    CHECK_THROWS_AS(load_config(scratch("none.cfg").string()), IoError);
}

TEST_CASE("config round trip and hash") {
    RunConfig c;
    c.k = 5;
    c.y = 0.1 + 1e-17;
    c.x = -1.0 / 3.0;
    c.end_cutoff = 0.015;
    c.tol["quad"] = 3e-11;
    c.seed = 42;
    const RunConfig r = parse_config(serialize_config(c));
    CHECK(serialize_config(r) == serialize_config(c));
    CHECK(r.y.value() == c.y.value());
    CHECK(r.x.value() == c.x.value());
    CHECK(config_hash(r) == config_hash(c));
    RunConfig d = c;
    d.seed = 43;
    CHECK(config_hash(d) != config_hash(c));
}
