// scherk_tower: solve the period problem, build and audit tower meshes.
//
// Exit codes: 0 ok, 1 I/O failure, 2 no period root, 3 weld mismatch,
// 4 audit failure, 64 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "scherk/config.hpp"
#include "scherk/errors.hpp"
#include "scherk/mesh_io.hpp"
#include "scherk/meshgen.hpp"
#include "scherk/periods.hpp"
#include "scherk/verify.hpp"

using namespace scherk;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "scherk_tower 1.0.0";
constexpr int kExitIo = 1, kExitNoRoot = 2, kExitWeld = 3, kExitAudit = 4, kExitUsage = 64;

struct Flags {
    std::optional<int> k, resolution, copies;
    std::optional<double> y, x, end_cutoff, tol_quad, tol_solver, tol_solver_quad, tol_weld;
    std::optional<std::string> out, config, x_window, y_grid;
    std::optional<std::uint64_t> seed;
    std::string corner, mesh_path;
    std::vector<std::string> only;
};

void add_common(CLI::App* c, Flags& f) {
    c->add_option("--k", f.k, "number of end pairs (>= 3)");
    c->add_option("--y", f.y, "branch value y in (0,1)");
    c->add_option("--x", f.x, "branch value x in (-1,0); solved when absent");
    c->add_option("--resolution", f.resolution, "grid resolution (>= 8)");
    c->add_option("--end-cutoff", f.end_cutoff, "radius of the excluded disk around z = 1");
    c->add_option("--copies", f.copies, "vertical periods on each side: translations (0,0,4m), |m| < copies");
    c->add_option("--tol-quad", f.tol_quad, "quadrature tolerance");
    c->add_option("--tol-solver", f.tol_solver, "|D| target of the period solver");
    c->add_option("--tol-solver-quad", f.tol_solver_quad, "quadrature tolerance inside the solver");
    c->add_option("--tol-weld", f.tol_weld, "weld tolerance (model units)");
    c->add_option("--out", f.out, "output directory");
    c->add_option("--config", f.config, "config file (key = value)");
    c->add_option("--seed", f.seed, "seed for sample placement");
    c->add_option("--x-window", f.x_window, "x search window lo:hi");
    c->add_option("--y-grid", f.y_grid, "comma separated y values for solve");
}

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config ? load_config(*f.config) : RunConfig{};
    if (f.k) c.k = *f.k;
    if (f.y) c.y = *f.y;
    if (f.x) c.x = *f.x;
    if (f.resolution) c.resolution = *f.resolution;
    if (f.end_cutoff) c.end_cutoff = *f.end_cutoff;
    if (f.copies) c.copies = *f.copies;
    if (f.tol_quad) c.tol["quad"] = *f.tol_quad;
    if (f.tol_solver) c.tol["solver"] = *f.tol_solver;
    if (f.tol_solver_quad) c.tol["solver_quad"] = *f.tol_solver_quad;
    if (f.tol_weld) c.tol["weld"] = *f.tol_weld;
    if (f.out) c.output_dir = *f.out;
    if (f.seed) c.seed = *f.seed;
    if (f.x_window) c.x_window = parse_window(*f.x_window);
    if (f.y_grid) c = parse_config("y_grid = " + *f.y_grid, c);
    c.validate();
    return c;
}

json config_json(const RunConfig& c) {
    json j;
    j["k"] = c.k;
    j["y"] = c.y ? json(*c.y) : json(nullptr);
    j["x"] = c.x ? json(*c.x) : json(nullptr);
    j["mesh_y"] = c.mesh_y;
    j["resolution"] = c.resolution;
    j["end_cutoff"] = c.end_cutoff;
    j["copies"] = c.copies;
    j["tolerances"] = json(c.tol);
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["x_window"] = {c.x_window.first, c.x_window.second};
    j["y_grid"] = c.y_grid;
    char h[32];
    std::snprintf(h, sizeof h, "%016llx", (unsigned long long)config_hash(c));
    j["hash"] = h;
    return j;
}

std::string out_path(const RunConfig& c, const std::string& name) {
    return (std::filesystem::path(c.output_dir) / name).string();
}

json quad_json(const QuadratureResult& q) {
    json j;
    if (q.divergent) {
        j["value"] = q.divergence_sign > 0 ? "+inf" : "-inf";
    } else {
        j["value"] = q.value;
    }
    j["abs_error_estimate"] = q.abs_error_estimate;
    j["panels_used"] = q.panels_used;
    j["divergent"] = q.divergent;
    return j;
}

SolveOptions solve_options(const RunConfig& c) {
    SolveOptions o;
    o.tol = c.tolerance("solver");
    o.quad_tol = c.tolerance("solver_quad");
    return o;
}

// x on the period curve for the configured y, or nullopt when no root lies in the window.
std::optional<TowerParams> mesh_params(const RunConfig& c) {
    TowerParams p{c.k, c.y.value_or(c.mesh_y), c.x.value_or(-0.5)};
    if (c.x) return p;
    const PeriodCurve curve = solve_period_curve(c.k, {p.y}, c.x_window, solve_options(c));
    if (curve.points.empty()) {
        for (const auto& d : curve.diagnostics) std::cerr << d.kind << ": " << d.message << "\n";
        return std::nullopt;
    }
    p.x = curve.points.front().x;
    return p;
}

int cmd_solve(const RunConfig& c) {
    const PeriodCurve curve = solve_period_curve(c.k, c.y_grid, c.x_window, solve_options(c));
    const std::string stem = "period_curve_k" + std::to_string(c.k);
    io::write_text_atomic(out_path(c, stem + ".csv"), period_curve_csv(curve));
    json j;
    j["tool"] = kVersion;
    j["config"] = config_json(c);
    j["roots"] = curve.points.size();
    auto pts = json::array();
    for (const auto& p : curve.points)
        pts.push_back({{"y", p.y}, {"x", p.x}, {"residual", p.residual}, {"bracket_width", p.bracket_width}});
    j["points"] = pts;
    auto diag = json::array();
    for (const auto& d : curve.diagnostics) diag.push_back({{"y", d.y}, {"kind", d.kind}, {"message", d.message}});
    j["diagnostics"] = diag;
    io::write_text_atomic(out_path(c, stem + ".json"), j.dump(2) + "\n");
    for (const auto& d : curve.diagnostics) std::cerr << d.kind << ": " << d.message << "\n";
    if (curve.points.empty()) {
        std::cerr << "no root of D in the x window for any y\n";
        return kExitNoRoot;
    }
    const auto& r = curve.points.front();
    std::printf("root k=%d y=%.17g x=%.17g D=%.3e (%zu of %zu y values solved)\n", c.k, r.y, r.x, r.residual,
                curve.points.size(), c.y_grid.size());
    return 0;
}

int cmd_periods(const RunConfig& c, const std::string& corner) {
    const double tol = c.tolerance("quad");
    json j;
    j["tool"] = kVersion;
    j["config"] = config_json(c);
    if (!corner.empty()) {
        Corner which;
        if (corner == "0,-1") which = Corner::ZeroMinusOne;
        else if (corner == "0,0") which = Corner::ZeroZero;
        else throw ConfigError("--corner must be 0,-1 or 0,0");
        j["corner"] = corner;
        j["k"] = c.k;
        j["I1"] = quad_json(corner_limit_I1(c.k, which, tol));
        j["I2"] = quad_json(corner_limit_I2(c.k, which, tol));
    } else {
        if (!c.y || !c.x) throw ConfigError("periods needs --y and --x, or --corner");
        const PeriodReport r = residual({c.k, *c.y, *c.x}, tol);
        j["params"] = {{"k", c.k}, {"y", *c.y}, {"x", *c.x}};
        j["I1"] = quad_json(r.I1);
        j["I2"] = quad_json(r.I2);
        j["D"] = r.D;
        j["D_error"] = r.D_error;
    }
    const std::string text = j.dump(2) + "\n";
    io::write_text_atomic(out_path(c, "periods_k" + std::to_string(c.k) + ".json"), text);
    std::cout << text;
    return 0;
}

json isometry_json(const Isometry& g) {
    json m = json::array();
    for (int r = 0; r < 3; ++r) m.push_back({g.linear(r, 0), g.linear(r, 1), g.linear(r, 2)});
    return {{"word", g.word}, {"linear", m}, {"translation", {g.translation.x, g.translation.y, g.translation.z}},
            {"parity", g.parity}};
}

int cmd_mesh(const RunConfig& c) {
    const auto p = mesh_params(c);
    if (!p) return kExitNoRoot;
    const double weld_tol = c.tolerance("weld");
    const TowerMesh t = build_tower(*p, c.resolution, c.end_cutoff, c.copies, c.tolerance("quad"), {weld_tol, false});
    const PeriodReport D = residual(*p, c.tolerance("quad"));

    const std::string stem = "tower_k" + std::to_string(c.k);
    io::write_obj(out_path(c, stem + ".obj"), t.tower.mesh);
    io::write_ply(out_path(c, stem + ".ply"), t.tower.mesh);
    json j;
    j["tool"] = kVersion;
    j["k"] = p->k;
    j["y"] = p->y;
    j["x"] = p->x;
    j["end_cutoff"] = c.end_cutoff;
    j["end_truncation"] = "Scherk ends cut at |z-1| = end_cutoff";
    j["resolution"] = c.resolution;
    j["copies"] = c.copies;
    j["period"] = mesh_vertical_period(t.piece);
    j["raw_period"] = 4.0 / t.scale;
    j["scale"] = t.scale;
    j["residual_D"] = D.D;
    j["weld_residual"] = {{"boundary", t.tower.weld.boundary}, {"closure", t.tower.weld.closure},
                          {"tolerance", weld_tol}};
    j["pieces"] = t.group.elements.size();
    j["pieces_per_period"] = t.group.per_period;
    j["vertices_per_piece"] = t.piece.vertices.size();
    j["faces_per_piece"] = t.piece.faces.size();
    j["vertices"] = t.tower.mesh.vertices.size();
    j["faces"] = t.tower.mesh.faces.size();
    auto gens = json::array();
    for (const auto& g : t.group.generators) gens.push_back(isometry_json(g));
    j["generators"] = gens;
    j["config"] = config_json(c);
    io::write_text_atomic(out_path(c, stem + ".json"), j.dump(2) + "\n");

    std::printf("mesh k=%d y=%.17g x=%.17g: %zu vertices, %zu faces, D=%.3e, weld residual %.3e\n", p->k, p->y, p->x,
                t.tower.mesh.vertices.size(), t.tower.mesh.faces.size(), D.D, t.tower.weld.max());
    if (t.tower.weld.max() > weld_tol) {
        std::cerr << "WeldMismatch: symmetric boundary curves miss by " << t.tower.weld.max() << " > " << weld_tol
                  << " (parameters off the period curve?)\n";
        return kExitWeld;
    }
    return 0;
}

// Boundary of the first piece by edge use counts, so the normal test skips it.
void tag_piece_boundary(FundamentalMesh& piece) {
    std::map<std::pair<int, int>, int> uses;
    for (const auto& f : piece.faces)
        for (int i = 0; i < 3; ++i) {
            int a = f[i], b = f[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            ++uses[{a, b}];
        }
    piece.tags.assign(piece.vertices.size(), BoundaryTag::Interior);
    for (const auto& [e, n] : uses)
        if (n == 1) piece.tags[e.first] = piece.tags[e.second] = BoundaryTag::End;
}

int cmd_verify(const RunConfig& c, const std::set<std::string>& only, const std::string& mesh_path) {
    AuditOptions o;
    o.quad_tol = c.tolerance("quad");
    o.resolution = c.resolution;
    o.end_cutoff = c.end_cutoff;
    o.copies = c.copies;
    o.weld_tol = c.tolerance("weld");
    o.seed = unsigned(c.seed);
    o.only = only;

    AuditReport rep;
    if (!mesh_path.empty()) {
        std::filesystem::path meta = mesh_path;
        meta.replace_extension(".json");
        const json m = json::parse(io::read_text(meta.string()));
        const TowerParams p{m.at("k").get<int>(), m.at("y").get<double>(), m.at("x").get<double>()};
        FundamentalMesh tower = io::read_obj(mesh_path);
        o.include_mesh = false;
        rep = run_audit(p, o);
        const SymmetryGroup g = symmetry_group(p, m.at("copies").get<int>());
        FundamentalMesh piece = tower;
        piece.faces.resize(std::min(piece.faces.size(), m.at("faces_per_piece").get<size_t>()));
        tag_piece_boundary(piece);
        MeshCheckOptions mo;
        mo.h = 1.0 / m.at("resolution").get<int>();
        mo.piece = &piece;
        for (const auto& chk : check_mesh(tower, g, mo))
            if (selected(only, chk.name)) rep.add(chk);
    } else {
        const auto p = mesh_params(c);
        if (!p) return kExitNoRoot;
        rep = run_audit(*p, o);
    }
    rep.tool_version = kVersion;
    char h[32];
    std::snprintf(h, sizeof h, "%016llx", (unsigned long long)config_hash(c));
    rep.config_hash = h;
    json j = rep.to_json();
    j["config"] = config_json(c);
    if (!mesh_path.empty()) j["mesh"] = mesh_path;
    io::write_text_atomic(out_path(c, "audit_k" + std::to_string(rep.params.k) + ".json"), j.dump(2) + "\n");
    std::cout << rep.table();
    return rep.passed() ? 0 : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singly periodic Scherk saddle towers: period solve, mesh generation, audit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Flags f;
    auto* solve = app.add_subcommand("solve", "trace the period curve D(y, x) = 0");
    auto* periods = app.add_subcommand("periods", "report the period integrals at (y, x) or a corner");
    auto* mesh = app.add_subcommand("mesh", "build a normalized, replicated tower mesh");
    auto* verify = app.add_subcommand("verify", "audit Weierstrass data, symmetries and a mesh");
    for (auto* c : {solve, periods, mesh, verify}) add_common(c, f);
    periods->add_option("--corner", f.corner, "corner limit: 0,-1 or 0,0");
    verify->add_option("--only", f.only, "run only these checks (names or group prefixes)")->delimiter(',');
    verify->add_option("--mesh", f.mesh_path, "audit an existing OBJ (metadata JSON alongside)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        const RunConfig c = resolve(f);
        if (solve->parsed()) return cmd_solve(c);
        if (periods->parsed()) return cmd_periods(c, f.corner);
        if (mesh->parsed()) return cmd_mesh(c);
        if (verify->parsed()) return cmd_verify(c, {f.only.begin(), f.only.end()}, f.mesh_path);
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidParams& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "I/O error: bad metadata: " << e.what() << "\n";
        return kExitIo;
    } catch (const WeldMismatch& e) {
        std::cerr << "WeldMismatch: " << e.what() << "\n";
        return kExitWeld;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
