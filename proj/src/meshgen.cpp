#include "scherk/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "scherk/errors.hpp"
#include "scherk/quadrature.hpp"

namespace scherk {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

const char* tag_name(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::Interior: return "interior";
        case BoundaryTag::Stretch1: return "stretch1";
        case BoundaryTag::Stretch4: return "stretch4";
        case BoundaryTag::Stretch5: return "stretch5";
        case BoundaryTag::Stretch6: return "stretch6";
        case BoundaryTag::Ucurve: return "Ucurve";
        case BoundaryTag::End: return "end";
    }
    return "?";
}

int DomainGrid::node(int c, int j, bool lower) const {
    if (j == 0) return center;
    if (c == col_pi && lower && j > j_x) return lower_bank[j];
    return columns[c][j];
}

// ---------------------------------------------------------------------------
// Grid

namespace {

// Distance from y to the unit circle in direction theta.
double ray_to_circle(double y, double th) {
    const double s = std::sin(th);
    return -y * std::cos(th) + std::sqrt(1.0 - y * y * s * s);
}

cplx direction(const DomainGrid& g, int c) {
    if (c == 0 || c + 1 == int(g.theta.size())) return 1.0;
    if (c == g.col_pi) return -1.0;
    return std::polar(1.0, g.theta[c]);
}

double signed_area(cplx a, cplx b, cplx c) {
    return 0.5 * ((b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real());
}

}  // namespace

DomainGrid build_grid(const TowerParams& p, int resolution, double end_cutoff) {
    p.validate();
    if (resolution < 8) throw InvalidParams("grid resolution must be >= 8");
    if (!(end_cutoff > 0.0) || !(end_cutoff < 1.0 - p.y))
        throw GridDegenerate("end cutoff must lie in (0, 1-y)");
    if (end_cutoff >= 0.5 * (1.0 - p.y))
        throw GridDegenerate("end cutoff swallows the anchor (y+1)/2");

    DomainGrid g;
    g.params = p;
    g.resolution = resolution;
    g.end_cutoff = end_cutoff;
    const int N = resolution;
    const int k = p.k;
    const double y = p.y, x = p.x;

    // Columns: [0, pi] graded towards the slit, [pi, theta_e] graded away from
    // it, then a uniform fan across the clipped end sector.
    const double th_c = std::asin(end_cutoff / (1.0 - y));
    const double th_e = 2 * kPi - th_c;
    const int nA = N, nB = N, nC = std::max(2, N / 4);
    for (int i = 0; i <= nA; ++i) {
        const double u = double(i) / nA;
        g.theta.push_back(kPi * (1.0 - (1.0 - u) * (1.0 - u)));
    }
    for (int m = 1; m <= nB; ++m) {
        const double u = double(m) / nB;
        g.theta.push_back(kPi + (th_e - kPi) * u * u);
    }
    for (int m = 1; m <= nC; ++m) g.theta.push_back(th_e + th_c * m / nC);
    g.theta.front() = 0.0;
    g.theta.back() = 2 * kPi;
    g.col_pi = nA;
    g.col_tangent = nA + nB;
    const int ncol = int(g.theta.size());
    const int last = ncol - 1;

    // Rings: X grows like |z-y|^{1/(4k)} near y and like |z-x|^{1/2} near x,
    // so both ends of [y, x] get the matching power of a uniform parameter.
    g.j_x = N / 2;
    g.j_chain = std::max(1, (3 * g.j_x) / 4);
    const double phx = (y - x) / (1.0 + y);
    const double ey = 4.0 * k;
    g.ring_fraction.assign(N + 1, 0.0);
    for (int j = 1; j <= N; ++j) {
        if (j <= g.j_x) {
            const double t = double(j) / g.j_x;
            g.ring_fraction[j] = phx * std::pow(t * (2.0 - t), ey);
        } else {
            const double s = double(j - g.j_x) / (N - g.j_x);
            g.ring_fraction[j] = phx + (1.0 - phx) * s * s;
        }
    }
    g.ring_fraction[g.j_x] = phx;
    g.ring_fraction[N] = 1.0;

    const double c = end_cutoff, ym = 1.0 - y;
    auto radius = [&](int col, int j) {
        const double th = g.theta[col];
        double R = ray_to_circle(y, th);
        if (col == 0) R = 1.0 - y;
        if (col == g.col_pi) R = 1.0 + y;
        if (col > g.col_tangent) {
            const double s = col == last ? 0.0 : std::sin(th);
            const double cs = col == last ? 1.0 : std::cos(th);
            const double disc = c * c - ym * ym * s * s;
            if (disc >= 0) R = std::min(R, ym * cs - std::sqrt(disc));
        }
        return R * g.ring_fraction[j];
    };

    auto add = [&](cplx dy, Side side, int col, int j, NodeKind kind) {
        GridNode n;
        n.pt.dy = dy;
        n.pt.z = y + dy;
        n.side = side;
        n.column = col;
        n.ring = j;
        n.kind = kind;
        g.nodes.push_back(n);
        return int(g.nodes.size()) - 1;
    };

    g.center = add(0.0, Side::Auto, 0, 0, NodeKind::CenterY);
    g.columns.assign(ncol, std::vector<int>(N + 1, g.center));
    g.lower_bank.assign(N + 1, -1);
    for (int col = 0; col < ncol; ++col) {
        const cplx e = direction(g, col);
        const Side side = col == 0 ? Side::Upper : (col == last ? Side::Lower : Side::Auto);
        for (int j = 1; j <= N; ++j) {
            cplx dy = radius(col, j) * e;
            if (col == 0 && j == N) dy = 1.0 - y;
            if (col == g.col_pi) {
                if (j == g.j_x) {
                    g.node_x = g.columns[col][j] = add(x - y, Side::Auto, col, j, NodeKind::BranchX);
                    continue;
                }
                if (j == N) dy = -(1.0 + y);
                if (j > g.j_x) {
                    g.columns[col][j] = add(dy, Side::Upper, col, j, NodeKind::Regular);
                    g.lower_bank[j] = add(dy, Side::Lower, col, j, NodeKind::Regular);
                    continue;
                }
            }
            g.columns[col][j] = add(dy, side, col, j, NodeKind::Regular);
        }
    }
    g.closure_corner = g.columns[g.col_pi][N];

    // Branch tree. Column 0 hangs off the anchor along the real axis, the chain
    // ring links neighbouring columns, and each column then grows radially.
    const cplx dy0 = anchor_point(p) - y;
    const BranchState s0 = anchor_state(p);
    g.nodes[g.center].pt.branch = s0;
    auto from = [&](int child, int parent) {
        GridNode& n = g.nodes[child];
        n.parent = parent;
        if (parent < 0) {
            n.pt.branch = track_branch(p, dy0, s0, n.pt.dy);
        } else if (n.kind != NodeKind::Regular) {
            n.pt.branch = g.nodes[parent].pt.branch;
        } else {
            const GridNode& q = g.nodes[parent];
            n.pt.branch = track_branch(p, q.pt.dy, q.pt.branch, n.pt.dy);
        }
        n.pt.exterior = false;
    };
    const int jc = g.j_chain;
    for (int j = 1; j <= N; ++j) from(g.columns[0][j], -1);
    for (int col = 1; col < ncol; ++col) from(g.columns[col][jc], g.columns[col - 1][jc]);
    for (int col = 1; col < ncol; ++col) {
        for (int j = jc - 1; j >= 1; --j) from(g.columns[col][j], g.columns[col][j + 1]);
        const int top = col == g.col_pi ? g.j_x : N;
        for (int j = jc + 1; j <= top; ++j) from(g.columns[col][j], g.columns[col][j - 1]);
    }
    for (int j = g.j_x + 1; j <= N; ++j) {
        from(g.columns[g.col_pi][j], g.columns[g.col_pi - 1][j]);
        from(g.lower_bank[j], g.columns[g.col_pi + 1][j]);
    }

    // Cells, counter-clockwise in z: fan at y, then split quads.
    auto at = [&](int col, int j, bool right) {
        // On col_pi the left neighbour sees the upper bank and the right one the lower.
        return g.node(col, j, col == g.col_pi && !right);
    };
    for (int col = 0; col < last; ++col)
        g.cells.push_back({g.center, at(col, 1, false), at(col + 1, 1, true)});
    for (int col = 0; col < last; ++col)
        for (int j = 1; j < N; ++j) {
            const int a = at(col, j, false), b = at(col + 1, j, true);
            const int cc = at(col + 1, j + 1, true), d = at(col, j + 1, false);
            g.cells.push_back({a, d, cc});
            g.cells.push_back({a, cc, b});
        }
    for (const auto& t : g.cells) {
        const double A = signed_area(g.nodes[t[0]].pt.dy, g.nodes[t[1]].pt.dy, g.nodes[t[2]].pt.dy);
        if (!(A > 0.0)) {
            std::ostringstream os;
            os << "grid cell (" << t[0] << "," << t[1] << "," << t[2] << ") has non-positive area " << A;
            throw GridDegenerate(os.str());
        }
    }

    // Boundary loop: S6, S1, U, S4, end arc, S5.
    BoundaryCurve s6{BoundaryTag::Stretch6, {}}, s1{BoundaryTag::Stretch1, {}}, u{BoundaryTag::Ucurve, {}};
    BoundaryCurve s4{BoundaryTag::Stretch4, {}}, end{BoundaryTag::End, {}}, s5{BoundaryTag::Stretch5, {}};
    for (int j = 0; j <= N; ++j) s6.nodes.push_back(g.node(0, j));
    for (int col = 0; col <= g.col_pi; ++col) s1.nodes.push_back(g.node(col, N));
    for (int j = N; j >= g.j_x; --j) u.nodes.push_back(g.node(g.col_pi, j));
    for (int j = g.j_x + 1; j <= N; ++j) u.nodes.push_back(g.node(g.col_pi, j, true));
    s4.nodes.push_back(g.node(g.col_pi, N, true));
    for (int col = g.col_pi + 1; col <= g.col_tangent; ++col) s4.nodes.push_back(g.node(col, N));
    for (int col = g.col_tangent; col <= last; ++col) end.nodes.push_back(g.node(col, N));
    for (int j = N; j >= 0; --j) s5.nodes.push_back(g.node(last, j));
    g.curves = {s6, s1, u, s4, end, s5};
    return g;
}

// ---------------------------------------------------------------------------
// Immersion

namespace {

struct EdgePath {
    cplx dy_ref;
    BranchState ref;
    std::function<cplx(double)> dy;   // sigma in [0, 1]
    std::function<cplx(double)> ddy;
};

quad::Result<Vec3> integrate_path(const TowerParams& p, const EdgePath& e, double tol) {
    quad::Options o;
    o.abs_tol = tol;
    o.max_panels = 4000;
    auto f = [&](double s) -> Vec3 {
        const cplx d = e.dy(s);
        if (std::abs(d) < 1e-150 || std::abs((p.y - p.x) + d) < 1e-150) return {};
        const BranchState b = track_branch(p, e.dy_ref, e.ref, d);
        const WeierstrassForms w = eval_phi(p, DomainPoint::with_branch(p, d, b));
        const cplx t = e.ddy(s);
        return {(w.phi1 * t).real(), (w.phi2 * t).real(), (w.phi3 * t).real()};
    };
    auto r = quad::integrate<Vec3>(f, 0.0, 1.0, o);
    if (!r.converged) {
        std::ostringstream os;
        os << "edge quadrature error " << r.error << " above " << tol;
        throw ToleranceNotMet(os.str(), r.error);
    }
    return r;
}

EdgePath straight(const GridNode& a, const GridNode& b, bool ref_at_a) {
    const cplx da = a.pt.dy, db = b.pt.dy;
    const GridNode& r = ref_at_a ? a : b;
    return {r.pt.dy, r.pt.branch, [=](double s) { return da + s * (db - da); }, [=](double) { return db - da; }};
}

// Integral of Phi from node a to node b (b one ring further out on the same column).
quad::Result<Vec3> radial_edge(const TowerParams& p, const DomainGrid& g, int ia, int ib, double tol) {
    const GridNode& a = g.nodes[ia];
    const GridNode& b = g.nodes[ib];
    const int n = 4 * p.k;
    if (a.kind == NodeKind::CenterY) {
        const cplx db = b.pt.dy;
        EdgePath e{db, b.pt.branch, [=](double s) { return db * std::pow(s, n); },
                   [=](double s) { return db * (n * std::pow(s, n - 1)); }};
        return integrate_path(p, e, tol);
    }
    const double xy = p.y - p.x;
    if (b.kind == NodeKind::BranchX) {
        // z = x + l s^2 from x (s = 0) to a (s = 1); the result is negated.
        const double l = xy + a.pt.dy.real();
        EdgePath e{a.pt.dy, a.pt.branch, [=](double s) { return cplx(-xy + l * s * s, 0.0); },
                   [=](double s) { return cplx(2 * l * s, 0.0); }};
        auto r = integrate_path(p, e, tol);
        r.value = -r.value;
        return r;
    }
    if (a.kind == NodeKind::BranchX) {
        const double l = -xy - b.pt.dy.real();
        EdgePath e{b.pt.dy, b.pt.branch, [=](double s) { return cplx(-xy - l * s * s, 0.0); },
                   [=](double s) { return cplx(-2 * l * s, 0.0); }};
        return integrate_path(p, e, tol);
    }
    return integrate_path(p, straight(a, b, true), tol);
}

Vec3 gauss_of(const TowerParams& p, const GridNode& n) {
    if (n.kind == NodeKind::CenterY) return {0, 0, -1};
    if (n.kind == NodeKind::BranchX) return {0, 0, 1};
    const cplx g = eval_g(p, n.pt);
    const double m = std::norm(g);
    return {2 * g.real() / (m + 1), 2 * g.imag() / (m + 1), (m - 1) / (m + 1)};
}

}  // namespace

FundamentalMesh integrate_X(const TowerParams& p, const DomainGrid& grid, double tol) {
    FundamentalMesh m;
    const size_t nn = grid.nodes.size();
    m.vertices.assign(nn, Vec3{});
    m.gauss.resize(nn);
    m.z.resize(nn);
    m.tags.assign(nn, BoundaryTag::Interior);
    const double etol = tol / grid.resolution;
    const int N = grid.resolution;
    const int ncol = int(grid.columns.size());

    for (int col = 0; col < ncol; ++col) {
        for (int j = 1; j <= N; ++j) {
            if (col == grid.col_pi && j > grid.j_x) continue;
            const int a = grid.node(col, j - 1), b = grid.node(col, j);
            auto r = radial_edge(p, grid, a, b, etol);
            m.vertices[b] = m.vertices[a] + r.value;
            m.integration_error += r.error;
        }
    }
    for (bool lower : {false, true})
        for (int j = grid.j_x + 1; j <= N; ++j) {
            const int a = grid.node(grid.col_pi, j - 1, lower), b = grid.node(grid.col_pi, j, lower);
            auto r = radial_edge(p, grid, a, b, etol);
            m.vertices[b] = m.vertices[a] + r.value;
            m.integration_error += r.error;
        }

    for (size_t i = 0; i < nn; ++i) {
        m.gauss[i] = gauss_of(p, grid.nodes[i]);
        m.z[i] = grid.nodes[i].pt.z;
    }
    m.faces = grid.cells;
    m.curves = grid.curves;
    // Later tags win at shared corners.
    const BoundaryTag order[] = {BoundaryTag::End, BoundaryTag::Ucurve, BoundaryTag::Stretch1,
                                 BoundaryTag::Stretch4, BoundaryTag::Stretch6, BoundaryTag::Stretch5};
    for (BoundaryTag t : order)
        for (const auto& c : grid.curves)
            if (c.tag == t)
                for (int v : c.nodes) m.tags[v] = t;
    m.base_vertex = grid.center;
    m.closure_corner = grid.closure_corner;
    m.h = grid.spacing();
    return m;
}

double path_independence_residual(const TowerParams& p, const DomainGrid& grid, const FundamentalMesh& mesh,
                                  int samples, unsigned seed, double tol) {
    std::mt19937 rng(seed);
    const int N = grid.resolution;
    const int last = int(grid.columns.size()) - 1;
    std::uniform_int_distribution<int> col_d(1, last), ring_d(1, N);
    double worst = 0.0;
    int done = 0;
    while (done < samples) {
        const int col = col_d(rng), j = ring_d(rng);
        if (col == grid.col_pi || col == grid.col_pi + 1) continue;
        const int a = grid.node(col - 1, j), b = grid.node(col, j);
        auto r = integrate_path(p, straight(grid.nodes[a], grid.nodes[b], true), tol);
        worst = std::max(worst, norm(mesh.vertices[a] + r.value - mesh.vertices[b]));
        ++done;
    }
    return worst;
}

VerticalPeriod vertical_period(const TowerParams& p, double tol) {
    p.validate();
    const int n = 4 * p.k;
    auto ray = [&](cplx db, Side side) {
        const BranchState s = canonical_state(p, db, side);
        EdgePath e{db, s, [=](double t) { return db * std::pow(t, n); },
                   [=](double t) { return db * (n * std::pow(t, n - 1)); }};
        return integrate_path(p, e, tol).value.z;
    };
    VerticalPeriod v;
    v.period = 4.0 * std::fabs(ray(1.0 - p.y, Side::Upper));
    v.period_alt = 4.0 * std::fabs(ray(cplx(-p.y, -1.0), Side::Auto));
    return v;
}

double mesh_vertical_period(const FundamentalMesh& mesh) {
    double top = 0, bot = 0;
    int nt = 0, nb = 0;
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const BoundaryTag t = mesh.tags[i];
        if (t == BoundaryTag::Stretch1 || t == BoundaryTag::Stretch4) {
            top += mesh.vertices[i].z;
            ++nt;
        } else if (t == BoundaryTag::Stretch5) {
            bot += mesh.vertices[i].z;
            ++nb;
        }
    }
    if (!nt || !nb) throw InvalidParams("mesh lacks horizontal mirror curves or the straight line");
    return 4.0 * std::fabs(top / nt - bot / nb);
}

namespace {

Mat3 line_rotation(int k) {
    const double c = std::cos(kPi / (2 * k)), s = std::sin(kPi / (2 * k));
    return Mat3{{2 * c * c - 1, 2 * c * s, 0, 2 * c * s, 2 * s * s - 1, 0, 0, 0, -1}};
}

}  // namespace

FundamentalMesh place_canonical(const FundamentalMesh& mesh, int k) {
    FundamentalMesh out = mesh;
    const Mat3 R = line_rotation(k);
    for (auto& v : out.vertices) v = R * v;
    for (auto& n : out.gauss) n = R * n;
    return out;
}

FundamentalMesh scale_to_period(const FundamentalMesh& mesh, double target) {
    if (!(target > 0)) throw InvalidParams("target period must be positive");
    const double P = mesh_vertical_period(mesh);
    if (!(P > 0)) throw InvalidParams("mesh has no vertical period");
    FundamentalMesh out = mesh;
    const double lam = target / P;
    for (auto& v : out.vertices) v *= lam;
    out.integration_error *= lam;
    return out;
}

// ---------------------------------------------------------------------------
// Isometries

Isometry Isometry::then(const Isometry& next) const {
    Isometry r;
    r.linear = next.linear * linear;
    r.translation = next.linear * translation + next.translation;
    r.parity = parity ^ next.parity;
    r.word = word.empty() ? next.word : (next.word.empty() ? word : next.word + "*" + word);
    return r;
}

Isometry identity_isometry() { return {}; }

Isometry rotation_about_line(const Vec3& point, const Vec3& dir, double angle) {
    const Vec3 u = normalized(dir);
    const double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
    Isometry r;
    r.linear = Mat3{{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y,
                     t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x,
                     t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}};
    r.translation = point - r.linear * point;
    return r;
}

Isometry reflection_in_plane(const Vec3& point, const Vec3& normal) {
    const Vec3 n = normalized(normal);
    Isometry r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.linear(i, j) = (i == j ? 1.0 : 0.0) - 2 * n[i] * n[j];
    r.translation = point - r.linear * point;
    return r;
}

Isometry translation(const Vec3& t) {
    Isometry r;
    r.translation = t;
    return r;
}

Isometry rho(int k) {
    Isometry rot = rotation_about_line({0, 0, 0}, {0, 0, 1}, kPi / k);
    Isometry r = rot.then(reflection_in_plane({0, 0, 0}, {0, 0, 1}));
    r.word = "rho";
    return r;
}

namespace {

// Vertical shift by a multiple of 4 so that the image of the slab [0,1] starts in [0,4).
Isometry normalize_height(Isometry e) {
    const double sgn = e.linear(2, 2);
    const double lo = sgn > 0 ? e.translation.z : e.translation.z - 1.0;
    e.translation.z -= 4.0 * std::floor(lo / 4.0 + 1e-12);
    return e;
}

bool same(const Isometry& a, const Isometry& b) {
    return max_abs_diff(a.linear, b.linear) < 1e-9 && norm(a.translation - b.translation) < 1e-9;
}

}  // namespace

SymmetryGroup symmetry_group(const TowerParams& p, int copies) {
    p.validate();
    if (copies < 1) throw InvalidParams("copies must be >= 1");
    SymmetryGroup G;
    G.k = p.k;
    const double c = 1.0 / std::tan(kPi / (2 * p.k));
    Isometry line = rotation_about_line({0, 0, 0}, {c, 1, 0}, kPi);
    line.parity = 1;
    line.word = "L";
    Isometry vert = reflection_in_plane({0, 0, 0}, {0, 1, 0});
    vert.parity = 1;
    vert.word = "V";
    Isometry hor = reflection_in_plane({0, 0, 1}, {0, 0, 1});
    hor.parity = 1;
    hor.word = "H";
    G.generators = {line, vert, hor};

    std::vector<Isometry> elems{identity_isometry()};
    for (size_t i = 0; i < elems.size(); ++i)
        for (const auto& gen : G.generators) {
            Isometry e = normalize_height(elems[i].then(gen));
            auto it = std::find_if(elems.begin(), elems.end(), [&](const Isometry& q) { return same(q, e); });
            if (it == elems.end()) {
                elems.push_back(e);
                if (elems.size() > size_t(64 * p.k)) throw std::logic_error("symmetry group failed to close");
            } else if (it->parity != e.parity) {
                throw std::logic_error("symmetry group has inconsistent parity");
            }
        }
    G.per_period = int(elems.size());
    for (int m = -(copies - 1); m <= copies - 1; ++m)
        for (const auto& e : elems) {
            Isometry t = e.then(translation({0, 0, 4.0 * m}));
            t.parity = e.parity;
            t.word = e.word;
            if (m) t.word += "+T" + std::to_string(m);
            G.elements.push_back(t);
        }
    return G;
}

// ---------------------------------------------------------------------------
// Weld

WeldReport weld_residual(const FundamentalMesh& mesh, int k) {
    WeldReport r;
    const double a = kPi / (2 * k);
    const Vec3 u{std::cos(a), std::sin(a), 0};
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        double d = 0;
        switch (mesh.tags[i]) {
            case BoundaryTag::Stretch6: d = std::fabs(v.y); break;
            case BoundaryTag::Stretch5: d = norm(v - dot(v, u) * u); break;
            case BoundaryTag::Stretch1:
            case BoundaryTag::Stretch4: d = std::fabs(v.z - 1.0); break;
            default: break;
        }
        r.boundary = std::max(r.boundary, d);
    }
    if (mesh.closure_corner >= 0) {
        const Vec3& P = mesh.vertices[mesh.closure_corner];
        r.closure = std::fabs(-std::sin(kPi / k) * P.x + std::cos(kPi / k) * P.y);
    }
    return r;
}

namespace {

struct CellKey {
    long long x, y, z;
    bool operator==(const CellKey&) const = default;
};
struct CellHash {
    size_t operator()(const CellKey& c) const {
        return size_t(c.x * 73856093LL ^ c.y * 19349663LL ^ c.z * 83492791LL);
    }
};

}  // namespace

ReplicateResult replicate(const FundamentalMesh& mesh, const SymmetryGroup& group, const ReplicateOptions& opt) {
    ReplicateResult res;
    const bool trivial = group.elements.size() <= 1;
    if (!trivial) {
        res.weld = weld_residual(mesh, group.k);
        if (opt.strict && res.weld.max() > opt.weld_tol) {
            std::ostringstream os;
            os << "boundary curves miss their symmetry sets by " << res.weld.max() << " (weld tolerance "
               << opt.weld_tol << ")";
            throw WeldMismatch(os.str(), res.weld.max());
        }
    }
    if (group.elements.empty()) {
        res.mesh = mesh;
        return res;
    }

    FundamentalMesh& out = res.mesh;
    out.h = mesh.h;
    out.integration_error = mesh.integration_error;
    const double cell = std::max(opt.weld_tol, 1e-12) * 4.0;
    std::unordered_map<CellKey, std::vector<int>, CellHash> hash;
    std::vector<int> owner;  // copy index of each output vertex
    auto key = [&](const Vec3& v) {
        return CellKey{(long long)std::floor(v.x / cell), (long long)std::floor(v.y / cell),
                       (long long)std::floor(v.z / cell)};
    };

    for (size_t ci = 0; ci < group.elements.size(); ++ci) {
        const Isometry& E = group.elements[ci];
        std::vector<int> map(mesh.vertices.size());
        for (size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3 v = E.apply(mesh.vertices[i]);
            const bool boundary = mesh.tags[i] != BoundaryTag::Interior;
            int found = -1;
            if (boundary) {
                const CellKey c = key(v);
                double best = opt.weld_tol;
                for (long long dx = -1; dx <= 1; ++dx)
                    for (long long dy = -1; dy <= 1; ++dy)
                        for (long long dz = -1; dz <= 1; ++dz) {
                            auto it = hash.find({c.x + dx, c.y + dy, c.z + dz});
                            if (it == hash.end()) continue;
                            for (int q : it->second) {
                                if (owner[q] == int(ci)) continue;
                                const double d = norm(out.vertices[q] - v);
                                if (d <= best) {
                                    best = d;
                                    found = q;
                                }
                            }
                        }
            }
            if (found >= 0) {
                map[i] = found;
                ++res.welded;
                continue;
            }
            map[i] = int(out.vertices.size());
            out.vertices.push_back(v);
            out.gauss.push_back(E.apply_normal(mesh.gauss[i]));
            out.tags.push_back(mesh.tags[i]);
            owner.push_back(int(ci));
            if (boundary) hash[key(v)].push_back(map[i]);
        }
        for (const auto& f : mesh.faces) {
            if (E.parity)
                out.faces.push_back({map[f[0]], map[f[2]], map[f[1]]});
            else
                out.faces.push_back({map[f[0]], map[f[1]], map[f[2]]});
        }
        for (const auto& c : mesh.curves) {
            BoundaryCurve nc{c.tag, {}};
            for (int v : c.nodes) nc.nodes.push_back(map[v]);
            out.curves.push_back(nc);
        }
        if (ci == 0) {
            out.base_vertex = map[mesh.base_vertex];
            out.closure_corner = mesh.closure_corner >= 0 ? map[mesh.closure_corner] : -1;
        }
    }
    if (trivial && group.elements.size() == 1 && max_abs_diff(group.elements[0].linear, Mat3{}) == 0 &&
        norm(group.elements[0].translation) == 0) {
        out.z = mesh.z;
    }
    return res;
}

TowerMesh build_tower(const TowerParams& p, int resolution, double end_cutoff, int copies, double quad_tol,
                      const ReplicateOptions& opt) {
    TowerMesh t;
    t.grid = build_grid(p, resolution, end_cutoff);
    t.raw = integrate_X(p, t.grid, quad_tol);
    const VerticalPeriod P = vertical_period(p, quad_tol);
    t.scale = 4.0 / P.period;
    t.piece = place_canonical(t.raw, p.k);
    for (auto& v : t.piece.vertices) v *= t.scale;
    t.piece.integration_error *= t.scale;
    t.group = symmetry_group(p, copies);
    t.tower = replicate(t.piece, t.group, opt);
    return t;
}

}  // namespace scherk
