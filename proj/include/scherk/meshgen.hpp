#pragma once

// Fundamental-domain mesh: polar grid around z = y on the cut disk, immersion
// X = Re \int Phi along radial rays, canonical placement, symmetry group and
// replication into a tower.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scherk/params.hpp"
#include "scherk/vec.hpp"
#include "scherk/weier.hpp"

namespace scherk {

enum class BoundaryTag : std::uint8_t { Interior, Stretch1, Stretch4, Stretch5, Stretch6, Ucurve, End };
const char* tag_name(BoundaryTag t);

enum class NodeKind : std::uint8_t { Regular, CenterY, BranchX };

struct GridNode {
    DomainPoint pt;
    Side side = Side::Auto;
    int column = 0;
    int ring = 0;
    NodeKind kind = NodeKind::Regular;
    int parent = -1;  // branch-tree parent; -1 means continued from the anchor
};

struct BoundaryCurve {
    BoundaryTag tag = BoundaryTag::Interior;
    std::vector<int> nodes;  // ordered along the boundary loop
};

struct DomainGrid {
    TowerParams params;
    int resolution = 0;
    double end_cutoff = 0;
    double slit_offset = 0;  // banks of [-1,x] are separated by branch state, not geometry

    std::vector<double> theta;          // column angles around y, 0 .. 2pi
    std::vector<double> ring_fraction;  // radial fractions, 0 .. 1
    int j_x = 0;       // ring through z = x on the column theta = pi
    int j_chain = 0;   // ring carrying the angular branch chain
    int col_pi = 0;
    int col_tangent = 0;  // first column clipped by the end disk is col_tangent + 1

    std::vector<GridNode> nodes;
    std::vector<std::vector<int>> columns;  // columns[c][ring]; upper bank on col_pi
    std::vector<int> lower_bank;            // col_pi lower-bank copies by ring (-1 if shared)
    std::vector<std::array<int, 3>> cells;  // counter-clockwise in z
    std::vector<BoundaryCurve> curves;

    int center = 0;
    int node_x = -1;
    int closure_corner = -1;  // z = -1 on the upper bank (end of the period path)

    // Node on column c, ring j; `lower` selects the lower bank on col_pi.
    int node(int c, int j, bool lower = false) const;
    double spacing() const { return 1.0 / resolution; }
};

DomainGrid build_grid(const TowerParams& p, int resolution, double end_cutoff);

struct FundamentalMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> gauss;
    std::vector<BoundaryTag> tags;
    std::vector<BoundaryCurve> curves;
    std::vector<cplx> z;  // parameter of each vertex (fundamental piece only)
    int base_vertex = -1;
    int closure_corner = -1;
    double h = 0;                  // grid spacing used for C h^2 bounds
    double integration_error = 0;  // accumulated quadrature error estimate
};

// Raw immersion: X(z = y) = 0, radial quadrature per edge with error below tol.
FundamentalMesh integrate_X(const TowerParams& p, const DomainGrid& grid, double tol);

// Path independence: recompute `samples` vertices through the neighbouring
// column and an angular chord. Returns the largest discrepancy.
double path_independence_residual(const TowerParams& p, const DomainGrid& grid, const FundamentalMesh& mesh,
                                  int samples, unsigned seed, double tol);

struct VerticalPeriod {
    double period = 0;      // from the stretch y < z < 1 up to the horizontal mirror
    double period_alt = 0;  // from a second ray, y -> -i
};
VerticalPeriod vertical_period(const TowerParams& p, double tol);

// Period read off a mesh: four times the height between the horizontal mirror
// curves and the straight line.
double mesh_vertical_period(const FundamentalMesh& mesh);

// Rotate so that the straight line stays fixed, the stretch-6 plane becomes
// Ox1x3 and the horizontal mirror curves move above the line.
FundamentalMesh place_canonical(const FundamentalMesh& mesh, int k);
FundamentalMesh scale_to_period(const FundamentalMesh& mesh, double target = 4.0);

struct Isometry {
    Mat3 linear;
    Vec3 translation;
    int parity = 0;  // 1 when the induced map on the parameter domain is anti-conformal
    std::string word;

    Vec3 apply(const Vec3& v) const { return linear * v + translation; }
    Vec3 apply_normal(const Vec3& n) const {
        const double s = (parity ? -1.0 : 1.0) * (linear.det() > 0 ? 1.0 : -1.0);
        return s * (linear * n);
    }
    Isometry then(const Isometry& next) const;  // next o this
};

Isometry identity_isometry();
Isometry rotation_about_line(const Vec3& point, const Vec3& dir, double angle);
Isometry reflection_in_plane(const Vec3& point, const Vec3& normal);
Isometry translation(const Vec3& t);
Isometry rho(int k);  // pi/k rotation about Ox3 composed with reflection in Ox1x2

struct SymmetryGroup {
    int k = 3;
    std::vector<Isometry> generators;  // line rotation, vertical mirror, horizontal mirror
    std::vector<Isometry> elements;    // one period, translated by (0,0,4m), |m| < copies
    int per_period = 0;
};

// Canonical, period-normalized frame: line through the origin with direction
// (cot(pi/2k), 1, 0), mirror Ox1x3, horizontal mirror x3 = 1.
SymmetryGroup symmetry_group(const TowerParams& p, int copies);

struct WeldReport {
    double boundary = 0;  // symmetric boundary curves off their mirror/axis
    double closure = 0;   // period-path end point off its mirror plane
    double max() const { return boundary > closure ? boundary : closure; }
};
WeldReport weld_residual(const FundamentalMesh& canonical, int k);

struct ReplicateOptions {
    double weld_tol = 1e-6;
    bool strict = true;  // throw WeldMismatch; otherwise only report
};

struct ReplicateResult {
    FundamentalMesh mesh;
    WeldReport weld;
    int welded = 0;
};

ReplicateResult replicate(const FundamentalMesh& mesh, const SymmetryGroup& group, const ReplicateOptions& opt = {});

// Full pipeline for one parameter point.
struct TowerMesh {
    DomainGrid grid;
    FundamentalMesh raw;
    FundamentalMesh piece;  // canonical and normalized
    double scale = 1;       // lambda applied to the raw piece
    ReplicateResult tower;
    SymmetryGroup group;
};

TowerMesh build_tower(const TowerParams& p, int resolution, double end_cutoff, int copies, double quad_tol,
                      const ReplicateOptions& opt = {});

}  // namespace scherk
