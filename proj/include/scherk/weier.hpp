#pragma once

// Branch-consistent pointwise evaluation of the Weierstrass data of ST_2k on the
// unit disk cut along [-1, x] and [y, 1].
//
//   g^{4k} = (-1)^{k-1} ((y-z)/(1-yz))^{k-1} ((1-xz)/(x-z))^{2k}
//   w^2    = ((1-z)/(1+z))^2 - ((1-y)/(1+y))^2
//   F^2    = 1 - Y/w,  Y = i(1-y)/(1+y)
//   dh     = dz / (F (1-yz)(y-z))
//
// Multivalued factors are carried as accumulated arguments (BranchState).

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scherk/params.hpp"

namespace scherk {

using cplx = std::complex<double>;

struct BranchState {
    double argA = 0;   // arg of (z-y)/(1-yz)
    double argB = 0;   // arg of (1-xz)/(z-x)
    double argW = 0;   // arg of w^2
    int sheet = 1;     // F = sheet * principal sqrt(1 - Y/w)
};

// Which bank to take for a point lying exactly on a cut. Auto treats real
// points as limits from the upper half plane.
enum class Side { Auto, Upper, Lower };

struct DomainPoint {
    cplx z;
    cplx dy;            // z - y carried exactly; z is derived
    BranchState branch;
    bool exterior = false;  // |z| > 1, only for involution images

    // Point with the canonical branch of the cut disk.
    static DomainPoint at(const TowerParams& p, cplx z, Side side = Side::Auto);
    static DomainPoint offset(const TowerParams& p, cplx dy, Side side = Side::Auto);
    // Point with an explicitly supplied branch (no consistency check).
    static DomainPoint with_branch(const TowerParams& p, cplx dy, const BranchState& b);
};

struct WeierstrassForms {
    cplx phi1, phi2, phi3;
    cplx g;
    cplx dh_dz;
};

// Branch state reproducing the stretch formulas at z0 = (y+1)/2.
BranchState anchor_state(const TowerParams& p);
cplx anchor_point(const TowerParams& p);

// Closed-form branch on the cut disk (fast path; the result of continuation from
// the anchor along any path inside the cut disk).
BranchState canonical_state(const TowerParams& p, cplx dy, Side side = Side::Auto);

cplx eval_g(const TowerParams& p, const DomainPoint& pt);
cplx eval_w(const TowerParams& p, const DomainPoint& pt);
cplx eval_w_inv(const TowerParams& p, const DomainPoint& pt);  // finite at z = -1
cplx eval_F(const TowerParams& p, const DomainPoint& pt);
cplx eval_dh_dz(const TowerParams& p, const DomainPoint& pt);
WeierstrassForms eval_phi(const TowerParams& p, const DomainPoint& pt);

// dg/dz from the logarithmic derivative of g (single-valued up to g itself).
cplx eval_dg_dz(const TowerParams& p, const DomainPoint& pt);

// Right side of the algebraic relation for g^{4k} (c = 1).
cplx g_power_rhs(const TowerParams& p, cplx z);

struct ContinuationOptions {
    double clearance = 1e-6;           // minimum distance to {y, 1/y, x, -1, 1}
    double max_step_angle = 1.5707963267948966;  // pi/2
};

// One continuation step of the accumulated arguments from dy_a to dy_b.
BranchState step_branch(const TowerParams& p, cplx dy_a, const BranchState& s, cplx dy_b,
                        double max_step_angle = 1.5707963267948966);

// Continue `start` (valid at path.front()) along the polyline of z values.
BranchState continue_branch(const TowerParams& p, std::span<const cplx> path,
                            const BranchState& start, const ContinuationOptions& opt = {});

// Same along offsets dy = z - y, refining any segment whose step would be too
// large. Used where the caller owns the path geometry.
BranchState track_branch(const TowerParams& p, cplx dy_a, const BranchState& s, cplx dy_b,
                         double clearance = 0.0);

// Rows of the involution table; numbering follows the stretch labels.
enum class Involution { Row1 = 1, Row2, Row3, Row4, Row5, Row6 };

struct InvolutionImage {
    cplx z_image;
    std::string g_transform;  // human-readable law, e.g. "1/conj(g)"
    cplx (*apply)(cplx g, int k);  // the prescribed transform of g
};

InvolutionImage involution_image(const DomainPoint& pt, Involution which, int k);

}  // namespace scherk
