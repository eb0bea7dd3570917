#include "scherk/weier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "scherk/errors.hpp"

namespace scherk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSafeRadius = 1e-200;
const cplx I{0.0, 1.0};

// All factors are formed from the offset dy = z - y so that points
// y + s^{4k} keep full relative precision near z = y.
struct Factors {
    cplx dy, z, om, zx, omxz, opz, omz;
};

Factors factors(const TowerParams& p, cplx dy) {
    const double y = p.y, x = p.x;
    Factors f;
    f.dy = dy;
    f.z = y + dy;
    f.om = (1.0 - y * y) - y * dy;        // 1 - yz
    f.zx = (y - x) + dy;                  // z - x
    f.omxz = (1.0 - x * y) - x * dy;      // 1 - xz
    f.opz = (1.0 + y) + dy;               // 1 + z
    f.omz = (1.0 - y) - dy;               // 1 - z
    return f;
}

// arg in [0, 2pi): the [y,1] cut. Real positive offsets belong to the upper
// bank unless the lower one is requested.
double arg_dy(cplx dy, Side side) {
    if (dy.imag() == 0.0 && dy.real() > 0.0) return side == Side::Lower ? 2 * kPi : 0.0;
    if (dy.imag() == 0.0 && dy.real() < 0.0) return kPi;
    double a = std::atan2(dy.imag(), dy.real());
    return a < 0 ? a + 2 * kPi : a;
}

// Principal arg of z - x with the [-1,x] cut sides made explicit.
double arg_zx(cplx v, Side side) {
    if (v.imag() == 0.0 && v.real() < 0.0) return side == Side::Lower ? -kPi : kPi;
    return std::arg(v);
}

double phase_ratio(cplx b, cplx a) { return std::arg(b / a); }

cplx Ycoef(const TowerParams& p) { return I * ((1.0 - p.y) / (1.0 + p.y)); }

// 1/w from the tracked arg of w^2; exact zero at z = -1.
cplx winv_of(const TowerParams& p, const Factors& f, double argW) {
    const double mag = std::abs(f.opz) * (1.0 + p.y) /
                       (2.0 * std::sqrt(std::abs(f.om) * std::abs(f.dy)));
    return std::polar(mag, -0.5 * argW);
}

// Square root with the cut along the negative imaginary axis. F^2 is a
// negative real on the lower bank of (y,1), so the usual cut would leave the
// sign there to rounding noise.
cplx sqrt_rot(cplx v) {
    double a = std::arg(v);
    if (a <= -0.5 * kPi) a += 2 * kPi;
    return std::polar(std::sqrt(std::abs(v)), 0.5 * a);
}

// Near the end (z -> 1 with w -> Y) the direct form cancels; there use
// w^2 - Y^2 = ((1-z)/(1+z))^2, i.e. F^2 = ((1-z)/(1+z))^2 / (w (w + Y)).
cplx F_principal(const TowerParams& p, const Factors& f, double argW) {
    const cplx Y = Ycoef(p);
    const cplx wi = winv_of(p, f, argW);
    cplx v = 1.0 - Y * wi;
    if (std::norm(v) < 0.25) {
        const cplx q = f.omz / f.opz;
        v = q * q * wi / (1.0 / wi + Y);
    }
    return sqrt_rot(v);
}

bool is_zero(cplx v) { return v.real() == 0.0 && v.imag() == 0.0; }

// F from the identity F^2 = 1 + q/u with u = sqrt(z-y), q = (1-y)(1+z)/(2 sqrt(1-yz)).
// sqrt(u+q) uses the cut at arg -pi/2, which is continuous on the cut disk.
cplx F_closed_form(const TowerParams& p, const Factors& f, double argD) {
    const double r = std::abs(f.dy);
    const cplx u = std::polar(std::sqrt(r), 0.5 * argD);
    const cplx q = (1.0 - p.y) * f.opz / (2.0 * std::sqrt(f.om));
    const cplx v = u + q;
    double av = std::arg(v);
    if (av < -0.5 * kPi) av += 2 * kPi;
    return std::polar(std::sqrt(std::abs(v)), 0.5 * av) / std::polar(std::sqrt(std::sqrt(r)), 0.25 * argD);
}

}  // namespace

cplx anchor_point(const TowerParams& p) { return 0.5 * (p.y + 1.0); }

BranchState anchor_state(const TowerParams& p) {
    return canonical_state(p, cplx(0.5 * (1.0 - p.y), 0.0), Side::Upper);
}

BranchState canonical_state(const TowerParams& p, cplx dy, Side side) {
    const Factors f = factors(p, dy);
    BranchState s;
    const double aD = arg_dy(dy, side);
    const double aOm = std::arg(f.om);
    s.argA = aD - aOm;
    s.argB = std::arg(f.omxz) - arg_zx(f.zx, side);
    s.argW = -kPi + aOm + aD - 2.0 * (is_zero(f.opz) ? 0.0 : std::arg(f.opz));
    s.sheet = 1;
    if (!is_zero(dy)) {
        const cplx fp = F_principal(p, f, s.argW);
        const cplx fc = F_closed_form(p, f, aD);
        s.sheet = (std::conj(fp) * fc).real() >= 0.0 ? 1 : -1;
    }
    return s;
}

DomainPoint DomainPoint::offset(const TowerParams& p, cplx dy, Side side) {
    DomainPoint pt;
    pt.dy = dy;
    pt.z = p.y + dy;
    pt.branch = canonical_state(p, dy, side);
    pt.exterior = std::abs(pt.z) > 1.0;
    return pt;
}

DomainPoint DomainPoint::at(const TowerParams& p, cplx z, Side side) {
    return offset(p, z - p.y, side);
}

DomainPoint DomainPoint::with_branch(const TowerParams& p, cplx dy, const BranchState& b) {
    DomainPoint pt;
    pt.dy = dy;
    pt.z = p.y + dy;
    pt.branch = b;
    pt.exterior = std::abs(pt.z) > 1.0;
    return pt;
}

namespace {

bool on_end_sheet(const TowerParams& p, const Factors& f, const BranchState& b) {
    if (!is_zero(f.omz)) return false;
    return std::norm(F_principal(p, f, b.argW)) < 0.5;
}

}  // namespace

cplx eval_g(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    if (std::abs(f.zx) < kSafeRadius) throw BranchPointHit("g: z at the branch point x");
    if (on_end_sheet(p, f, pt.branch)) throw EndPointHit("g: z = 1 on the end sheet");
    const double a = p.a();
    const double magA = std::abs(f.dy) / std::abs(f.om);
    const double magB = std::abs(f.omxz) / std::abs(f.zx);
    const double mag = std::pow(magA, a) * std::sqrt(magB);
    const double phase = kPi + kPi / p.k + a * pt.branch.argA + 0.5 * pt.branch.argB;
    return std::polar(mag, phase);
}

cplx eval_w(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    if (std::abs(f.opz) < kSafeRadius) throw PoleHit("w: pole at z = -1");
    const double mag = 2.0 * std::sqrt(std::abs(f.om) * std::abs(f.dy)) / (std::abs(f.opz) * (1.0 + p.y));
    return std::polar(mag, 0.5 * pt.branch.argW);
}

cplx eval_w_inv(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    if (std::abs(f.dy) < kSafeRadius) throw BranchPointHit("1/w: w vanishes at z = y");
    return winv_of(p, f, pt.branch.argW);
}

cplx eval_F(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    if (std::abs(f.dy) < kSafeRadius) throw BranchPointHit("F: branch point at z = y");
    return double(pt.branch.sheet) * F_principal(p, f, pt.branch.argW);
}

cplx eval_dh_dz(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    if (std::abs(f.dy) < kSafeRadius) throw BranchPointHit("dh: branch point at z = y");
    const cplx F = double(pt.branch.sheet) * F_principal(p, f, pt.branch.argW);
    if (is_zero(F) || on_end_sheet(p, f, pt.branch)) throw EndPointHit("dh: simple pole at the end z = 1");
    return 1.0 / (F * f.om * (-f.dy));
}

WeierstrassForms eval_phi(const TowerParams& p, const DomainPoint& pt) {
    WeierstrassForms w;
    w.dh_dz = eval_dh_dz(p, pt);
    w.g = eval_g(p, pt);
    const cplx ig = 1.0 / w.g;
    w.phi1 = 0.5 * (ig - w.g) * w.dh_dz;
    w.phi2 = 0.5 * I * (ig + w.g) * w.dh_dz;
    w.phi3 = w.dh_dz;
    return w;
}

cplx eval_dg_dz(const TowerParams& p, const DomainPoint& pt) {
    const Factors f = factors(p, pt.dy);
    const cplx g = eval_g(p, pt);
    if (std::abs(f.dy) < kSafeRadius) throw BranchPointHit("dg: z = y");
    const cplx dlogA = 1.0 / f.dy + p.y / f.om;
    const cplx dlogB = -p.x / f.omxz - 1.0 / f.zx;
    return g * (p.a() * dlogA + 0.5 * dlogB);
}

cplx g_power_rhs(const TowerParams& p, cplx z) {
    const cplx r1 = (p.y - z) / (1.0 - p.y * z);
    const cplx r2 = (1.0 - p.x * z) / (p.x - z);
    cplx out = (p.k - 1) % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < p.k - 1; ++i) out *= r1;
    for (int i = 0; i < 2 * p.k; ++i) out *= r2;
    return out;
}

BranchState step_branch(const TowerParams& p, cplx dy_a, const BranchState& s, cplx dy_b,
                        double max_step_angle) {
    const Factors a = factors(p, dy_a), b = factors(p, dy_b);
    BranchState out = s;
    auto guard = [&](double d, const char* which) {
        if (!(std::fabs(d) < max_step_angle)) {
            std::ostringstream os;
            os << "continuation step rotates " << which << " by " << d << " rad";
            throw StepTooLarge(os.str());
        }
        return d;
    };
    // Each factor is linear in z, so its principal step arg is the exact
    // continuous change along the straight segment.
    const bool dy_ok = !is_zero(a.dy) && !is_zero(b.dy);
    const double dOm = phase_ratio(b.om, a.om);
    const double dDy = dy_ok ? phase_ratio(b.dy, a.dy) : 0.0;
    if (dy_ok) out.argA += guard(dDy - dOm, "arg A");
    if (!is_zero(a.zx) && !is_zero(b.zx))
        out.argB += guard(phase_ratio(b.omxz, a.omxz) - phase_ratio(b.zx, a.zx), "arg B");
    if (dy_ok && !is_zero(a.opz) && !is_zero(b.opz))
        out.argW += guard(dOm + dDy - 2.0 * phase_ratio(b.opz, a.opz), "arg w^2");

    if (dy_ok) {
        const cplx Fa = double(s.sheet) * F_principal(p, a, s.argW);
        const cplx Fb = F_principal(p, b, out.argW);
        const double c = (std::conj(Fa) * Fb).real();
        // Sheet choice needs the F rotation to be clearly below pi/2.
        if (std::fabs(c) < 0.5 * std::abs(Fa) * std::abs(Fb))
            throw StepTooLarge("continuation step rotates F too far to pick a sheet");
        out.sheet = c >= 0 ? 1 : -1;
    }
    return out;
}

namespace {

double seg_dist(cplx a, cplx b, cplx c) {
    const cplx ab = b - a;
    const double L2 = std::norm(ab);
    double t = L2 > 0 ? ((c - a) * std::conj(ab)).real() / L2 : 0.0;
    t = std::fmin(1.0, std::fmax(0.0, t));
    return std::abs(a + t * ab - c);
}

}  // namespace

BranchState continue_branch(const TowerParams& p, std::span<const cplx> path,
                            const BranchState& start, const ContinuationOptions& opt) {
    if (path.empty()) return start;
    const cplx sing[] = {p.y, 1.0 / p.y, p.x, -1.0, 1.0};
    auto check = [&](cplx a, cplx b) {
        for (cplx c : sing)
            if (seg_dist(a, b, c) < opt.clearance) {
                std::ostringstream os;
                os << "path passes within " << seg_dist(a, b, c) << " of singular point " << c;
                throw SingularityClearance(os.str());
            }
    };
    BranchState s = start;
    check(path[0], path[0]);
    for (size_t i = 1; i < path.size(); ++i) {
        check(path[i - 1], path[i]);
        s = step_branch(p, path[i - 1] - p.y, s, path[i] - p.y, opt.max_step_angle);
    }
    return s;
}

namespace {

BranchState track_rec(const TowerParams& p, cplx a, const BranchState& s, cplx b, int depth) {
    try {
        return step_branch(p, a, s, b, 0.25 * kPi);
    } catch (const StepTooLarge&) {
        if (depth > 50) throw;
        const cplx m = 0.5 * (a + b);
        return track_rec(p, m, track_rec(p, a, s, m, depth + 1), b, depth + 1);
    }
}

}  // namespace

BranchState track_branch(const TowerParams& p, cplx dy_a, const BranchState& s, cplx dy_b,
                         double clearance) {
    if (clearance > 0) {
        const cplx za = p.y + dy_a, zb = p.y + dy_b;
        const cplx sing[] = {p.y, 1.0 / p.y, p.x, -1.0, 1.0};
        for (cplx c : sing)
            if (seg_dist(za, zb, c) < clearance) throw SingularityClearance("tracked segment too close to a singular point");
    }
    return track_rec(p, dy_a, s, dy_b, 0);
}

namespace {

cplx inv_conj(cplx g, int) { return 1.0 / std::conj(g); }
cplx conj_only(cplx g, int) { return std::conj(g); }
cplx row5(cplx g, int k) { return -std::polar(1.0, kPi / k) * std::conj(g); }
cplx row6(cplx g, int k) { return std::polar(1.0, 2 * kPi / k) * std::conj(g); }

}  // namespace

InvolutionImage involution_image(const DomainPoint& pt, Involution which, int) {
    switch (which) {
        case Involution::Row1:
        case Involution::Row4:
            return {1.0 / std::conj(pt.z), "1/conj(g)", &inv_conj};
        case Involution::Row2:
        case Involution::Row3:
            return {std::conj(pt.z), "conj(g)", &conj_only};
        case Involution::Row5:
            return {std::conj(pt.z), "-exp(i pi/k) conj(g)", &row5};
        case Involution::Row6:
            return {std::conj(pt.z), "exp(2 i pi/k) conj(g)", &row6};
    }
    throw std::logic_error("unknown involution row");
}

void TowerParams::validate() const {
    std::ostringstream os;
    if (k < 3) os << "k must be >= 3 (got " << k << "); ";
    if (!(y > 0.0 && y < 1.0)) os << "y must lie in (0,1) (got " << y << "); ";
    if (!(x > -1.0 && x < 0.0)) os << "x must lie in (-1,0) (got " << x << "); ";
    if (!os.str().empty()) throw InvalidParams(os.str());
}

std::string TowerParams::str() const {
    std::ostringstream os;
    os.precision(17);
    os << "(k=" << k << ", y=" << y << ", x=" << x << ")";
    return os.str();
}

}  // namespace scherk
