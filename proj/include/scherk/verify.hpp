#pragma once

// Executable audit of the pointwise and mesh-level claims about the tower.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "scherk/meshgen.hpp"
#include "scherk/params.hpp"

namespace scherk {

struct CheckResult {
    std::string name;
    std::string status;  // "pass", "fail", "skip"
    double residual = 0;
    double tolerance = 0;
    std::string detail;
};

// pass iff residual <= tolerance (NaN fails).
CheckResult make_check(std::string name, double residual, double tolerance, std::string detail = {});
CheckResult skip_check(std::string name, std::string why);

struct AuditReport {
    TowerParams params;
    std::vector<CheckResult> checks;
    std::string tool_version;
    std::string config_hash;

    void add(CheckResult c);  // throws std::logic_error on a duplicate name
    bool passed() const;      // no failing check (skips allowed)
    nlohmann::ordered_json to_json() const;
    std::string table() const;
};

// Thresholds used by the direction classes.
constexpr double kImagTol = 1e-9;     // "in iR": |Re v| < 1e-9 |v|
constexpr double kComplexTol = 1e-6;  // "genuinely complex": both parts > 1e-6 |v|

CheckResult check_gauss_circle(const TowerParams& p, int n);
// g^{4k} against the algebraic relation and the null identity at random interior points.
std::vector<CheckResult> check_weierstrass_identities(const TowerParams& p, int n, unsigned seed);
std::vector<CheckResult> check_table1(const TowerParams& p, int n = 16);
std::vector<CheckResult> check_involutions(const TowerParams& p, int n = 8);

// Height gained along one bank of the slit, from x to -1 (reversed: -1 to x).
double ucurve_bank_height(const TowerParams& p, Side bank, double tol, bool reversed = false);
std::vector<CheckResult> check_ucurve(const TowerParams& p, double tol, int n = 200);

struct MeshCheckOptions {
    double h = 1.0 / 64;
    double C = 10;
    const FundamentalMesh* piece = nullptr;  // fundamental piece for the normal test
};
std::vector<CheckResult> check_mesh(const FundamentalMesh& tower, const SymmetryGroup& group,
                                    const MeshCheckOptions& opt);

// Largest distance from an isometric image of the vertex set to the set,
// over vertices whose image stays inside the set's height range.
double vertex_set_residual(const std::vector<Vec3>& v, const Isometry& g, int* compared = nullptr);

CheckResult check_degree_bookkeeping(const TowerParams& p);
CheckResult check_zero_census(const TowerParams& p);

struct AuditOptions {
    double quad_tol = 1e-10;
    int resolution = 64;
    double end_cutoff = 1e-2;
    int copies = 1;
    double weld_tol = 1e-6;
    double C = 10;
    unsigned seed = 1;
    std::set<std::string> only;  // empty: everything; otherwise names or name prefixes before '.'
    bool include_mesh = true;    // false: pointwise checks only, the caller audits its own mesh
};

bool selected(const std::set<std::string>& only, const std::string& name);

// Full audit. When `tower` is null and a mesh check is selected, the tower is built here.
AuditReport run_audit(const TowerParams& p, const AuditOptions& opt, const TowerMesh* tower = nullptr);

}  // namespace scherk
